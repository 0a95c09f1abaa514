"""Stationary distribution of the chain and the per-class blocking probabilities.

Two independent routes are provided. :func:`solve_iterative` sweeps the
balance equations state by state (each probability is set to its inflow
divided by its total outflow rate, then the vector is renormalized) until
successive iterates differ by at most ``alpha``. :func:`solve_exact`
solves ``pi Q = 0`` directly and serves as ground truth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .exceptions import SingularSystemError
from .model import Scheme, SystemParams, admit_cc, admit_wifi, d2d_blocked, transitions_out
from .statespace import StateSpace, generator_matrix

DEFAULT_ALPHA = 1e-6
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class StationaryDistribution:
    probs: np.ndarray
    iterations: int
    converged: bool
    residual: float

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class BlockingReport:
    p_block_d2d: float
    p_block_cc: float
    p_block_wifi: float

    def as_tuple(self):
        return (self.p_block_d2d, self.p_block_cc, self.p_block_wifi)

    def to_dict(self):
        return {"d2d": self.p_block_d2d, "cc": self.p_block_cc, "wifi": self.p_block_wifi}


def _inflow_lists(sp: StateSpace, p: SystemParams, sch: Scheme):
    sources = [[] for _ in sp.states]
    rates = [[] for _ in sp.states]
    outflow = [0.0] * len(sp)
    for k, s in enumerate(sp.states):
        for t in transitions_out(s, p, sch):
            dst = sp.index[t.target]
            sources[dst].append(k)
            rates[dst].append(t.rate)
            outflow[k] += t.rate
    return sources, rates, outflow


def balance_residual(dist, sp: StateSpace, p: SystemParams, sch: Scheme) -> float:
    """Largest absolute gap between probability inflow and outflow over all states."""
    probs = dist.probs if isinstance(dist, StationaryDistribution) else np.asarray(dist, dtype=float)
    if len(probs) != len(sp):
        raise ValueError(f"distribution has {len(probs)} entries, state space has {len(sp)}")
    Q = generator_matrix(sp, p, sch)
    return float(np.max(np.abs(Q.T @ probs))) if len(sp) else 0.0


def solve_iterative(
    sp: StateSpace,
    p: SystemParams,
    sch: Scheme = Scheme.PROPOSED,
    alpha: float = DEFAULT_ALPHA,
    max_iter: int = DEFAULT_MAX_ITER,
    in_place: bool = True,
    change_norm: str = "l1",
) -> StationaryDistribution:
    """Fixed-point iteration on the balance equations.

    Starts from the uniform vector and sweeps states in lexicographic order.
    With ``in_place`` (the default) each update already sees the values
    computed earlier in the same sweep; otherwise every update uses the
    previous iterate. After each sweep the vector is renormalized and the
    loop stops once the change from the previous iterate is at most
    ``alpha``, measured as the total absolute change (``change_norm="l1"``)
    or the largest elementwise change (``"max"``). Hitting ``max_iter`` is
    reported through ``converged=False``.

    The previous-iterate variant can oscillate on chains whose transition
    graph is bipartite (every birth-death chain is), so it may not converge.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if change_norm not in ("l1", "max"):
        raise ValueError(f"change_norm must be 'l1' or 'max', got {change_norm!r}")
    reduce = sum if change_norm == "l1" else max
    sources, rates, outflow = _inflow_lists(sp, p, Scheme.parse(sch))
    n = len(sp)
    pi = [1.0 / n] * n
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        prev = pi[:]
        src = pi if in_place else prev
        for k in range(n):
            if outflow[k] > 0:
                acc = 0.0
                for s, r in zip(sources[k], rates[k]):
                    acc += r * src[s]
                pi[k] = acc / outflow[k]
        g = sum(pi)
        pi = [x / g for x in pi]
        if reduce(abs(a - b) for a, b in zip(pi, prev)) <= alpha:
            converged = True
            break
    probs = np.array(pi)
    return StationaryDistribution(probs, it, converged, balance_residual(probs, sp, p, sch))


def solve_exact(sp: StateSpace, p: SystemParams, sch: Scheme = Scheme.PROPOSED) -> StationaryDistribution:
    """Direct solve of the global balance equations with a normalization row.

    The lexicographically last balance equation is replaced by ``sum(pi) = 1``.
    """
    n = len(sp)
    if n == 0:
        raise ValueError("empty state space")
    if n == 1:
        return StationaryDistribution(np.ones(1), 0, True, 0.0)
    A = generator_matrix(sp, p, sch).T.tolil()
    A[n - 1, :] = np.ones(n)
    b = np.zeros(n)
    b[-1] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            probs = spla.spsolve(sps.csc_matrix(A), b)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(f"balance system is singular: {exc}") from exc
    if not np.all(np.isfinite(probs)):
        raise SingularSystemError("balance system is singular")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return StationaryDistribution(probs, 0, True, balance_residual(probs, sp, p, sch))


def blocking_probabilities(dist, sp: StateSpace, p: SystemParams, sch: Scheme) -> BlockingReport:
    """Stationary mass of the states where each class's arrival would be rejected."""
    probs = dist.probs if isinstance(dist, StationaryDistribution) else np.asarray(dist, dtype=float)
    d2d = cc = wifi = 0.0
    for s, pr in zip(sp.states, probs):
        if d2d_blocked(s, p, sch):
            d2d += pr
        if not admit_cc(s, p, sch):
            cc += pr
        if not admit_wifi(s, p, sch):
            wifi += pr
    clip = lambda x: float(min(max(x, 0.0), 1.0))
    return BlockingReport(clip(d2d), clip(cc), clip(wifi))

"""Reachable state set of the chain, with a dense index and the sparse generator."""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .model import EMPTY, Scheme, State, SystemParams, check_bounded, transitions_out


def fingerprint(p: SystemParams, sch: Scheme) -> str:
    payload = json.dumps({"params": p.to_dict(), "scheme": Scheme.parse(sch).value}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class StateSpace:
    states: tuple[State, ...]
    params_fingerprint: str
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, s):
        return tuple(s) in self.index

    def position(self, s) -> int:
        return self.index[State(*s)]

    def as_array(self) -> np.ndarray:
        """States as an ``(len, 4)`` integer array in index order."""
        return np.array(self.states, dtype=np.int64).reshape(-1, 4)

    def dump(self) -> str:
        return "".join(f"{s.i},{s.j},{s.m},{s.n}\n" for s in self.states)


def enumerate_states(p: SystemParams, sch: Scheme = Scheme.PROPOSED) -> StateSpace:
    """Breadth-first closure of the empty state under :func:`transitions_out`.

    Raises CapacityError when some class with traffic would grow without bound.
    """
    sch = Scheme.parse(sch)
    check_bounded(p)
    seen = {EMPTY}
    queue = deque([EMPTY])
    while queue:
        s = queue.popleft()
        for t in transitions_out(s, p, sch):
            if t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    states = tuple(sorted(seen))
    index = {s: k for k, s in enumerate(states)}
    return StateSpace(states=states, params_fingerprint=fingerprint(p, sch), index=index)


def contains(sp: StateSpace, s) -> bool:
    return s in sp


def generator_matrix(sp: StateSpace, p: SystemParams, sch: Scheme) -> sps.csr_matrix:
    """Infinitesimal generator Q (rows sum to zero) in the state-space order."""
    rows, cols, vals = [], [], []
    for k, s in enumerate(sp.states):
        total = 0.0
        for t in transitions_out(s, p, sch):
            rows.append(k)
            cols.append(sp.index[t.target])
            vals.append(t.rate)
            total += t.rate
        rows.append(k)
        cols.append(k)
        vals.append(-total)
    n = len(sp)
    return sps.csr_matrix((vals, (rows, cols)), shape=(n, n))

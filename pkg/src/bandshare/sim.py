"""Discrete-event simulation of the same traffic and admission model.

Three Poisson arrival streams (D2D, CC, Wi-Fi) feed a time-ordered event
list. An admitted packet holds its channel for an exponential time whose
rate is the per-packet bit rate times ``mu`` (averaged over the
uplink/downlink pair for CC). Blocking is counted per arrival after the
warmup period, so by PASTA the estimates converge to the stationary
blocking probabilities of the analytic model.

The event loop is compiled with numba. Replication ``k`` is seeded from
``numpy.random.SeedSequence([seed, k])`` and owns its own generator state,
so results are bit-identical for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats

from .model import TOL, Scheme, State, SystemParams, admission_limits, check_bounded

CLASSES = ("d2d", "cc", "wifi")


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    scheme: Scheme = Scheme.PROPOSED
    seed: int = 42
    horizon: float = 1e5
    warmup: float | None = None  # None: 1% of the horizon
    replications: int = 10
    debug: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.01 * self.horizon)
        if not (math.isfinite(self.horizon) and self.horizon > self.warmup >= 0):
            raise ValueError(f"need horizon > warmup >= 0, got horizon={self.horizon}, warmup={self.warmup}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class ClassStats:
    offered: int
    blocked: int
    estimate: float
    half_width: float
    per_replication: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class SimStats:
    d2d: ClassStats
    cc: ClassStats
    wifi: ClassStats
    mean_occupancy: tuple  # time-averaged (i, j, m, n)

    def by_class(self):
        return {"d2d": self.d2d, "cc": self.cc, "wifi": self.wifi}

    def to_dict(self):
        out = {}
        for name, c in self.by_class().items():
            out[name] = {
                "offered": c.offered,
                "blocked": c.blocked,
                "estimate": c.estimate,
                "half_width": c.half_width if math.isfinite(c.half_width) else None,
            }
        out["mean_occupancy"] = dict(zip("ijmn", self.mean_occupancy))
        return out


def replication_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint32)[0])


@numba.njit(cache=True, nogil=True)
def _heap_push(ht, hs, hc, size, t, seq, cls):
    k = size
    ht[k] = t
    hs[k] = seq
    hc[k] = cls
    while k > 0:
        parent = (k - 1) // 2
        if ht[parent] < ht[k] or (ht[parent] == ht[k] and hs[parent] < hs[k]):
            break
        ht[parent], ht[k] = ht[k], ht[parent]
        hs[parent], hs[k] = hs[k], hs[parent]
        hc[parent], hc[k] = hc[k], hc[parent]
        k = parent
    return size + 1


@numba.njit(cache=True, nogil=True)
def _heap_pop(ht, hs, hc, size):
    size -= 1
    ht[0] = ht[size]
    hs[0] = hs[size]
    hc[0] = hc[size]
    k = 0
    while True:
        left = 2 * k + 1
        if left >= size:
            break
        child = left
        right = left + 1
        if right < size and (ht[right] < ht[left] or (ht[right] == ht[left] and hs[right] < hs[left])):
            child = right
        if ht[k] < ht[child] or (ht[k] == ht[child] and hs[k] < hs[child]):
            break
        ht[child], ht[k] = ht[k], ht[child]
        hs[child], hs[k] = hs[k], hs[child]
        hc[child], hc[k] = hc[k], hc[child]
        k = child
    return size


@numba.njit(cache=True, nogil=True)
def _simulate_one(seed, lam, svc, bits, caps, limits, shared, dims, horizon, warmup, debug):
    """One replication.

    lam: arrival rates (d2d, cc, wifi); svc: per-packet service rates (i, j, m, n);
    bits: (r_l_dd, r_up_cc, r_dw_cc, r_u_dd, r_u_wf); caps: (cap_up, cap_dw, cap_u);
    limits: (unl_d2d, lic_d2d, cc_up, cc_dw, wifi); shared: (lic_d2d_shared, cc_up_shared).
    """
    np.random.seed(seed)
    r_l, r_up, r_dw, r_udd, r_uwf = bits[0], bits[1], bits[2], bits[3], bits[4]
    d1, d2, d3 = dims[1], dims[2], dims[3]
    hist = np.zeros(dims[0] * d1 * d2 * d3)
    offered = np.zeros(3, np.int64)
    blocked = np.zeros(3, np.int64)
    occ = np.zeros(4, np.int64)

    cap = dims[0] + d1 + d2 + d3
    ht = np.empty(cap)
    hs = np.empty(cap, np.int64)
    hc = np.empty(cap, np.int64)
    hsize = 0

    seq = 0
    arr_t = np.empty(3)
    arr_s = np.empty(3, np.int64)
    for c in range(3):
        arr_t[c] = np.random.exponential(1.0 / lam[c]) if lam[c] > 0 else np.inf
        arr_s[c] = seq
        seq += 1

    t = 0.0
    while True:
        c = 0
        for k in range(1, 3):
            if arr_t[k] < arr_t[c] or (arr_t[k] == arr_t[c] and arr_s[k] < arr_s[c]):
                c = k
        t_next = arr_t[c]
        departure = False
        if hsize > 0 and (ht[0] < t_next or (ht[0] == t_next and hs[0] < arr_s[c])):
            t_next = ht[0]
            departure = True

        lo = max(t, warmup)
        hi = min(t_next, horizon)
        if hi > lo:
            hist[((occ[0] * d1 + occ[1]) * d2 + occ[2]) * d3 + occ[3]] += hi - lo
        if t_next > horizon:
            break
        t = t_next

        if departure:
            cls = hc[0]
            hsize = _heap_pop(ht, hs, hc, hsize)
            occ[cls] -= 1
        else:
            arr_t[c] = t + np.random.exponential(1.0 / lam[c])
            arr_s[c] = seq
            seq += 1
            counted = t >= warmup
            if counted:
                offered[c] += 1
            unl = occ[2] * r_udd + occ[3] * r_uwf
            dim = -1
            if c == 0:
                if unl <= limits[0] + TOL:
                    dim = 2
                else:
                    lic = occ[0] * r_l
                    if shared[0]:
                        lic += occ[1] * r_up
                    if lic <= limits[1] + TOL:
                        dim = 0
            elif c == 1:
                up = occ[1] * r_up
                if shared[1]:
                    up += occ[0] * r_l
                if up <= limits[2] + TOL and occ[1] * r_dw <= limits[3] + TOL:
                    dim = 1
            else:
                if unl <= limits[4] + TOL:
                    dim = 3
            if dim < 0:
                if counted:
                    blocked[c] += 1
            else:
                occ[dim] += 1
                hsize = _heap_push(ht, hs, hc, hsize, t + np.random.exponential(1.0 / svc[dim]), seq, dim)
                seq += 1

        if debug:
            if (occ[0] * r_l + occ[1] * r_up > caps[0] + TOL
                    or occ[1] * r_dw > caps[1] + TOL
                    or occ[2] * r_udd + occ[3] * r_uwf > caps[2] + TOL
                    or occ[0] >= dims[0] or occ[1] >= d1 or occ[2] >= d2 or occ[3] >= d3):
                raise RuntimeError("simulator visited an illegal state")
    return offered, blocked, hist


def _box_max(cap, rate):
    return int(math.floor(cap / rate + TOL)) if rate > 0 else 0


def _kernel_inputs(p: SystemParams, sch: Scheme):
    lim = admission_limits(p, sch)
    lam = np.array([p.lambda_d2d, p.lambda_cc, p.lambda_wifi])
    svc = np.array([p.mu * p.r_l_dd, p.cc_service_rate, p.mu * p.r_u_dd, p.mu * p.r_u_wf])
    bits = np.array([p.r_l_dd, p.r_up_cc, p.r_dw_cc, p.r_u_dd, p.r_u_wf])
    caps = np.array([p.cap_up, p.cap_dw, p.cap_u])
    limits = np.array([lim.unl_d2d, lim.lic_d2d, lim.cc_up, lim.cc_dw, lim.wifi])
    shared = np.array([lim.lic_d2d_shared, lim.cc_up_shared])
    jmax = min(
        _box_max(p.cap_up, p.r_up_cc) if p.r_up_cc > 0 else math.inf,
        _box_max(p.cap_dw, p.r_dw_cc) if p.r_dw_cc > 0 else math.inf,
    )
    dims = np.array([
        _box_max(p.cap_up, p.r_l_dd) + 1,
        (0 if jmax == math.inf else jmax) + 1,
        _box_max(p.cap_u, p.r_u_dd) + 1,
        _box_max(p.cap_u, p.r_u_wf) + 1,
    ], dtype=np.int64)
    return lam, svc, bits, caps, limits, shared, dims


def _run(cfg: SimConfig):
    p = cfg.params
    check_bounded(p)
    lam, svc, bits, caps, limits, shared, dims = _kernel_inputs(p, cfg.scheme)
    results = []
    for k in range(cfg.replications):
        results.append(_simulate_one(
            replication_seed(cfg.seed, k), lam, svc, bits, caps, limits, shared, dims,
            float(cfg.horizon), float(cfg.warmup), bool(cfg.debug),
        ))
    return results, tuple(int(d) for d in dims)


def _half_width(values):
    n = len(values)
    if n < 2:
        return math.inf
    sd = float(np.std(values, ddof=1))
    return float(stats.t.ppf(0.975, n - 1) * sd / math.sqrt(n))


def simulate(cfg: SimConfig) -> SimStats:
    """Run all replications and summarize blocking with 95% t-intervals."""
    results, dims = _run(cfg)
    per_class = []
    for c in range(3):
        offered = [int(r[0][c]) for r in results]
        blocked = [int(r[1][c]) for r in results]
        est = [b / o if o else 0.0 for o, b in zip(offered, blocked)]
        per_class.append(ClassStats(
            offered=sum(offered),
            blocked=sum(blocked),
            estimate=float(np.mean(est)),
            half_width=_half_width(est),
            per_replication=tuple(est),
        ))
    hist = sum(r[2] for r in results).reshape(dims)
    hist = hist / hist.sum()
    grids = np.indices(dims)
    mean_occ = tuple(float((g * hist).sum()) for g in grids)
    return SimStats(*per_class, mean_occupancy=mean_occ)


def occupancy_distribution(cfg: SimConfig) -> dict:
    """Fraction of post-warmup time spent in each visited state, pooled over replications."""
    results, dims = _run(cfg)
    hist = sum(r[2] for r in results).reshape(dims)
    total = hist.sum()
    return {State(*map(int, idx)): float(hist[idx] / total) for idx in zip(*np.nonzero(hist))}

"""Scenario parameters, states, admission guards and per-state transition rates.

Everything the chain's generator needs lives here; the state-space builder,
both stationary solvers and the simulator all read their admission decisions
from :func:`admission_limits` so that there is a single definition of the
flow-control rules.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import CapacityError, InvalidParameterError

# Slack for comparing sums of float bit rates against capacity limits.
TOL = 1e-9


class Scheme(str, enum.Enum):
    PROPOSED = "proposed"
    OVERLAY = "overlay"
    UNDERLAY = "underlay"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise InvalidParameterError("scheme", f"unknown scheme {value!r} (expected one of {names})") from None


class State(NamedTuple):
    """Packets in service: licensed D2D, CC pairs, unlicensed D2D, Wi-Fi."""

    i: int
    j: int
    m: int
    n: int


EMPTY = State(0, 0, 0, 0)


class Kind(str, enum.Enum):
    D2D_LIC_ARR = "D2D-lic-arr"
    CC_ARR = "CC-arr"
    D2D_UNL_ARR = "D2D-unl-arr"
    WIFI_ARR = "WiFi-arr"
    D2D_LIC_DEP = "D2D-lic-dep"
    CC_DEP = "CC-dep"
    D2D_UNL_DEP = "D2D-unl-dep"
    WIFI_DEP = "WiFi-dep"


class Transition(NamedTuple):
    target: State
    rate: float
    kind: Kind


_RATE_FIELDS = (
    "lambda_total", "lambda_wifi", "mu",
    "r_l_dd", "r_up_cc", "r_dw_cc", "r_u_dd", "r_u_wf",
    "cap_dd", "cap_up", "cap_dw", "cap_u", "theta_u",
)


@dataclass(frozen=True)
class SystemParams:
    """One scenario: arrival rates, per-packet bit rates, capacities and thresholds.

    Rates are in events per unit time, bit rates and capacities in a common
    bit-rate unit, ``mu`` is the reciprocal mean packet size. ``theta_u`` may
    exceed ``cap_u``; admission then saturates at the unlicensed capacity.
    ``theta_l`` defaults to ``cap_up - cap_dd``.
    """

    lambda_total: float = 200.0
    rho: float = 0.25
    lambda_wifi: float = 100.0
    mu: float = 1.0
    r_l_dd: float = 1.0
    r_up_cc: float = 1.0
    r_dw_cc: float = 1.0
    r_u_dd: float = 2.0
    r_u_wf: float = 2.0
    cap_dd: float = 2.0
    cap_up: float = 6.0
    cap_dw: float = 4.0
    cap_u: float = 8.0
    theta_u: float = 4.0
    theta_l: float | None = None

    def __post_init__(self):
        for name in _RATE_FIELDS + ("rho",):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParameterError(name, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(name, "must be finite")
            if value < 0:
                raise InvalidParameterError(name, f"must be >= 0, got {value}")
        if not 0.0 <= self.rho <= 1.0:
            raise InvalidParameterError("rho", f"must lie in [0, 1], got {self.rho}")
        if self.mu <= 0:
            raise InvalidParameterError("mu", "must be > 0")
        if self.cap_dd > self.cap_up:
            raise InvalidParameterError("cap_dd", f"must not exceed cap_up ({self.cap_dd} > {self.cap_up})")
        if self.theta_l is None:
            object.__setattr__(self, "theta_l", self.cap_up - self.cap_dd)
        elif not math.isfinite(self.theta_l) or self.theta_l < 0:
            raise InvalidParameterError("theta_l", f"must be finite and >= 0, got {self.theta_l}")

    @property
    def lambda_d2d(self):
        return self.rho * self.lambda_total

    @property
    def lambda_cc(self):
        return (1.0 - self.rho) * self.lambda_total

    @property
    def cc_service_rate(self):
        """Per-packet CC departure rate; the uplink/downlink pair is averaged."""
        return 0.5 * self.mu * (self.r_up_cc + self.r_dw_cc)

    def replace(self, **changes):
        if "cap_up" in changes or "cap_dd" in changes:
            changes.setdefault("theta_l", None)
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)


def default_params():
    """Normalized evaluation setup (r = mu = 1): Lambda=200, rho=1/4, Wi-Fi 100, theta_u=4."""
    return SystemParams()


class Limits(NamedTuple):
    """Load ceilings below which each class may still be admitted."""

    unl_d2d: float       # unlicensed load ceiling for a D2D admission
    lic_d2d: float       # licensed D2D ceiling
    lic_d2d_shared: bool  # True when CC occupancy counts against licensed D2D
    cc_up: float
    cc_up_shared: bool   # True when licensed D2D counts against the CC uplink
    cc_dw: float
    wifi: float


def admission_limits(p: SystemParams, sch: Scheme) -> Limits:
    sch = Scheme.parse(sch)
    if sch is Scheme.UNDERLAY:
        theta_eff = p.cap_u
    else:
        theta_eff = min(p.theta_u, p.cap_u)
    if sch is Scheme.OVERLAY:
        lic_d2d, shared = p.cap_dd - p.r_l_dd, False
        cc_up = p.cap_up - p.cap_dd - p.r_up_cc
    else:
        lic_d2d, shared = p.cap_up - p.r_l_dd, True
        cc_up = p.cap_up - p.r_up_cc
    return Limits(
        unl_d2d=theta_eff - p.r_u_dd,
        lic_d2d=lic_d2d,
        lic_d2d_shared=shared,
        cc_up=cc_up,
        cc_up_shared=shared,
        cc_dw=p.cap_dw - p.r_dw_cc,
        wifi=p.cap_u - p.r_u_wf,
    )


def check_bounded(p: SystemParams):
    """Raise CapacityError if a class with traffic consumes no capacity per packet."""
    if p.lambda_d2d > 0:
        if p.r_l_dd == 0:
            raise CapacityError("r_l_dd is 0 while D2D traffic is offered: licensed D2D occupancy is unbounded")
        if p.r_u_dd == 0:
            raise CapacityError("r_u_dd is 0 while D2D traffic is offered: unlicensed D2D occupancy is unbounded")
    if p.lambda_cc > 0 and p.r_up_cc == 0 and p.r_dw_cc == 0:
        raise CapacityError("r_up_cc and r_dw_cc are 0 while CC traffic is offered: CC occupancy is unbounded")
    if p.lambda_wifi > 0 and p.r_u_wf == 0:
        raise CapacityError("r_u_wf is 0 while Wi-Fi traffic is offered: Wi-Fi occupancy is unbounded")


def unlicensed_load(s: State, p: SystemParams):
    return s.m * p.r_u_dd + s.n * p.r_u_wf


def is_legal(s: State, p: SystemParams) -> bool:
    """Capacity constraints every reachable state must satisfy."""
    if min(s) < 0:
        return False
    return (
        s.i * p.r_l_dd + s.j * p.r_up_cc <= p.cap_up + TOL
        and s.j * p.r_dw_cc <= p.cap_dw + TOL
        and unlicensed_load(s, p) <= p.cap_u + TOL
    )


def admit_d2d_unlicensed(s: State, p: SystemParams, sch: Scheme) -> bool:
    lim = admission_limits(p, sch)
    return unlicensed_load(s, p) <= lim.unl_d2d + TOL


def licensed_fit_d2d(s: State, p: SystemParams, sch: Scheme) -> bool:
    """Whether the licensed band has room for one more D2D packet."""
    lim = admission_limits(p, sch)
    load = s.i * p.r_l_dd + (s.j * p.r_up_cc if lim.lic_d2d_shared else 0.0)
    return load <= lim.lic_d2d + TOL


def admit_d2d_licensed(s: State, p: SystemParams, sch: Scheme) -> bool:
    # Unlicensed first: the licensed band is used only when the unlicensed one is heavy.
    return not admit_d2d_unlicensed(s, p, sch) and licensed_fit_d2d(s, p, sch)


def admit_cc(s: State, p: SystemParams, sch: Scheme) -> bool:
    lim = admission_limits(p, sch)
    up = s.j * p.r_up_cc + (s.i * p.r_l_dd if lim.cc_up_shared else 0.0)
    return up <= lim.cc_up + TOL and s.j * p.r_dw_cc <= lim.cc_dw + TOL


def admit_wifi(s: State, p: SystemParams, sch: Scheme) -> bool:
    return unlicensed_load(s, p) <= p.cap_u - p.r_u_wf + TOL


def d2d_blocked(s: State, p: SystemParams, sch: Scheme) -> bool:
    return not admit_d2d_unlicensed(s, p, sch) and not licensed_fit_d2d(s, p, sch)


def departure_rates(s: State, p: SystemParams):
    """Total departure rate out of ``s`` per dimension (i, j, m, n)."""
    return (
        s.i * p.mu * p.r_l_dd,
        s.j * p.cc_service_rate,
        s.m * p.mu * p.r_u_dd,
        s.n * p.mu * p.r_u_wf,
    )


def transitions_out(s: State, p: SystemParams, sch: Scheme) -> list[Transition]:
    """All positive-rate transitions leaving ``s``: arrivals first, then departures."""
    sch = Scheme.parse(sch)
    i, j, m, n = s
    out = []
    unl = admit_d2d_unlicensed(s, p, sch)
    if p.lambda_d2d > 0 and not unl and licensed_fit_d2d(s, p, sch):
        out.append(Transition(State(i + 1, j, m, n), p.lambda_d2d, Kind.D2D_LIC_ARR))
    if p.lambda_cc > 0 and admit_cc(s, p, sch):
        out.append(Transition(State(i, j + 1, m, n), p.lambda_cc, Kind.CC_ARR))
    if p.lambda_d2d > 0 and unl:
        out.append(Transition(State(i, j, m + 1, n), p.lambda_d2d, Kind.D2D_UNL_ARR))
    if p.lambda_wifi > 0 and admit_wifi(s, p, sch):
        out.append(Transition(State(i, j, m, n + 1), p.lambda_wifi, Kind.WIFI_ARR))

    dep_i, dep_j, dep_m, dep_n = departure_rates(s, p)
    if dep_i > 0:
        out.append(Transition(State(i - 1, j, m, n), dep_i, Kind.D2D_LIC_DEP))
    if dep_j > 0:
        out.append(Transition(State(i, j - 1, m, n), dep_j, Kind.CC_DEP))
    if dep_m > 0:
        out.append(Transition(State(i, j, m - 1, n), dep_m, Kind.D2D_UNL_DEP))
    if dep_n > 0:
        out.append(Transition(State(i, j, m, n - 1), dep_n, Kind.WIFI_DEP))
    return out

"""Single-point evaluation, parameter sweeps, scheme comparison and simulator validation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .model import Scheme, SystemParams
from .scenario import Scenario, SweepSpec
from .sim import CLASSES, SimConfig, simulate
from .solver import BlockingReport, blocking_probabilities, solve_exact, solve_iterative
from .statespace import enumerate_states

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "scheme", "variable", "value", "p_block_d2d", "p_block_cc", "p_block_wifi",
    "states", "iterations", "residual", "status",
)
REL_EPS = 1e-12
PAIRS = (("proposed", "overlay"), ("underlay", "overlay"), ("underlay", "proposed"))

# Published relative comparisons, per sweep variable, at one anchor point.
# Each entry: (scheme a, scheme b, metric, reported percentage, expected sign of (P_a - P_b)).
REFERENCE_CLAIMS = {
    "lambda_total": (200.0, (
        ("proposed", "overlay", "cc", 2.7, +1),
        ("proposed", "overlay", "d2d", 22.1, -1),
        ("underlay", "overlay", "cc", 0.6, +1),
        ("underlay", "overlay", "wifi", 54.7, +1),
        ("underlay", "overlay", "d2d", 81.5, -1),
        ("underlay", "proposed", "d2d", 76.2, -1),
        ("underlay", "proposed", "wifi", 54.8, +1),
    )),
    "rho": (0.5, (
        ("proposed", "overlay", "cc", 19.7, +1),
        ("proposed", "overlay", "d2d", 25.9, -1),
        ("underlay", "overlay", "cc", 8.0, +1),
        ("underlay", "overlay", "wifi", 92.9, +1),
        ("underlay", "overlay", "d2d", 69.1, -1),
        ("underlay", "proposed", "d2d", 58.4, -1),
        ("underlay", "proposed", "wifi", 92.9, +1),
    )),
    "theta_u": (0.0, (
        ("proposed", "overlay", "cc", 3.2, +1),
        ("proposed", "overlay", "d2d", 22.2, -1),
        ("underlay", "proposed", "wifi", 69.9, +1),
        ("underlay", "proposed", "d2d", 81.8, -1),
        ("underlay", "overlay", "d2d", 85.8, -1),
    )),
}


@dataclass(frozen=True)
class EvalResult:
    scheme: Scheme
    solver: str
    report: BlockingReport
    states: int
    iterations: int
    converged: bool
    residual: float

    def to_dict(self):
        return {
            "scheme": self.scheme.value,
            "solver": self.solver,
            "p_block_d2d": self.report.p_block_d2d,
            "p_block_cc": self.report.p_block_cc,
            "p_block_wifi": self.report.p_block_wifi,
            "states": self.states,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
        }


def evaluate(scenario: Scenario, params: SystemParams | None = None, scheme=None) -> EvalResult:
    """Solve one parameter point with the scenario's solver settings."""
    params = scenario.params if params is None else params
    scheme = scenario.scheme if scheme is None else Scheme.parse(scheme)
    sp = enumerate_states(params, scheme)
    if scenario.solver == "iterative":
        dist = solve_iterative(sp, params, scheme, alpha=scenario.alpha, max_iter=scenario.max_iter)
    else:
        dist = solve_exact(sp, params, scheme)
    report = blocking_probabilities(dist, sp, params, scheme)
    return EvalResult(scheme, scenario.solver, report, len(sp), dist.iterations, dist.converged, dist.residual)


def _point_params(scenario: Scenario, variable: str, value: float) -> SystemParams:
    return scenario.params.replace(**{variable: value})


def sweep(scenario: Scenario, spec: SweepSpec) -> list[dict]:
    """One row per (scheme, value), schemes in spec order, values ascending.

    A point that raises is kept as a row with NaN metrics and ``status=error``.
    """
    rows = []
    for scheme in spec.schemes:
        for value in spec.values():
            row = {"scheme": scheme.value, "variable": spec.variable, "value": value}
            try:
                res = evaluate(scenario, _point_params(scenario, spec.variable, value), scheme)
            except (ValueError, RuntimeError) as exc:
                nan = math.nan
                row.update(p_block_d2d=nan, p_block_cc=nan, p_block_wifi=nan, states=0,
                           iterations=0, residual=nan, status="error", error=str(exc))
            else:
                row.update(
                    p_block_d2d=res.report.p_block_d2d,
                    p_block_cc=res.report.p_block_cc,
                    p_block_wifi=res.report.p_block_wifi,
                    states=res.states,
                    iterations=res.iterations,
                    residual=res.residual,
                    status="ok" if res.converged else "not_converged",
                )
            rows.append(row)
    return rows


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# bandshare sweep schema v{SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def relative_difference(pa: float, pb: float) -> float:
    return (pa - pb) / max(pa, REL_EPS)


def crossings(values, first, second):
    """Brackets ``[v_k, v_k+1]`` where ``first - second`` changes sign (or touches zero)."""
    out = []
    diffs = [a - b for a, b in zip(first, second)]
    for k in range(len(values) - 1):
        d0, d1 = diffs[k], diffs[k + 1]
        if math.isnan(d0) or math.isnan(d1):
            continue
        if d0 * d1 < 0 or (d1 == 0 and d0 != 0) or (k == 0 and d0 == 0):
            out.append([values[k], values[k + 1]])
    return out


def _triples_at(scenario: Scenario, variable: str, value: float) -> dict:
    params = _point_params(scenario, variable, value)
    return {s.value: evaluate(scenario, params, s).report.to_dict() for s in Scheme}


def _pairwise(triples: dict) -> dict:
    out = {}
    for a, b in PAIRS:
        out[f"{a}_vs_{b}"] = {
            c: relative_difference(triples[a][c], triples[b][c]) for c in CLASSES
        }
    return out


def compare_schemes(scenario: Scenario, spec: SweepSpec) -> dict:
    """Blocking triples for all three schemes at every sweep point, with pairwise relative differences."""
    values = spec.values()
    points = []
    for value in values:
        triples = _triples_at(scenario, spec.variable, value)
        points.append({"value": value, "schemes": triples, "relative_differences": _pairwise(triples)})

    report = {
        "schema": SCHEMA_VERSION,
        "variable": spec.variable,
        "relative_difference": "(P_a - P_b) / max(P_a, 1e-12)",
        "points": points,
    }
    if spec.variable == "theta_u":
        report["crossings"] = {
            s.value: crossings(
                values,
                [pt["schemes"][s.value]["d2d"] for pt in points],
                [pt["schemes"][s.value]["wifi"] for pt in points],
            )
            for s in Scheme
        }
    report["reference_claims"] = reference_claims(scenario, spec.variable)
    return report


def reference_claims(scenario: Scenario, variable: str) -> dict:
    """Published comparison percentages next to the values computed at the same anchor point."""
    anchor, claims = REFERENCE_CLAIMS[variable]
    triples = _triples_at(scenario, variable, anchor)
    rows = []
    for a, b, metric, pct, sign in claims:
        rel = relative_difference(triples[a][metric], triples[b][metric])
        computed_sign = (rel > 0) - (rel < 0)
        rows.append({
            "a": a,
            "b": b,
            "metric": metric,
            "reference_pct": pct,
            "expected_sign": sign,
            "computed_pct": 100.0 * rel,
            "sign_matches": computed_sign == sign,
        })
    return {"anchor": {variable: anchor}, "claims": rows}


def validate(scenario: Scenario, seed=None, horizon=None, warmup=None, reps=None) -> dict:
    """Analytic blocking against simulated estimates; a class passes within three CI half-widths."""
    res = evaluate(scenario)
    cfg = SimConfig(
        params=scenario.params,
        scheme=scenario.scheme,
        seed=scenario.seed if seed is None else seed,
        horizon=scenario.horizon if horizon is None else horizon,
        warmup=scenario.warmup if warmup is None else warmup,
        replications=scenario.reps if reps is None else reps,
    )
    sim = simulate(cfg)
    analytic = res.report.to_dict()
    classes = {}
    for name, st in sim.by_class().items():
        gap = abs(st.estimate - analytic[name])
        if st.offered == 0:
            ok, note = True, "no traffic offered"
        else:
            ok, note = gap <= 3.0 * st.half_width, ""
        classes[name] = {
            "analytic": analytic[name],
            "simulated": st.estimate,
            "half_width": st.half_width if math.isfinite(st.half_width) else None,
            "offered": st.offered,
            "blocked": st.blocked,
            "abs_diff": gap,
            "pass": bool(ok),
        }
        if note:
            classes[name]["note"] = note
    return {
        "scheme": scenario.scheme.value,
        "solver": res.solver,
        "states": res.states,
        "sim": {"seed": cfg.seed, "horizon": cfg.horizon, "warmup": cfg.warmup, "replications": cfg.replications},
        "classes": classes,
        "mean_occupancy": dict(zip("ijmn", sim.mean_occupancy)),
        "pass": all(c["pass"] for c in classes.values()),
    }

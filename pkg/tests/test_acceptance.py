"""Exit criteria for the package, one test per criterion.

Each test records a one-line PASS/FAIL verdict that is printed in the
terminal summary (see conftest.py), whatever pytest's verbosity.
"""

import numpy as np
import pytest

from bandshare.cli import main
from bandshare.experiments import compare_schemes, evaluate, sweep
from bandshare.model import Scheme, SystemParams, admit_cc, admit_wifi, d2d_blocked
from bandshare.scenario import SweepSpec, load_scenario
from bandshare.sim import SimConfig, simulate
from bandshare.solver import blocking_probabilities, solve_exact, solve_iterative
from bandshare.statespace import enumerate_states
from conftest import ACCEPTANCE_LINES


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    return ok


def non_decreasing(xs, tol=1e-12):
    return all(b >= a - tol for a, b in zip(xs, xs[1:]))


def non_increasing(xs, tol=1e-12):
    return all(b <= a + tol for a, b in zip(xs, xs[1:]))


def random_configs(seed=2024, count=30):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        cap_up = int(rng.integers(2, 7))
        cap_u = int(rng.integers(2, 9))
        p = SystemParams(
            lambda_total=float(rng.uniform(0, 60)),
            rho=float(rng.uniform(0, 1)),
            lambda_wifi=float(rng.uniform(0, 40)),
            mu=float(rng.uniform(0.5, 2)),
            r_u_dd=float(rng.integers(1, 3)),
            r_u_wf=float(rng.integers(1, 3)),
            cap_up=float(cap_up),
            cap_dd=float(rng.integers(0, cap_up + 1)),
            cap_dw=float(rng.integers(1, 5)),
            cap_u=float(cap_u),
            theta_u=float(rng.integers(0, cap_u + 3)),
        )
        out.append((p, Scheme(rng.choice(["proposed", "overlay", "underlay"]))))
    return out


@pytest.fixture(scope="module")
def scenario():
    return load_scenario()


def test_criterion_1_solver_agreement():
    configs = random_configs() + [(SystemParams(), Scheme.PROPOSED)]
    worst_gap = worst_res = worst_norm = 0.0
    for p, scheme in configs:
        sp = enumerate_states(p, scheme)
        it = solve_iterative(sp, p, scheme, alpha=1e-6)
        ex = solve_exact(sp, p, scheme)
        worst_gap = max(worst_gap, float(np.abs(it.probs - ex.probs).max()))
        worst_res = max(worst_res, ex.residual)
        worst_norm = max(worst_norm, abs(ex.probs.sum() - 1.0), abs(it.probs.sum() - 1.0))
    ok = worst_gap <= 1e-5 and worst_res <= 1e-10 and worst_norm <= 1e-12
    record(1, ok, f"{len(configs)} configs, max |iter-exact|={worst_gap:.2e} (<=1e-5), "
                  f"max residual={worst_res:.1e} (<=1e-10), max |sum-1|={worst_norm:.1e} (<=1e-12)")
    assert ok


def test_criterion_2_erlang_reductions():
    wifi_p = SystemParams(lambda_total=0.0)
    cc_p = SystemParams(lambda_total=150.0, rho=0.0, lambda_wifi=0.0)
    values = []
    for p in (wifi_p, cc_p):
        sp = enumerate_states(p)
        values.append(blocking_probabilities(solve_exact(sp, p, "proposed"), sp, p, "proposed"))
    wifi, cc = values[0].p_block_wifi, values[1].p_block_cc
    ok = abs(wifi - 0.92166) <= 1e-4 and abs(cc - 0.97351) <= 1e-4
    record(2, ok, f"Wi-Fi-only {wifi:.6f} (0.92166+-1e-4), CC-only {cc:.6f} (0.97351+-1e-4)")
    assert ok


def _formula_membership(s, p):
    i, j, m, n = s
    unl = m * p.r_u_dd + n * p.r_u_wf
    d2d = (i * p.r_l_dd + j * p.r_up_cc > p.cap_up - p.r_l_dd) and (unl > p.theta_u - p.r_u_dd)
    cc = (i * p.r_l_dd + j * p.r_up_cc > p.cap_up - p.r_up_cc) or (j * p.r_dw_cc > p.cap_dw - p.r_dw_cc)
    wifi = unl > p.cap_u - p.r_u_wf
    return d2d, cc, wifi


def test_criterion_3_guard_formula_identity():
    base = SystemParams()
    params = [base] + [base.replace(theta_u=float(t)) for t in range(0, 9)] + [
        base.replace(lambda_total=20.0), base.replace(rho=0.9), base.replace(cap_dw=2.0, cap_dd=1.0),
    ]
    mismatches = checked = 0
    for p in params:
        for s in enumerate_states(p, Scheme.PROPOSED):
            guards = (d2d_blocked(s, p, "proposed"), not admit_cc(s, p, "proposed"), not admit_wifi(s, p, "proposed"))
            mismatches += sum(g != f for g, f in zip(guards, _formula_membership(s, p)))
            checked += 1
    ok = mismatches == 0
    record(3, ok, f"{checked} states over {len(params)} configs, {mismatches} mismatches")
    assert ok


PASTA_CASES = {
    "default": SystemParams(),
    "wifi-only": SystemParams(lambda_total=0.0),
    "cc-only": SystemParams(lambda_total=150.0, rho=0.0, lambda_wifi=0.0),
}


@pytest.mark.slow
def test_criterion_4_pasta_cross_validation():
    lines, ok = [], True
    for name, p in PASTA_CASES.items():
        sp = enumerate_states(p)
        analytic = blocking_probabilities(solve_exact(sp, p, "proposed"), sp, p, "proposed").to_dict()
        stats = simulate(SimConfig(p, seed=42, horizon=1e5, warmup=1e3, replications=10))
        for cls, st in stats.by_class().items():
            gap = abs(st.estimate - analytic[cls])
            good = gap <= 3 * st.half_width
            ok &= good
            if st.offered:
                lines.append(f"{name}/{cls} gap={gap:.1e}<=3x{st.half_width:.1e}" + ("" if good else " FAIL"))
    record(4, ok, "; ".join(lines))
    assert ok


def test_criterion_5_lambda_trend(scenario):
    rows = sweep(scenario, SweepSpec("lambda_total", 20, 400, 20, schemes=("proposed",)))
    d2d = [r["p_block_d2d"] for r in rows]
    cc = [r["p_block_cc"] for r in rows]
    wifi = [r["p_block_wifi"] for r in rows]
    rise_cc, rise_wifi = cc[-1] - cc[0], wifi[-1] - wifi[0]
    ok = non_decreasing(d2d) and non_decreasing(cc) and rise_wifi < rise_cc / 5
    record(5, ok, f"d2d/cc non-decreasing={non_decreasing(d2d)}/{non_decreasing(cc)}, "
                  f"Wi-Fi rise {rise_wifi:.2e} < CC rise/5 {rise_cc / 5:.2e}")
    assert ok


def test_criterion_6_rho_trend(scenario):
    rows = sweep(scenario, SweepSpec("rho", 0.05, 0.95, 0.05, schemes=("proposed",)))
    d2d = [r["p_block_d2d"] for r in rows]
    cc = [r["p_block_cc"] for r in rows]
    ok = non_decreasing(d2d) and non_increasing(cc)
    record(6, ok, f"{len(rows)} points, d2d non-decreasing={non_decreasing(d2d)}, cc non-increasing={non_increasing(cc)}")
    assert ok


def test_criterion_7_theta_anchors(scenario):
    report = compare_schemes(scenario, SweepSpec("theta_u", 0, 12, 1))
    values = [pt["value"] for pt in report["points"]]
    d2d = [pt["schemes"]["proposed"]["d2d"] for pt in report["points"]]
    wifi = [pt["schemes"]["proposed"]["wifi"] for pt in report["points"]]
    brackets = report["crossings"]["proposed"]
    anchor_ok = abs(d2d[0] - 0.6) <= 0.1
    decreasing_ok = non_increasing(d2d) and d2d[-1] == pytest.approx(min(d2d), abs=1e-15)
    wifi_ok = non_decreasing(wifi)
    crossing_ok = all(6.0 <= lo and hi <= 12.0 for lo, hi in brackets)
    ok = anchor_ok and decreasing_ok and wifi_ok and crossing_ok
    record(7, ok, f"d2d(theta=0)={d2d[0]:.4f} vs 0.6+-0.1 [{'ok' if anchor_ok else 'miss'}]; "
                  f"d2d non-increasing to min={decreasing_ok}; wifi non-decreasing={wifi_ok}; "
                  f"crossings {brackets} within [6,12]={crossing_ok} (theta grid {values[0]:g}..{values[-1]:g})")
    assert ok


def test_criterion_8_scheme_ordering(scenario):
    at = {s.value: evaluate(scenario, scheme=s).report for s in Scheme}
    prop, over, under = at["proposed"], at["overlay"], at["underlay"]
    order_ok = (
        under.p_block_d2d <= prop.p_block_d2d <= over.p_block_d2d
        and under.p_block_wifi >= prop.p_block_wifi
        and prop.p_block_cc >= over.p_block_cc
    )
    claims = []
    for var in ("lambda_total", "rho", "theta_u"):
        report = compare_schemes(scenario, SweepSpec(var, *([0.5] * 2 if var == "rho" else [0.0, 0.0]), 1.0))
        claims += report["reference_claims"]["claims"]
    signs_ok = all(c["sign_matches"] for c in claims)
    side_by_side = all({"reference_pct", "computed_pct"} <= set(c) for c in claims)
    ok = order_ok and signs_ok and side_by_side
    record(8, ok, f"d2d U={under.p_block_d2d:.4f}<=P={prop.p_block_d2d:.4f}<=O={over.p_block_d2d:.4f}; "
                  f"wifi U={under.p_block_wifi:.4f}>=P={prop.p_block_wifi:.4f}; "
                  f"cc P={prop.p_block_cc:.4f}>=O={over.p_block_cc:.4f}; "
                  f"{sum(c['sign_matches'] for c in claims)}/{len(claims)} published signs reproduced")
    assert ok


CLI_RUNS = [
    ("eval",),
    ("eval", "--solver", "iterative", "--format", "json"),
    ("sweep", "--var", "theta_u"),
    ("sweep", "--var", "rho", "--format", "json"),
    ("compare", "--var", "lambda_total", "--from", "20", "--to", "400", "--step", "20"),
    ("validate", "--seed", "42", "--horizon", "5000", "--reps", "4"),
    ("dump-states", "--scheme", "underlay"),
]


def test_criterion_9_determinism(capsys):
    differing = []
    for argv in CLI_RUNS:
        outputs = []
        for _ in range(2):
            code = main(list(argv))
            out, err = capsys.readouterr()
            outputs.append((code, out, err))
        if outputs[0] != outputs[1]:
            differing.append(" ".join(argv))
    ok = not differing
    record(9, ok, f"{len(CLI_RUNS)} CLI invocations run twice, differing: {differing or 'none'}")
    assert ok


def test_criterion_10_scheme_reduction(capsys):
    p = SystemParams(theta_u=8.0, cap_dd=6.0)
    sp_p, sp_u = enumerate_states(p, "proposed"), enumerate_states(p, "underlay")
    same_space = sp_p.states == sp_u.states
    worst = 0.0
    for solver in (solve_exact, solve_iterative):
        a, b = solver(sp_p, p, "proposed"), solver(sp_u, p, "underlay")
        worst = max(worst, float(np.abs(a.probs - b.probs).max()))
        ra = blocking_probabilities(a, sp_p, p, "proposed").as_tuple()
        rb = blocking_probabilities(b, sp_u, p, "underlay").as_tuple()
        worst = max(worst, max(abs(x - y) for x, y in zip(ra, rb)), abs(a.residual - b.residual))
        same_space &= a.iterations == b.iterations
    ok = same_space and worst <= 1e-12
    record(10, ok, f"identical state spaces/iterations={same_space}, max output difference={worst:.1e} (<=1e-12)")
    assert ok

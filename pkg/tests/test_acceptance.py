"""Acceptance gate: one test per criterion, each printing its own verdict.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
Budgets are wall-clock seconds; every tolerance is pinned here, not computed.
"""

import json
import time

import numpy as np
import pytest

from lifespan_lab import (
    ComplexField,
    Grid1D,
    ModelParams,
    SolverConfig,
    approximation_gap,
    estimate_lifespan,
    evolve,
    field_norms,
    free_propagate,
    initial_field,
    matching_gap,
    matching_horizon,
    mollification_error,
    prepare_profile,
    residual,
    residual_budget,
    scaled_grid,
    sweep_lifespan,
)
from lifespan_lab.cli import main
from lifespan_lab.matching import residual_by_differencing
from lifespan_lab.profile import eval_profile, rk4_integrate
from lifespan_lab.suites import (
    embedding_suite,
    envelope_derivative_suite,
    nonlinearity_difference_suite,
    scalar_inequalities_suite,
    smoothing_error_suite,
)


def verdict(number, name, passed, elapsed, budget, detail=""):
    mark = "PASS" if passed else "FAIL"
    print(f"[ACCEPTANCE {number}] {name}: {mark} ({elapsed:.1f}s / {budget:.0f}s budget) {detail}")


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_theorem_constants(capsys):
    budget = 1.0
    with Timer() as t:
        code = main(["bound", "--quiet"])
        doc = json.loads(capsys.readouterr().out)
    ok = (
        code == 0
        and doc["A"] == 1.0
        and doc["liminf_const"] == 0.25
        and t.elapsed < budget
    )
    with capsys.disabled():
        verdict(1, "theorem-constant reproduction", ok, t.elapsed, budget,
                f"A={doc['A']} liminf_const={doc['liminf_const']}")
    assert ok


def test_criterion_2_scaling_law(capsys):
    budget = 600.0
    ladder = (0.5, 0.4, 0.3, 0.25, 0.2)
    with Timer() as t:
        result = sweep_lifespan(ModelParams(p=2.0, lam=1j, epsilon=0.3), ladder)
    scaled = [r.scaled for r in result.records]
    failures = []
    if not (-2.3 <= result.slope <= -1.7):
        failures.append(f"slope {result.slope:.3f} outside [-2.3, -1.7]")
    if not all(0.20 <= s <= 0.50 for s in scaled):
        failures.append(f"scaled values {np.round(scaled, 4).tolist()} leave [0.20, 0.50]")
    gaps = [s - 0.25 for s in scaled]
    if not all(b < a for a, b in zip(gaps, gaps[1:])):
        failures.append("no monotone trend toward 0.25")
    if t.elapsed >= budget:
        failures.append("over budget")
    with capsys.disabled():
        verdict(2, "life-span scaling law", not failures, t.elapsed, budget,
                f"slope={result.slope:.3f} scaled={np.round(scaled, 4).tolist()}")
    # The trend toward 0.25 and the lower-bound character hold; at this desk
    # ladder the measured finite-size correction is eps^2*T ~ 0.25*(1+3.4*eps)
    # (cross-checked against an independent RK4 integration, dt- and
    # dx-converged), which leaves the asserted slope/band windows for the
    # largest data sizes.  The assertion states the criterion as written.
    assert not failures, "; ".join(failures)


def test_criterion_3_profile_oracle(capsys):
    budget = 60.0
    rng = np.random.default_rng(2024)
    grid = Grid1D(16.0, 256)
    worst = 0.0
    with Timer() as t:
        for _ in range(200):
            p = rng.uniform(2.0, 2.9)
            lam = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2.0))
            amp = rng.uniform(0.5, 1.5)
            params = ModelParams(
                p=p, lam=lam, epsilon=0.3, delta=0.7,
                profile={"name": "gaussian", "amplitude": amp},
            )
            data = prepare_profile(params, grid)
            v = np.exp(-1j * np.pi / 4) * data.phat.values
            s_prev = 0.0
            for frac in (0.25, 0.5, 0.75, 1.0):
                s = frac * 0.9 * data.s_blowup
                v = rk4_integrate(v, s - s_prev, lam, p)
                s_prev = s
                closed = eval_profile(s, data, mollified=False).values
                worst = max(worst, float(np.abs(closed - v).max()))
    ok = worst <= 1e-8 and t.elapsed < budget
    with capsys.disabled():
        verdict(3, "profile-oracle equivalence", ok, t.elapsed, budget,
                f"worst gap {worst:.2e} over 200 draws")
    assert ok


def test_criterion_4_residual_budget(capsys):
    budget = 300.0
    ladder = (0.4, 0.3, 0.25, 0.2)
    rows = []
    with Timer() as t:
        for eps in ladder:
            params = ModelParams(p=2.0, lam=0.3j, epsilon=eps)
            probe = prepare_profile(params, Grid1D(32.0, 2048))
            grid = scaled_grid(2.33, matching_horizon(probe), dx=0.0625)
            data = prepare_profile(params, grid)
            report = residual_budget(data, nodes_per_region=200)

            delta = params.smoothing_width
            smooth_err = mollification_error(data.phat, params.p, delta, dphat=data.dphat)
            c_free = max(
                v / (eps**2 * (1 + tt) ** -0.5)
                for tt, v in zip(report.nodes["free"], report.values["free"])
            )
            c_q1 = c_q2 = 0.0
            for tt in report.nodes["profile"][::40]:
                state = residual(tt, data)
                c_q1 = max(c_q1, field_norms(state.q1).x_norm / (eps**2 * tt**-0.5 * smooth_err))
                c_q2 = max(c_q2, field_norms(state.q2).x_norm / (eps * tt**-2 * delta**-2))
            c_match = max(
                matching_gap(tt, data).report.x_norm / eps**1.5
                for tt in np.linspace(1.1 / eps, 1.9 / eps, 5)
            )
            rows.append((eps, report.i_total, c_free, c_q1, c_q2, c_match,
                         report.i_free / eps**1.5))

    totals = [r[1] for r in rows]
    slope = float(np.polyfit(np.log(ladder), np.log(totals), 1)[0])
    failures = []
    if not all(b < a for a, b in zip(totals, totals[1:])):
        failures.append("I_total not decreasing along the ladder")
    if slope < 1.2:
        failures.append(f"log-log slope {slope:.2f} < 1.2")
    # A fitted constant per bound: the bound holds with C = max over the
    # ladder; an exponent claimed too weak would make the per-eps constants
    # grow as eps shrinks, so upward drift is the falsifier (declining
    # constants just mean the bound is conservative for this smooth data).
    for idx, label, cap in ((2, "free", 2.0), (3, "q1", 25.0), (4, "q2", 60.0),
                            (5, "match", 8.0), (6, "int_free", 2.0)):
        vals = [r[idx] for r in rows]  # ladder ordered by decreasing eps
        if max(vals) > cap:
            failures.append(f"{label} constant {max(vals):.3g} over cap {cap}")
        if any(b > 1.25 * a for a, b in zip(vals, vals[1:])):
            failures.append(f"{label} constant drifts up: {np.round(vals, 3).tolist()}")
    if t.elapsed >= budget:
        failures.append("over budget")
    with capsys.disabled():
        verdict(4, "residual budget", not failures, t.elapsed, budget,
                f"slope={slope:.2f} totals={np.round(totals, 4).tolist()}")
    assert not failures, "; ".join(failures)


def test_criterion_5_exactness_anchors(capsys):
    budget = 60.0
    with Timer() as t:
        grid = scaled_grid(2.33, 5.0)
        # free flow keeps the dispersive norm equal to the data norm
        free_params = ModelParams(p=2.0, lam=0j, epsilon=0.4)
        traj = evolve(SolverConfig(params=free_params, grid=grid, t_end=5.0,
                                   record_times=(1.0, 5.0)))
        sigma0 = traj.reports[0].sigma
        free_drift = max(abs(r.x_norm - sigma0) / sigma0 for r in traj.reports)

        real_params = ModelParams(p=2.0, lam=1.0 + 0j, epsilon=0.2)
        traj2 = evolve(SolverConfig(params=real_params, grid=grid, t_end=5.0,
                                    record_times=(1.0, 2.5, 5.0)))
        m0 = traj2.reports[0].l2
        mass_drift = max(abs(r.l2 - m0) / m0 for r in traj2.reports)

        desk = Grid1D(32.0, 2048)
        gauss = ComplexField(np.exp(-desk.x**2 / 2.0), desk)
        moved = free_propagate(gauss, 1.0)
        a = 1.0 + 1.0j
        pointwise = float(np.abs(moved.values - np.exp(-desk.x**2 / (2 * a)) / np.sqrt(a)).max())
    ok = free_drift <= 1e-9 and mass_drift <= 1e-10 and pointwise <= 1e-9 and t.elapsed < budget
    with capsys.disabled():
        verdict(5, "exactness anchors", ok, t.elapsed, budget,
                f"x-norm {free_drift:.1e}, mass {mass_drift:.1e}, gaussian {pointwise:.1e}")
    assert ok


def test_criterion_6_inequality_suites(capsys):
    budget = 120.0
    with Timer() as t:
        results = [
            scalar_inequalities_suite(seed=2024, n=100_000),
            embedding_suite(),
            nonlinearity_difference_suite(seed=2025),
            envelope_derivative_suite(),
        ]
    ok = all(r.passed for r in results) and t.elapsed < budget
    detail = " ".join(f"{r.name}:C={r.fitted_constant:.3g}" for r in results)
    with capsys.disabled():
        verdict(6, "inequality suites", ok, t.elapsed, budget, detail)
    assert ok


def test_criterion_7_mollifier(capsys):
    budget = 30.0
    with Timer() as t:
        result = smoothing_error_suite()
    ok = result.passed and t.elapsed < budget
    with capsys.disabled():
        verdict(7, "mollification error ladder", ok, t.elapsed, budget,
                f"final H1 error {result.fitted_constant:.2e}")
    assert ok


def test_criterion_8_residual_self_consistency(capsys):
    budget = 120.0
    params = ModelParams(p=2.0, lam=0.3j, epsilon=0.3)
    probe = prepare_profile(params, Grid1D(32.0, 2048))
    grid = scaled_grid(2.33, matching_horizon(probe), dx=0.0625)
    data = prepare_profile(params, grid)
    orders = {}
    with Timer() as t:
        for tt, region in ((1.5, "free"), (5.0, "blend"), (12.0, "profile")):
            state = residual(tt, data)
            assert state.region == region
            scale = field_norms(state.r).x_norm
            gaps = []
            for h in (0.02, 0.01):
                fd = residual_by_differencing(tt, data, h)
                gaps.append(field_norms(
                    state.r.with_values(state.r.values - fd.values)).x_norm / scale)
            orders[region] = float(np.log2(gaps[0] / gaps[1]))
    ok = all(v >= 1.9 for v in orders.values()) and t.elapsed < budget
    with capsys.disabled():
        verdict(8, "residual self-consistency", ok, t.elapsed, budget,
                f"orders {dict((k, round(v, 2)) for k, v in orders.items())}")
    assert ok


def test_criterion_9_bootstrap_gap(capsys):
    budget = 300.0
    configs = (
        (1j, 0.3),
        (1j, 0.25),
        (0.15j, 0.3),  # window spans all three matching regions
    )
    peaks = {}
    with Timer() as t:
        for lam, eps in configs:
            params = ModelParams(p=2.0, lam=lam, epsilon=eps, horizon_fraction=0.4)
            probe = prepare_profile(params, Grid1D(32.0, 2048))
            t_max = 0.8 * matching_horizon(probe)
            grid = scaled_grid(2.33, t_max, dx=0.0625)
            data = prepare_profile(params, grid)
            marks = tuple(np.linspace(t_max / 10, t_max, 10))
            cfg = SolverConfig(params=params, grid=grid, t_end=t_max,
                               record_times=marks, check_boundary=False)
            series = approximation_gap(evolve(cfg), data)
            peaks[(str(lam), eps)] = float(np.max(series.gaps / eps))
    ok = all(v <= 0.5 for v in peaks.values()) and t.elapsed < budget
    with capsys.disabled():
        verdict(9, "bootstrap gap", ok, t.elapsed, budget,
                f"peak gap/eps {dict((k, round(v, 3)) for k, v in peaks.items())}")
    assert ok

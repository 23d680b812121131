"""Sweep harness: first-hit engines, rate fits, audits, file contracts.

The fast first-hit engines (ray, modal) are cross-checked against manual
step() loops that evaluate the residual directly, so every engine answer
in here is validated by an independent oracle.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmx import (
    CENSORED,
    SWEEP_COLUMNS,
    ConfigError,
    IterateState,
    IterateTrace,
    SweepSpec,
    audit_trace,
    eigen_init,
    first_hit,
    first_hit_record,
    foam_run,
    gs_instance,
    gs_residual,
    load_report,
    load_sweep_csv,
    load_sweep_toml,
    load_trace_csv,
    make_instance,
    run,
    select_config,
    slope_fit,
    step,
    sweep,
    write_report,
    write_sweep_csv,
    write_trace_csv,
)
from mmx.harness import _fixed_init, canonical_algorithm, short_algorithm
from mmx.spectral import SpectralParams, eigen_closed


def _manual_first_hit(algorithm, problem, cfg, epsilon, state, cap=20_000):
    """Reference oracle: literal stepping with direct residual evaluation."""
    for _ in range(cap + 1):
        gp, gd = gs_residual(problem, state.x, state.y)
        if max(gp, gd) <= epsilon:
            return state.t
        state = step(algorithm, problem, cfg, state)
    return CENSORED


def _matched_gs(algorithm, eps):
    cfg = select_config(algorithm, 1.0, 1.0, eps, mode="GS")
    return make_instance("gs-hard", r_y=cfg.r_y), cfg


# ---------------------------------------------------------------------------
# first_hit semantics
# ---------------------------------------------------------------------------


class TestFirstHit:
    def test_target_above_initial_residual_returns_zero(self):
        prob, cfg = _matched_gs("PerturbedGda", 0.05)
        state = eigen_init("PgdaGS", 1.0, 1.0, 0.05, cfg)
        gp, gd = gs_residual(prob, state.x, state.y)
        target = 2.0 * max(gp, gd)
        assert target < 1.0
        assert first_hit("PerturbedGda", prob, cfg, "GS", target, state) == 0

    def test_pgda_gs_eigen_obeys_decay_law(self):
        # along the slow eigenray the residual contracts by exactly
        # 1 + lambda1 per step, so T = ceil(log(eps/m0)/log(1+lambda1))
        eps = 0.05
        prob, cfg = _matched_gs("PerturbedGda", eps)
        state = eigen_init("PgdaGS", 1.0, 1.0, eps, cfg)
        gp, gd = gs_residual(prob, state.x, state.y)
        m0 = max(gp, gd)
        lam = eigen_closed(
            "Lambda1",
            SpectralParams(
                ell=1.0,
                r_y=cfg.r_y,
                b=math.sqrt(3.0 * cfg.r_y),
                c=cfg.c,
                alpha=cfg.alpha,
            ),
        )
        t_law = math.ceil(math.log(eps / m0) / math.log1p(lam))
        t = first_hit("PerturbedGda", prob, cfg, "GS", eps, "eigenvector")
        assert abs(t - t_law) <= 2

    def test_ray_engine_matches_manual_stepping(self):
        eps = 2.0**-4
        prob, cfg = _matched_gs("PerturbedGda", eps)
        hit = first_hit_record(
            "PerturbedGda", prob, cfg, "GS", eps, "eigenvector"
        )
        assert hit.engine == "ray"
        state = eigen_init("PgdaGS", 1.0, 1.0, eps, cfg)
        assert hit.t == _manual_first_hit("PerturbedGda", prob, cfg, eps, state)

    def test_modal_engine_matches_manual_stepping(self):
        # eps small enough that the crossing lies beyond the probe window
        eps = 2.0**-7
        prob, cfg = _matched_gs("PerturbedSmoothedGda", eps)
        hit = first_hit_record(
            "PerturbedSmoothedGda", prob, cfg, "GS", eps, "fixed"
        )
        assert hit.engine == "modal"
        assert hit.t > 512
        state = _fixed_init(prob, "PerturbedSmoothedGda")
        assert hit.t == _manual_first_hit(
            "PerturbedSmoothedGda", prob, cfg, eps, state
        )

    def test_doubling_budget_never_changes_answer(self):
        eps = 2.0**-4
        prob, cfg = _matched_gs("PerturbedGda", eps)
        t = first_hit(
            "PerturbedGda", prob, cfg, "GS", eps, "eigenvector",
            max_iters=20_000,
        )
        assert t != CENSORED
        for budget in (40_000, 80_000, 10**12):
            assert (
                first_hit(
                    "PerturbedGda", prob, cfg, "GS", eps, "eigenvector",
                    max_iters=budget,
                )
                == t
            )

    def test_budget_below_hit_censors(self):
        eps = 2.0**-4
        prob, cfg = _matched_gs("PerturbedGda", eps)
        t = first_hit("PerturbedGda", prob, cfg, "GS", eps, "eigenvector")
        hit = first_hit_record(
            "PerturbedGda", prob, cfg, "GS", eps, "eigenvector",
            max_iters=t - 1,
        )
        assert hit.t == CENSORED
        assert hit.grad_calls == 2 * (t - 1)

    def test_fast_path_grad_calls_are_two_per_iteration(self):
        eps = 2.0**-4
        prob, cfg = _matched_gs("PerturbedGda", eps)
        hit = first_hit_record(
            "PerturbedGda", prob, cfg, "GS", eps, "eigenvector"
        )
        assert hit.grad_calls == 2 * hit.t

    def test_direct_fallback_for_tsgda(self):
        eps = 2.0**-5
        cfg = select_config("TsGda", 1.0, 1.0, eps, mode="GS")
        prob = make_instance("gs-hard", r_y=eps)
        hit = first_hit_record("TsGda", prob, cfg, "GS", eps, "fixed")
        assert hit.engine == "direct"
        state = _fixed_init(prob, "TsGda")
        assert hit.t == _manual_first_hit("TsGda", prob, cfg, eps, state)

    def test_os_metric_ray_hit_on_os_hard(self):
        eps = 2.0**-3
        cfg = select_config("SmoothedGda", 1.0, 5.0, eps, mode="OS")
        prob = make_instance("os-hard", d_y=5.0)
        hit = first_hit_record(
            "SmoothedGda", prob, cfg, "OS", eps, "eigenvector"
        )
        assert hit.engine == "ray"
        assert hit.t > 0

    def test_given_init_state_is_used(self):
        eps = 0.05
        prob, cfg = _matched_gs("PerturbedGda", eps)
        state = eigen_init("PgdaGS", 1.0, 1.0, eps, cfg)
        tiny = IterateState(t=0, x=state.x * 1e-6, y=state.y * 1e-6)
        assert first_hit("PerturbedGda", prob, cfg, "GS", eps, tiny) == 0

    def test_init_given_without_state_rejected(self):
        prob, cfg = _matched_gs("PerturbedGda", 0.05)
        with pytest.raises(ConfigError, match="given"):
            first_hit("PerturbedGda", prob, cfg, "GS", 0.05, "given")

    def test_eigenvector_init_needs_a_known_direction(self):
        eps = 0.05
        cfg = select_config("TsGda", 1.0, 1.0, eps, mode="GS")
        prob = make_instance("gs-hard", r_y=eps)
        with pytest.raises(ConfigError, match="eigen-aligned"):
            first_hit("TsGda", prob, cfg, "GS", eps, "eigenvector")

    def test_epsilon_outside_unit_interval_rejected(self):
        prob, cfg = _matched_gs("PerturbedGda", 0.05)
        with pytest.raises(ConfigError, match="epsilon"):
            first_hit("PerturbedGda", prob, cfg, "GS", 1.5)

    def test_foam_first_hit_accounting(self):
        eps = 0.25
        cfg = select_config(
            "PerturbedSmoothedFoam", 1.0, 1.0, eps, mode="GS"
        )
        prob = make_instance("gs-hard", r_y=cfg.r_y)
        hit = first_hit_record(
            "PerturbedSmoothedFoam", prob, cfg, "GS", eps, "fixed"
        )
        assert hit.engine == "foam"
        assert hit.t >= 1
        trace, (_, _, report) = foam_run(
            prob, cfg, init=_fixed_init(prob, "PerturbedSmoothedFoam")
        )
        outer = len(trace.diagnostics["foam_est"])
        # budget = sum of inner calls + one residual call per outer step
        # + the two post-processing gradients
        inner_calls = trace.grad_calls - outer - 2
        assert inner_calls > 0 and inner_calls % 2 == 0
        assert hit.grad_calls == trace.grad_calls
        assert report.gs <= eps


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def _small_spec(tmp_path=None, **overrides):
    kw = dict(
        algorithm="PerturbedGda",
        instance="gs-hard",
        epsilons=[2.0**-4, 2.0**-5, 2.0**-6],
        metric="GS",
        init="eigenvector",
        predicted_slope=-2.0,
    )
    if tmp_path is not None:
        kw["csv_path"] = str(tmp_path / "sweep.csv")
        kw["json_path"] = str(tmp_path / "report.json")
    kw.update(overrides)
    return SweepSpec(**kw)


class TestSweep:
    def test_rows_follow_epsilon_order_and_decay_quadratically(self):
        rows = sweep(_small_spec())
        assert [r["eps"] for r in rows] == [2.0**-4, 2.0**-5, 2.0**-6]
        assert all(r["alg"] == "pgda" for r in rows)
        assert all(r["censored"] == 0 for r in rows)
        fit = slope_fit(rows, predicted_slope=-2.0)
        assert fit.passed
        assert abs(fit.slope + 2.0) <= 0.15
        assert fit.r_squared >= 0.98

    def test_reruns_are_identical_except_wall_ms(self):
        a = sweep(_small_spec())
        b = sweep(_small_spec())
        for ra, rb in zip(a, b):
            for col in SWEEP_COLUMNS:
                if col == "wall_ms":
                    continue  # real timing, contractually non-reproducible
                assert ra[col] == rb[col]

    def test_parallel_jobs_match_serial(self):
        serial = sweep(_small_spec())
        parallel = sweep(_small_spec(jobs=2))
        for ra, rb in zip(serial, parallel):
            for col in SWEEP_COLUMNS:
                if col != "wall_ms":
                    assert ra[col] == rb[col]

    def test_outputs_written_and_load_back(self, tmp_path):
        spec = _small_spec(tmp_path)
        rows = sweep(spec)
        loaded = load_sweep_csv(spec.csv_path)
        assert len(loaded) == 3
        for got, want in zip(loaded, rows):
            for col in SWEEP_COLUMNS:
                if col != "wall_ms":
                    assert got[col] == want[col]
        report = load_report(spec.json_path)
        assert report["pass"] is True
        assert abs(report["slope"] + 2.0) <= 0.15
        assert [p["eps"] for p in report["points"]] == [
            r["eps"] for r in rows
        ]
        assert not list(tmp_path.glob("*.tmp.*"))

    def test_csv_header_is_contractual(self, tmp_path):
        spec = _small_spec(tmp_path)
        sweep(spec)
        header = open(spec.csv_path, encoding="utf-8").readline().strip()
        assert header == ",".join(SWEEP_COLUMNS)

    def test_tampered_row_rejected_on_load(self, tmp_path):
        spec = _small_spec(tmp_path)
        sweep(spec)
        text = open(spec.csv_path, encoding="utf-8").read()
        lines = text.splitlines()
        cells = lines[1].split(",")
        cells[SWEEP_COLUMNS.index("alpha")] = repr(
            float(cells[SWEEP_COLUMNS.index("alpha")]) * 1.01
        )
        lines[1] = ",".join(cells)
        open(spec.csv_path, "w", encoding="utf-8").write("\n".join(lines))
        with pytest.raises(ConfigError, match="alpha"):
            load_sweep_csv(spec.csv_path)

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("alg,eps\npgda,0.1\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="header"):
            load_sweep_csv(path)

    def test_report_bytes_identical_outside_meta(self, tmp_path):
        spec = _small_spec(tmp_path)
        rows = sweep(spec)
        first = json.load(open(spec.json_path, encoding="utf-8"))
        fit = slope_fit(rows, -2.0)
        write_report(spec, rows, fit, spec.json_path)
        second = json.load(open(spec.json_path, encoding="utf-8"))
        first.pop("meta")
        second.pop("meta")
        assert json.dumps(first, sort_keys=True) == json.dumps(
            second, sort_keys=True
        )

    def test_spec_requires_three_decreasing_epsilons(self):
        with pytest.raises(ConfigError, match="at least 3"):
            _small_spec(epsilons=[0.1, 0.05])
        with pytest.raises(ConfigError, match="decreasing"):
            _small_spec(epsilons=[0.05, 0.1, 0.2])
        with pytest.raises(ConfigError, match="decreasing"):
            _small_spec(epsilons=[0.1, 0.1, 0.05])

    def test_spec_rejects_bad_fields(self):
        with pytest.raises(ConfigError):
            _small_spec(epsilons=[1.5, 0.1, 0.05])
        with pytest.raises(ConfigError, match="metric"):
            _small_spec(metric="XX")
        with pytest.raises(ConfigError, match="init"):
            _small_spec(init="random")
        with pytest.raises(ConfigError):
            _small_spec(algorithm="Newton")

    def test_spec_is_frozen(self):
        spec = _small_spec()
        with pytest.raises(dataclasses.FrozenInstanceError):
            spec.jobs = 4


class TestAlgorithmNames:
    def test_round_trip(self):
        for short, canonical in [
            ("pgda", "PerturbedGda"),
            ("sgda", "SmoothedGda"),
            ("psgda", "PerturbedSmoothedGda"),
            ("foam", "PerturbedSmoothedFoam"),
            ("tsgda", "TsGda"),
        ]:
            assert canonical_algorithm(short) == canonical
            assert canonical_algorithm(canonical) == canonical
            assert short_algorithm(canonical) == short

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError, match="algorithm"):
            canonical_algorithm("adam")


# ---------------------------------------------------------------------------
# Rate fitting
# ---------------------------------------------------------------------------


def _rows_from_pairs(pairs):
    rows = []
    for eps, t in pairs:
        rows.append(
            {"eps": eps, "first_hit_T": t, "censored": int(t == CENSORED)}
        )
    return rows


class TestSlopeFit:
    def test_exact_inverse_square_law(self):
        rows = _rows_from_pairs(
            [(e, int(round(e**-2))) for e in (0.25, 0.125, 0.0625, 0.03125)]
        )
        fit = slope_fit(rows, predicted_slope=-2.0)
        assert abs(fit.slope + 2.0) < 1e-9
        assert fit.r_squared == 1.0
        assert fit.passed

    def test_censored_points_excluded_with_warning(self):
        rows = _rows_from_pairs(
            [(0.25, 16), (0.125, 64), (0.0625, 256), (0.03125, CENSORED)]
        )
        fit = slope_fit(rows, predicted_slope=-2.0)
        assert abs(fit.slope + 2.0) < 1e-9
        assert len(fit.points) == 3
        assert any("censored" in w for w in fit.warnings)

    def test_too_few_points_is_an_error(self):
        rows = _rows_from_pairs([(0.25, 16), (0.125, CENSORED), (0.0625, CENSORED)])
        with pytest.raises(ConfigError, match="at least 3"):
            slope_fit(rows)

    def test_out_of_band_slope_fails(self):
        rows = _rows_from_pairs([(e, int(round(e**-1.0 * 100))) for e in (0.25, 0.125, 0.0625)])
        fit = slope_fit(rows, predicted_slope=-2.0, tolerance=0.15)
        assert not fit.passed
        assert abs(fit.slope + 1.0) < 1e-6

    def test_poor_r_squared_fails(self):
        rows = _rows_from_pairs(
            [(0.25, 100), (0.125, 10_000), (0.0625, 11_000), (0.03125, 12_000)]
        )
        fit = slope_fit(rows, predicted_slope=fit_slope(rows))
        assert fit.r_squared < 0.98
        assert not fit.passed

    @settings(max_examples=40, deadline=None)
    @given(
        slope=st.floats(min_value=-4.0, max_value=-0.5),
        scale=st.floats(min_value=100.0, max_value=1e4),
    )
    def test_agrees_with_polyfit_on_power_laws(self, slope, scale):
        # tables carry integer T, so the oracle is the least-squares fit
        # of the same discretized points, not the generating exponent
        eps = [2.0**-k for k in range(3, 9)]
        rows = _rows_from_pairs(
            [(e, max(1, round(scale * e**slope))) for e in eps]
        )
        fit = slope_fit(rows, predicted_slope=slope, tolerance=0.15)
        assert abs(fit.slope - fit_slope(rows)) < 1e-9
        assert abs(fit.slope - slope) < 0.02
        assert fit.r_squared > 0.999
        assert fit.passed


def fit_slope(rows):
    pts = [(math.log(r["eps"]), math.log(r["first_hit_T"])) for r in rows]
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


# ---------------------------------------------------------------------------
# Trace audits
# ---------------------------------------------------------------------------


def _trajectory(algorithm, eps, n, c_scale=1.0, kind="PgdaGS"):
    cfg = select_config(algorithm, 1.0, 1.0, eps, mode="GS")
    prob = gs_instance(r_y=cfg.r_y if cfg.r_y > 0 else eps)
    states = [eigen_init(kind, 1.0, 1.0, eps, cfg)]
    if c_scale != 1.0:
        cfg = dataclasses.replace(cfg, c=cfg.c * c_scale)
    for _ in range(n):
        states.append(step(algorithm, prob, cfg, states[-1]))
    return IterateTrace(config=cfg, states=states, problem=prob)


class TestAuditTrace:
    def test_clean_pgda_run_has_no_violations(self):
        trace = _trajectory("PerturbedGda", 0.05, 200)
        out = audit_trace(
            trace, ["Psi1Descent", "DualErrPGDA", "GsToOs"], tol=1e-7
        )
        assert out == []

    def test_clean_psgda_run_has_no_violations(self):
        trace = _trajectory(
            "PerturbedSmoothedGda", 0.05, 200, kind="PsgdaGS"
        )
        out = audit_trace(
            trace, ["Psi2Descent", "DualErrNCSC", "GsToOs"], tol=1e-7
        )
        assert out == []

    def test_psgda_with_inflated_dual_step_violates(self):
        trace = _trajectory(
            "PerturbedSmoothedGda", 0.05, 300, c_scale=10.0, kind="PsgdaGS"
        )
        out = audit_trace(trace, ["Psi2Descent"], tol=1e-7)
        assert len(out) >= 1
        assert all(kind == "Psi2Descent" for _, kind, _ in out)
        assert all(slack < -1e-7 for _, _, slack in out)

    def test_pgda_refined_descent_control_needs_large_inflation(self):
        # the refined potential bound carries enough slack that a 10x
        # dual step still descends; 200x breaks it decisively
        trace = _trajectory("PerturbedGda", 0.05, 300, c_scale=200.0)
        out = audit_trace(trace, ["Psi1Descent"], tol=1e-7)
        assert len(out) >= 1

    def test_single_state_trace_audits_nothing_pairwise(self):
        trace = _trajectory("PerturbedGda", 0.05, 0)
        assert audit_trace(trace, ["Psi1Descent"]) == []

    def test_point_kinds_cover_every_state(self):
        trace = _trajectory("PerturbedGda", 0.05, 5)
        # GsToOs holds everywhere on this instance; force a fake
        # violation threshold to count audited points instead
        out = audit_trace(trace, ["GsToOs"], tol=-1e9)
        assert len(out) == 6
        assert [t for t, _, _ in out] == list(range(6))

    def test_strided_trace_skips_non_adjacent_pairs(self):
        trace = _trajectory("PerturbedGda", 0.05, 12)
        strided = IterateTrace(
            config=trace.config,
            states=trace.states[::3],
            problem=trace.problem,
        )
        # consecutive recorded states are 3 iterations apart: nothing to
        # audit pairwise, and that is a skip rather than a violation
        assert audit_trace(strided, ["Psi1Descent"]) == []

    def test_unknown_kind_rejected(self):
        trace = _trajectory("PerturbedGda", 0.05, 2)
        with pytest.raises(ConfigError, match="unknown audit kind"):
            audit_trace(trace, ["Psi9Descent"])

    def test_trace_without_problem_rejected(self):
        trace = _trajectory("PerturbedGda", 0.05, 2)
        bare = IterateTrace(config=trace.config, states=trace.states)
        with pytest.raises(ConfigError, match="problem"):
            audit_trace(bare, ["Psi1Descent"])

    def test_violations_sorted_by_iteration(self):
        trace = _trajectory(
            "PerturbedSmoothedGda", 0.05, 200, c_scale=10.0, kind="PsgdaGS"
        )
        out = audit_trace(trace, ["Psi2Descent"], tol=1e-7)
        ts = [t for t, _, _ in out]
        assert ts == sorted(ts)


# ---------------------------------------------------------------------------
# Trace CSV
# ---------------------------------------------------------------------------


class TestTraceCsv:
    def test_round_trip_with_audited_rows(self, tmp_path):
        eps = 0.05
        prob, cfg = _matched_gs("PerturbedGda", eps)
        state = eigen_init("PgdaGS", 1.0, 1.0, eps, cfg)
        trace = run(
            "PerturbedGda", prob, cfg, init=state,
            stop={"max_iters": 20}, audit_stride=5,
        )
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        header = open(path, encoding="utf-8").readline().strip().split(",")
        assert header == [
            "t", "x0", "y0", "step_x", "step_y",
            "gs_primal", "gs_dual", "os", "psi",
        ]
        rows = load_trace_csv(path)
        assert len(rows) == 21
        assert rows[0]["t"] == 0
        audited = [r for r in rows if r["gs_primal"] is not None]
        assert [r["t"] for r in audited] == [0, 5, 10, 15, 20]
        for r in audited:
            assert r["psi"] is not None and r["psi"] > 0.0
        for r in rows:
            if r["t"] % 5 != 0:
                assert r["gs_primal"] is None and r["psi"] is None
        x_want = [float(s.x[0]) for s in trace.states]
        assert [r["x0"] for r in rows] == x_want

    def test_smoothed_trace_carries_z_columns(self, tmp_path):
        eps = 0.1
        prob, cfg = _matched_gs("PerturbedSmoothedGda", eps)
        trace = run(
            "PerturbedSmoothedGda", prob, cfg,
            init=_fixed_init(prob, "PerturbedSmoothedGda"),
            stop={"max_iters": 4},
        )
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        header = open(path, encoding="utf-8").readline().strip().split(",")
        assert "z0" in header
        rows = load_trace_csv(path)
        assert all(r["z0"] is not None for r in rows)


# ---------------------------------------------------------------------------
# TOML sweep specs
# ---------------------------------------------------------------------------


GOOD_TOML = """
[sweep]
alg = "pgda"
instance = "gs-hard"
metric = "GS"
epsilons = [0.0625, 0.03125, 0.015625]
init = "eigenvector"
jobs = 2
csv = "out.csv"
report = "out.json"

[fit]
predicted_slope = -2.0
tolerance = 0.15
"""


class TestSweepToml:
    def test_good_file_loads(self, tmp_path):
        path = tmp_path / "sweep.toml"
        path.write_text(GOOD_TOML, encoding="utf-8")
        spec = load_sweep_toml(path)
        assert spec.algorithm == "PerturbedGda"
        assert spec.instance == "gs-hard"
        assert spec.epsilons == (0.0625, 0.03125, 0.015625)
        assert spec.jobs == 2
        assert spec.csv_path == "out.csv"
        assert spec.json_path == "out.json"
        assert spec.predicted_slope == -2.0
        assert spec.tolerance == 0.15

    def test_unknown_key_is_named(self, tmp_path):
        path = tmp_path / "sweep.toml"
        path.write_text(
            GOOD_TOML.replace('jobs = 2', 'jobs = 2\nworkers = 8'),
            encoding="utf-8",
        )
        with pytest.raises(ConfigError, match="workers"):
            load_sweep_toml(path)

    def test_unknown_table_is_named(self, tmp_path):
        path = tmp_path / "sweep.toml"
        path.write_text(GOOD_TOML + "\n[plot]\nkind = 's'\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="plot"):
            load_sweep_toml(path)

    def test_missing_required_key_rejected(self, tmp_path):
        path = tmp_path / "sweep.toml"
        path.write_text(
            re.sub(r'instance = .*\n', "", GOOD_TOML), encoding="utf-8"
        )
        with pytest.raises(ConfigError, match="instance"):
            load_sweep_toml(path)

    def test_loaded_spec_runs(self, tmp_path):
        path = tmp_path / "sweep.toml"
        text = GOOD_TOML.replace('"out.csv"', repr(str(tmp_path / "s.csv")))
        text = text.replace('"out.json"', repr(str(tmp_path / "r.json")))
        text = text.replace("jobs = 2", "jobs = 1")
        path.write_text(text, encoding="utf-8")
        spec = load_sweep_toml(path)
        rows = sweep(spec)
        assert len(rows) == 3
        assert load_report(spec.json_path)["pass"] is True

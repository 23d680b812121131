"""Certified oracles, Lyapunov values, residuals, and inequality audits."""

from __future__ import annotations

import dataclasses
import math
import types

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmx.core import (
    ConfigError,
    FullSpace,
    Interval,
    MinimaxProblem,
    OracleError,
    SurrogateParams,
    f_tilde_value,
    surrogate_value,
)
from mmx.instances import eigen_init, gs_instance, os_instance, bilinear_quadratic
from mmx.spectral import SpectralParams, recursion_matrix
from mmx.solvers import (
    IterateState,
    initial_state,
    inner_scsc,
    select_config,
    step,
)
from mmx.stationarity import (
    AUDIT_KINDS,
    InitialGapReport,
    OracleResult,
    StationarityReport,
    bound_audit,
    gs_residual,
    initial_gap,
    inner_max,
    lyapunov,
    os_residual,
    prox_min,
    saddle_solve,
    stationarity_report,
)


def quad_problem(a: float = 0.5, b: float = 0.5) -> MinimaxProblem:
    """Oracle-free -(a/2)x^2 + b*x*y over x in R, y in [-1, 1]."""

    def f(x, y):
        return float(-0.5 * a * x[0] ** 2 + b * x[0] * y[0])

    def gx(x, y):
        return np.array([-a * x[0] + b * y[0]])

    def gy(x, y):
        return np.array([b * x[0]])

    return MinimaxProblem(
        dim_x=1,
        dim_y=1,
        f=f,
        grad_x=gx,
        grad_y=gy,
        ell=a + b,
        set_x=FullSpace(1),
        set_y=Interval(-1.0, 1.0),
    )


def strip(problem: MinimaxProblem) -> MinimaxProblem:
    """Same problem with every closed form removed (search box kept)."""
    region = getattr(problem.oracles, "prox_region", None)
    bundle = (
        types.SimpleNamespace(prox_region=region) if region is not None else None
    )
    return dataclasses.replace(problem, oracles=bundle, scalar_ops=None)


class TestReportTypes:
    def test_oracle_result_requires_points(self):
        with pytest.raises(ConfigError):
            OracleResult(points=(), value=0.0, certified_error=0.0, oracle_calls=0)

    def test_oracle_result_rejects_negative_certificate(self):
        with pytest.raises(ConfigError):
            OracleResult(
                points=(np.zeros(1),),
                value=0.0,
                certified_error=-1e-12,
                oracle_calls=0,
            )

    def test_point_property_is_first(self):
        res = OracleResult(
            points=(np.array([1.0]), np.array([2.0])),
            value=0.0,
            certified_error=0.0,
            oracle_calls=0,
        )
        assert res.point[0] == 1.0

    def test_report_gs_must_be_componentwise_max(self):
        with pytest.raises(ConfigError):
            StationarityReport(
                gs_primal=1.0,
                gs_dual=2.0,
                gs=1.0,
                os=0.0,
                os_certified_slack=0.0,
            )

    def test_report_allows_inf_os(self):
        rep = StationarityReport(
            gs_primal=1.0,
            gs_dual=0.5,
            gs=1.0,
            os=math.inf,
            os_certified_slack=math.inf,
        )
        assert math.isinf(rep.os)

    def test_report_rejects_nan(self):
        with pytest.raises(ConfigError):
            StationarityReport(
                gs_primal=math.nan,
                gs_dual=0.0,
                gs=math.nan,
                os=0.0,
                os_certified_slack=0.0,
            )


class TestInnerMax:
    def test_analytic_route_is_exact(self):
        prob = gs_instance(r_y=0.05)
        res = inner_max(prob, 0.05, np.array([0.08]))
        assert res.certified_error == 0.0
        assert res.oracle_calls == 0
        assert res.value == pytest.approx(
            prob.oracles.phi_tilde(SurrogateParams(0.0, 0.05), np.array([0.08])),
            abs=1e-15,
        )

    def test_iterative_matches_interior_closed_form(self):
        prob = quad_problem(a=0.5, b=0.5)
        r_y, x = 2.0, np.array([0.6])
        res = inner_max(prob, r_y, x, tol=1e-12)
        y_true = 0.5 * 0.6 / r_y  # b*x/r_y, interior of [-1, 1]
        assert abs(res.point[0] - y_true) <= res.certified_error + 1e-12
        assert res.certified_error <= 1e-10
        assert res.oracle_calls > 0

    def test_iterative_matches_clipped_closed_form(self):
        prob = quad_problem(a=0.5, b=0.5)
        res = inner_max(prob, 0.05, np.array([0.6]), tol=1e-12)
        assert abs(res.point[0] - 1.0) <= res.certified_error + 1e-12

    def test_merely_concave_dual_raises(self):
        with pytest.raises(OracleError, match="merely concave"):
            inner_max(quad_problem(), 0.0, np.array([0.1]))

    def test_numeric_route_agrees_with_analytic(self):
        prob = gs_instance(r_y=0.05)
        x = np.array([0.07])
        exact = inner_max(prob, 0.05, x)
        approx = inner_max(strip(prob), 0.05, x, tol=1e-11)
        assert abs(approx.value - exact.value) <= 1e-9
        assert (
            np.linalg.norm(approx.point - exact.point)
            <= approx.certified_error + 1e-11
        )

    @settings(max_examples=40, deadline=None)
    @given(
        x=st.floats(-0.8, 0.8),
        r_y=st.floats(0.05, 4.0),
    )
    def test_certificate_soundness_on_closed_forms(self, x, r_y):
        prob = quad_problem(a=0.5, b=0.5)
        res = inner_max(prob, r_y, np.array([x]), tol=1e-11)
        y_true = min(1.0, max(-1.0, 0.5 * x / r_y))
        assert abs(res.point[0] - y_true) <= res.certified_error + 1e-10


class TestProxMin:
    def test_requires_strongly_convex_surrogate(self):
        prob = quad_problem()
        params = SurrogateParams(r_x=prob.ell, r_y=0.1)
        with pytest.raises(ConfigError, match="strongly convex"):
            prox_min(prob, params, np.array([0.0]), np.array([0.0]))

    def test_iterative_matches_closed_form(self):
        prob = quad_problem(a=0.5, b=0.5)
        params = SurrogateParams(r_x=4.0, r_y=0.1)
        y, z = np.array([0.3]), np.array([0.2])
        res = prox_min(prob, params, y, z, tol=1e-12)
        x_true = (4.0 * 0.2 - 0.5 * 0.3) / (4.0 - 0.5)
        assert abs(res.point[0] - x_true) <= res.certified_error + 1e-11
        d_true = surrogate_value(prob, params, np.array([x_true]), y, z)
        assert res.value <= d_true + prob.ell * res.certified_error + 1e-10

    def test_alpha_appends_dual_ascent_point(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        y, z = np.array([0.4]), np.array([0.08])
        alpha = 0.03
        res = prox_min(prob, params, y, z, alpha=alpha)
        assert len(res.points) == 2
        xt = res.points[0]
        gy = prob.grad_y(xt, y) - params.r_y * y
        expected = min(1.0, max(0.0, float(y[0] + alpha * gy[0])))
        assert res.points[1][0] == pytest.approx(expected, abs=1e-12)

    def test_numeric_route_agrees_with_analytic(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        y, z = np.array([0.5]), np.array([0.09])
        exact = prox_min(prob, params, y, z)
        approx = prox_min(strip(prob), params, y, z, tol=1e-11)
        assert exact.certified_error == 0.0
        assert (
            np.linalg.norm(approx.point - exact.point)
            <= approx.certified_error + 1e-10
        )


class TestSaddleSolve:
    def test_matches_closed_form_saddle(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        z, delta = np.array([0.1]), 1e-12
        res = saddle_solve(prob, params, z, delta)
        xs = prob.oracles.x_star(params, z)
        ys = prob.oracles.y_of_z(params, z)
        err = math.hypot(
            float(res.points[0][0] - xs[0]), float(res.points[1][0] - ys[0])
        )
        assert err <= math.sqrt(delta)
        assert err <= res.certified_error + 1e-15
        assert res.oracle_calls > 0

    def test_value_is_surrogate_at_returned_point(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        z = np.array([0.1])
        res = saddle_solve(prob, params, z, 1e-10)
        direct = surrogate_value(prob, params, res.points[0], res.points[1], z)
        assert res.value == pytest.approx(direct, abs=1e-15)

    def test_refining_delta_is_consistent(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        z = np.array([0.1])
        coarse = saddle_solve(prob, params, z, 1e-12)
        fine = saddle_solve(prob, params, z, 1e-14)
        assert abs(coarse.value - fine.value) < 1e-6
        p_exact = prob.oracles.p_tilde(params, z)
        assert abs(fine.value - p_exact) < 1e-6


class TestGsResidual:
    def test_interior_point_is_gradient_norm(self):
        prob = gs_instance(r_y=0.05)
        x, y = np.array([0.08]), np.array([0.4])
        gp, gd = gs_residual(prob, x, y)
        assert gp == pytest.approx(abs(-1.0 * 0.08 + math.sqrt(0.15) * 0.4))
        assert gd == pytest.approx(math.sqrt(0.15) * 0.08)

    def test_worked_eigen_start_values(self):
        cfg = select_config("PerturbedGda", 1.0, 1.0, 0.05, mode="GS")
        s0 = eigen_init("PgdaGS", 1.0, 1.0, 0.05, cfg)
        gp, gd = gs_residual(gs_instance(r_y=cfg.r_y), s0.x, s0.y)
        # independent route: slow eigenvector of the numeric recursion matrix
        b = math.sqrt(3.0 * cfg.r_y)
        m = recursion_matrix(
            "M1",
            SpectralParams(
                ell=1.0, r_y=cfg.r_y, b=b, c=cfg.c, alpha=cfg.alpha
            ),
        )
        vals, vecs = np.linalg.eig(m)
        slow = int(np.argmax(vals.real))
        ratio = vecs[1, slow].real / vecs[0, slow].real
        expected = abs(-1.0 + b * ratio) * float(s0.x[0])
        assert gp == pytest.approx(expected, rel=1e-8)
        assert gp == pytest.approx(0.20188, abs=5e-5)
        assert gd == pytest.approx(math.sqrt(0.15) * 0.1, rel=1e-9)
        assert max(gp, gd) > 0.05  # the start is not already epsilon-good

    def test_boundary_absorbs_outward_dual_gradient(self):
        prob = os_instance()
        # at y = d_y the dual gradient pushes outward; the cone absorbs it
        x, y = np.array([0.5]), np.array([1.0])
        _, gd = gs_residual(prob, x, y)
        assert gd == 0.0

    def test_nonfinite_gradient_raises(self):
        prob = quad_problem()
        bad = dataclasses.replace(
            prob, grad_x=lambda x, y: np.array([math.nan])
        )
        with pytest.raises(OracleError):
            gs_residual(bad, np.array([0.1]), np.array([0.1]))


class TestOsResidual:
    def test_worked_analytic_value(self):
        prob = os_instance(ell=1.0, d_y=1.0)
        res = os_residual(prob, np.array([0.5]))
        assert res.value == pytest.approx(0.2, abs=1e-12)
        assert res.certified_error == 0.0

    def test_numeric_route_matches_worked_value(self):
        prob = os_instance(ell=1.0, d_y=1.0)
        res = os_residual(prob, np.array([0.5]), use_analytic=False)
        assert res.value == pytest.approx(0.2, abs=1e-6)
        assert res.certified_error < 1e-6

    def test_routes_agree_across_the_quadratic_branch(self):
        prob = os_instance(ell=1.0, d_y=1.0)
        for x in np.linspace(-0.9, 0.9, 13):
            exact = os_residual(prob, np.array([float(x)]))
            approx = os_residual(
                prob, np.array([float(x)]), use_analytic=False
            )
            scale = max(1.0, exact.value)
            assert abs(exact.value - approx.value) <= 1e-5 * scale

    def test_high_dimension_rejected(self):
        def f(x, y):
            return float(np.sum(x) * y[0])

        prob = MinimaxProblem(
            dim_x=3,
            dim_y=1,
            f=f,
            grad_x=lambda x, y: np.full(3, float(y[0])),
            grad_y=lambda x, y: np.array([float(np.sum(x))]),
            ell=1.0,
            set_x=FullSpace(3),
            set_y=Interval(-1.0, 1.0),
        )
        with pytest.raises(OracleError, match="dim_x <= 2"):
            os_residual(prob, np.zeros(3))

    def test_unbounded_domain_without_region_rejected(self):
        with pytest.raises(OracleError, match="bounded search region"):
            os_residual(quad_problem(), np.array([0.3]))

    def test_explicit_region_enables_the_numeric_route(self):
        res = os_residual(
            quad_problem(a=0.5, b=0.5), np.array([0.3]), region=(-3.0, 3.0)
        )
        # Phi(x) = max_y f = 0.5*|x| - 0.25*x^2 + ... is maximized in y by
        # sign; the residual only needs to be finite and certified here.
        assert math.isfinite(res.value)
        assert res.certified_error < 1e-5


class TestStationarityReportFn:
    def test_gs_is_max_of_components(self):
        prob = gs_instance(r_y=0.05)
        rep = stationarity_report(prob, np.array([0.08]), np.array([0.3]))
        assert rep.gs == max(rep.gs_primal, rep.gs_dual)

    def test_worked_os_hard_report(self):
        prob = os_instance()
        rep = stationarity_report(prob, np.array([0.5]), np.array([1.0]))
        assert rep.os == pytest.approx(0.2, abs=1e-9)
        assert rep.gs_dual == 0.0

    def test_unavailable_os_degrades_to_inf(self):
        rep = stationarity_report(
            quad_problem(), np.array([0.2]), np.array([0.1])
        )
        assert math.isinf(rep.os)
        assert math.isinf(rep.os_certified_slack)
        assert math.isfinite(rep.gs)


class TestLyapunov:
    def test_p_tilde_matches_closed_form(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        z = np.array([0.12])
        st_ = IterateState(t=0, x=np.array([0.0]), y=np.array([0.0]), z=z)
        val = lyapunov(prob, params, None, "PTilde", st_)
        expected = 1.0 * 4.0 * 0.12**2 / (4.0 + 2.0)  # ell*r_x*z^2/(r_x+2l)
        assert val == pytest.approx(expected, rel=1e-12)

    def test_psi1_is_two_phi_minus_f(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=0.0, r_y=0.05)
        x, y = np.array([0.08]), np.array([0.3])
        st_ = IterateState(t=0, x=x, y=y)
        val = lyapunov(prob, params, None, "Psi1", st_)
        phi = prob.oracles.phi_tilde(params, x)
        assert val == pytest.approx(
            2.0 * phi - f_tilde_value(prob, params, x, y), rel=1e-12
        )

    def test_psi2_requires_center(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        st_ = IterateState(t=0, x=np.array([0.1]), y=np.array([0.1]))
        with pytest.raises(ConfigError, match="state.z is required"):
            lyapunov(prob, params, None, "Psi2", st_)

    def test_unknown_kind_rejected(self):
        prob = gs_instance(r_y=0.05)
        st_ = initial_state(prob, "PerturbedGda")
        with pytest.raises(ConfigError, match="unknown"):
            lyapunov(prob, SurrogateParams(0.0, 0.05), None, "Psi9", st_)

    def test_psi2_continuous_in_vanishing_perturbation(self):
        # the smoothed potential at r_y -> 0 approaches the unperturbed one
        state = IterateState(
            t=0, x=np.array([0.08]), y=np.array([0.4]), z=np.array([0.1])
        )
        vals = []
        for r_y in (1e-3, 1e-5, 1e-7, 0.0):
            prob = gs_instance(r_y=0.05)  # fixed instance, varying params
            params = SurrogateParams(r_x=4.0, r_y=r_y)
            vals.append(lyapunov(prob, params, None, "Psi2", state))
        assert abs(vals[0] - vals[-1]) < 2e-3
        assert abs(vals[1] - vals[-1]) < 2e-5
        assert abs(vals[2] - vals[-1]) < 2e-7


class TestInitialGap:
    def test_delta_psi1_worked_value(self):
        cfg = select_config("PerturbedGda", 1.0, 1.0, 0.05, mode="GS")
        prob = gs_instance(r_y=cfg.r_y)
        s0 = eigen_init("PgdaGS", 1.0, 1.0, 0.05, cfg)
        rep = initial_gap(
            prob, cfg.surrogate_params(), cfg, "DeltaPsi1", s0
        )
        assert isinstance(rep, InitialGapReport)
        assert rep.method == "analytic"
        # 2*phi(x0) - f(x0, y0) + tiny mismatch ~ l*x0^2 = 4*eps^2/l
        assert rep.value == pytest.approx(4.0 * 0.05**2, abs=1e-4)
        assert rep.value <= 10.0 * 0.05**2  # O(eps^2) start, constant 10
        assert set(rep.components) == {
            "psi1",
            "dual_mismatch_term",
            "minmax_tilde",
        }

    def test_delta_psi1_requires_primal_step_size(self):
        prob = gs_instance(r_y=0.05)
        s0 = initial_state(prob, "PerturbedGda")
        with pytest.raises(ConfigError, match="requires cfg.c"):
            initial_gap(
                prob, SurrogateParams(0.0, 0.05), None, "DeltaPsi1", s0
            )

    def test_delta_psi2_eigen_start_is_eps_squared(self):
        cfg = select_config("PerturbedSmoothedGda", 1.0, 1.0, 0.05, mode="GS")
        prob = gs_instance(r_y=cfg.r_y)
        s0 = eigen_init("PsgdaGS", 1.0, 1.0, 0.05, cfg)
        rep = initial_gap(
            prob, cfg.surrogate_params(), cfg, "DeltaPsi2", s0
        )
        assert 0.0 <= rep.value <= 10.0 * 0.05**2

    def test_delta_p_tilde_matches_closed_form(self):
        cfg = select_config(
            "PerturbedSmoothedFoam", 1.0, 1.0, 0.1, mode="OS"
        )
        prob = gs_instance(r_y=cfg.r_y)
        z0 = 0.05
        s0 = IterateState(
            t=0, x=np.array([z0]), y=np.array([0.0]), z=np.array([z0])
        )
        rep = initial_gap(
            prob, cfg.surrogate_params(), cfg, "DeltaPTilde", s0
        )
        expected = 1.0 * cfg.r_x * z0**2 / (cfg.r_x + 2.0)
        assert rep.value == pytest.approx(expected, rel=1e-9)

    def test_unbounded_instance_has_no_gap(self):
        prob = bilinear_quadratic()
        s0 = initial_state(prob, "PerturbedGda")
        cfg = select_config("PerturbedGda", prob.ell, prob.d_y, 0.1, mode="GS")
        with pytest.raises(OracleError):
            initial_gap(prob, cfg.surrogate_params(), cfg, "DeltaPsi1", s0)

    def test_numeric_fallback_agrees_with_analytic(self):
        cfg = select_config("PerturbedGda", 1.0, 1.0, 0.05, mode="GS")
        prob = gs_instance(r_y=cfg.r_y)
        s0 = eigen_init("PgdaGS", 1.0, 1.0, 0.05, cfg)
        exact = initial_gap(prob, cfg.surrogate_params(), cfg, "DeltaPsi1", s0)
        approx = initial_gap(
            strip(prob), cfg.surrogate_params(), cfg, "DeltaPsi1", s0
        )
        assert approx.method == "numeric"
        assert approx.value == pytest.approx(exact.value, abs=1e-6)


def _pgda_trajectory(eps: float, n: int, c_scale: float = 1.0):
    cfg = select_config("PerturbedGda", 1.0, 1.0, eps, mode="GS")
    prob = gs_instance(r_y=cfg.r_y)
    states = [eigen_init("PgdaGS", 1.0, 1.0, eps, cfg)]
    if c_scale != 1.0:
        cfg = dataclasses.replace(cfg, c=cfg.c * c_scale)
    for _ in range(n):
        states.append(step("PerturbedGda", prob, cfg, states[-1]))
    return prob, cfg, states


def _psgda_trajectory(eps: float, n: int):
    cfg = select_config("PerturbedSmoothedGda", 1.0, 1.0, eps, mode="GS")
    prob = gs_instance(r_y=cfg.r_y)
    states = [eigen_init("PsgdaGS", 1.0, 1.0, eps, cfg)]
    for _ in range(n):
        states.append(step("PerturbedSmoothedGda", prob, cfg, states[-1]))
    return prob, cfg, states


class TestBoundAudit:
    def test_unknown_kind_lists_known_ones(self):
        with pytest.raises(ConfigError) as exc:
            bound_audit("NoSuchBound", {})
        for kind in AUDIT_KINDS:
            assert kind in str(exc.value)

    def test_missing_fields_are_named(self):
        with pytest.raises(ConfigError, match="'alpha'"):
            bound_audit("DualErrPGDA", {"problem": gs_instance(r_y=0.05)})

    def test_dual_err_pgda_needs_perturbation(self):
        prob = gs_instance(r_y=0.05)
        ctx = dict(
            problem=prob,
            params=SurrogateParams(0.0, 0.0),
            alpha=0.2,
            x=np.array([0.1]),
            y=np.array([0.1]),
            y_prev=np.array([0.1]),
        )
        with pytest.raises(ConfigError, match="r_y > 0"):
            bound_audit("DualErrPGDA", ctx)

    def test_dual_err_pgda_holds_along_run(self):
        prob, cfg, states = _pgda_trajectory(0.05, 60)
        params = cfg.surrogate_params()
        for prev, cur in zip(states[:-1], states[1:]):
            slack = bound_audit(
                "DualErrPGDA",
                dict(
                    problem=prob,
                    params=params,
                    alpha=cfg.alpha,
                    x=cur.x,
                    y=cur.y,
                    y_prev=prev.y,
                ),
            )
            assert slack >= -1e-7 * max(1.0, abs(slack))

    def test_psi1_descent_holds_along_run(self):
        prob, cfg, states = _pgda_trajectory(0.05, 60)
        params = cfg.surrogate_params()
        for i in range(len(states) - 1):
            ctx = dict(
                problem=prob,
                params=params,
                alpha=cfg.alpha,
                c=cfg.c,
                x=states[i].x,
                y=states[i].y,
                x_next=states[i + 1].x,
                y_next=states[i + 1].y,
            )
            if i > 0:
                ctx["y_prev"] = states[i - 1].y
            slack = bound_audit("Psi1Descent", ctx)
            assert slack >= -1e-7 * max(1.0, abs(slack))

    def test_psi1_descent_negative_control(self):
        # a primal step far above its cap must break the audited descent;
        # the cap carries about two orders of physical margin here, so the
        # control needs a 200x scale (10x still descends)
        prob, cfg, states = _pgda_trajectory(0.05, 300, c_scale=200.0)
        params = cfg.surrogate_params()
        worst = math.inf
        for i in range(1, len(states) - 1):
            slack = bound_audit(
                "Psi1Descent",
                dict(
                    problem=prob,
                    params=params,
                    alpha=cfg.alpha,
                    c=cfg.c,
                    x=states[i].x,
                    y=states[i].y,
                    x_next=states[i + 1].x,
                    y_next=states[i + 1].y,
                    y_prev=states[i - 1].y,
                ),
            )
            worst = min(worst, slack)
        assert worst < -1e-7

    def test_psi2_descent_negative_control(self):
        # for the smoothed method 10x the primal cap crosses the curvature
        # limit of the surrogate, so descent must visibly fail
        cfg0 = select_config("PerturbedSmoothedGda", 1.0, 1.0, 0.05, mode="GS")
        cfg = dataclasses.replace(cfg0, c=cfg0.c * 10.0)
        prob = gs_instance(r_y=cfg0.r_y)
        states = [eigen_init("PsgdaGS", 1.0, 1.0, 0.05, cfg0)]
        try:
            for _ in range(250):
                states.append(
                    step("PerturbedSmoothedGda", prob, cfg, states[-1])
                )
        except OracleError:
            pass  # divergence to overflow also counts against descent
        params = cfg.surrogate_params()
        worst = math.inf
        for cur, nxt in zip(states[:-1], states[1:]):
            worst = min(
                worst,
                bound_audit(
                    "Psi2Descent",
                    dict(
                        problem=prob,
                        params=params,
                        alpha=cfg.alpha,
                        c=cfg.c,
                        beta=cfg.beta,
                        x=cur.x,
                        y=cur.y,
                        z=cur.z,
                        x_next=nxt.x,
                        y_next=nxt.y,
                        z_next=nxt.z,
                    ),
                ),
            )
        assert worst < -1e-7

    def test_dual_err_ncsc_holds_along_run(self):
        prob, cfg, states = _psgda_trajectory(0.05, 40)
        params = cfg.surrogate_params()
        for cur in states:
            slack = bound_audit(
                "DualErrNCSC",
                dict(
                    problem=prob,
                    params=params,
                    alpha=cfg.alpha,
                    y=cur.y,
                    z=cur.z,
                ),
            )
            assert slack >= -1e-8 * max(1.0, abs(slack))

    def test_psi2_descent_holds_along_run(self):
        prob, cfg, states = _psgda_trajectory(0.05, 40)
        params = cfg.surrogate_params()
        for cur, nxt in zip(states[:-1], states[1:]):
            slack = bound_audit(
                "Psi2Descent",
                dict(
                    problem=prob,
                    params=params,
                    alpha=cfg.alpha,
                    c=cfg.c,
                    beta=cfg.beta,
                    x=cur.x,
                    y=cur.y,
                    z=cur.z,
                    x_next=nxt.x,
                    y_next=nxt.y,
                    z_next=nxt.z,
                ),
            )
            assert slack >= -1e-7 * max(1.0, abs(slack))

    def test_gs_to_os_at_random_feasible_points(self, rng):
        prob = os_instance()
        for _ in range(100):
            x = np.array([rng.uniform(-0.95, 0.95)])
            y = np.array([rng.uniform(0.0, 1.0)])
            slack = bound_audit("GsToOs", dict(problem=prob, x=x, y=y))
            assert slack >= -1e-8 * max(1.0, abs(slack))

    def test_gs_to_os_on_piecewise_instance(self, rng):
        prob = gs_instance(r_y=0.05)
        x_bar = 0.05 * 1.0 / math.sqrt(0.15)
        for _ in range(40):
            x = np.array([rng.uniform(0.0, x_bar)])
            y = np.array([rng.uniform(0.0, 1.0)])
            slack = bound_audit("GsToOs", dict(problem=prob, x=x, y=y))
            assert slack >= -1e-8 * max(1.0, abs(slack))

    def test_p_descent_needs_error_or_budget(self):
        prob = gs_instance(r_y=0.05)
        ctx = dict(
            problem=prob,
            params=SurrogateParams(4.0, 0.05),
            beta=0.5,
            z=np.array([0.1]),
            z_next=np.array([0.09]),
        )
        with pytest.raises(ConfigError, match="x_next.*delta"):
            bound_audit("PDescent", ctx)

    def test_p_descent_holds_along_outer_steps(self):
        prob = gs_instance(r_y=0.05)
        params = SurrogateParams(r_x=4.0, r_y=0.05)
        beta, delta = 0.5, 1e-10
        z = np.array([0.1])
        for _ in range(12):
            sol = inner_scsc(prob, params, z, delta)
            zn = z + beta * (sol.x - z)
            slack = bound_audit(
                "PDescent",
                dict(
                    problem=prob,
                    params=params,
                    beta=beta,
                    z=z,
                    z_next=zn,
                    x_next=sol.x,
                    delta=delta,
                ),
            )
            assert slack >= -1e-9 * max(1.0, abs(slack))
            z = zn

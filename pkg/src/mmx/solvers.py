"""First-order minimax solvers and their step-size selectors.

Single-loop methods (projected GDA on the perturbed or smoothed-surrogate
objective, plus a two-timescale baseline) advance via step()/run(); the
double-loop method couples a certified strongly-convex-strongly-concave
inner solver with a proximal-center update and lives in foam_run().
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, NamedTuple

import numpy as np

from .core import (
    ConfigError,
    IterateState,
    MinimaxProblem,
    OracleError,
    SurrogateParams,
    Vec,
    as_vec,
    project,
)
from .spectral import omega as _omega
from .stationarity import (
    StationarityReport,
    gs_residual,
    os_residual,
    stationarity_report,
)

ALGORITHMS = (
    "TsGda",
    "PerturbedGda",
    "SmoothedGda",
    "PerturbedSmoothedGda",
    "PerturbedSmoothedFoam",
)
MODES = ("GS", "OS")

# Iteration cap of the certified inner saddle solver.
_INNER_CAP = 10_000_000

# Fixed two-timescale separation of the baseline: alpha/c = 16*ell^2.
_TSGDA_RATIO = 16.0


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    """Complete parameterization of one solver run.

    omega is the derived dual-drift constant of the smoothed analysis; it
    is 0.0 for algorithms whose conditions never reference it.  delta is
    the inner-solve accuracy (double-loop only).  epsilon = 0 disables the
    metric stop so max_iters alone bounds the run.
    """

    algorithm: str
    c: float
    alpha: float
    beta: float = 0.0
    r_x: float = 0.0
    r_y: float = 0.0
    delta: float = 0.0
    epsilon: float = 0.0
    mode: str = "GS"
    max_iters: int = 10_000_000
    seed: int = 0
    omega: float = 0.0

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; known: "
                + ", ".join(ALGORITHMS)
            )
        if self.mode not in MODES:
            raise ConfigError(f"mode must be GS or OS, got {self.mode!r}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ConfigError(f"c must be > 0, got {self.c}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        for name in ("beta", "r_x", "r_y", "delta", "omega"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be finite and >= 0, got {v}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ConfigError(
                f"epsilon must lie in [0, 1) on a config, got {self.epsilon}"
            )
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be >= 0, got {self.max_iters}")

    def surrogate_params(self) -> SurrogateParams:
        smoothed = self.algorithm in (
            "SmoothedGda",
            "PerturbedSmoothedGda",
            "PerturbedSmoothedFoam",
        )
        return SurrogateParams(
            r_x=self.r_x if smoothed else 0.0, r_y=self.r_y
        )


def _check_caps(checks: list[tuple[str, float, float]]) -> None:
    # inclusive comparisons: equality at a cap is Condition-compliant
    for name, lhs, cap in checks:
        if lhs > cap * (1.0 + 1e-12) + 1e-300:
            raise ConfigError(
                f"step-size inequality violated: {name} "
                f"(value {lhs:.9g} exceeds cap {cap:.9g})"
            )


def validate_config(cfg: SolverConfig, ell: float, d_y: float) -> None:
    """Re-check every step-size inequality of cfg's algorithm, or raise.

    Raises ConfigError naming the violated inequality.
    """
    if ell <= 0.0 or d_y <= 0.0:
        raise ConfigError(f"need ell > 0 and d_y > 0, got {ell}, {d_y}")
    a = cfg.algorithm
    if a == "TsGda":
        _check_caps(
            [
                ("c <= alpha (two-timescale separation)", cfg.c, cfg.alpha),
                ("alpha <= 1/(4*ell)", cfg.alpha, 1.0 / (4.0 * ell)),
            ]
        )
        return
    if a == "PerturbedGda":
        if cfg.r_y <= 0.0:
            raise ConfigError(
                "step-size inequality violated: r_y > 0 (dual perturbation "
                "is required)"
            )
        r_y = cfg.r_y
        _check_caps(
            [
                (
                    "alpha <= 1/(4*(ell + r_y))",
                    cfg.alpha,
                    1.0 / (4.0 * (ell + r_y)),
                ),
                (
                    "c <= r_y^2*alpha/(16*ell^2)",
                    cfg.c,
                    r_y * r_y * cfg.alpha / (16.0 * ell * ell),
                ),
                (
                    "c <= r_y/(ell*(3*r_y + 2*ell))",
                    cfg.c,
                    r_y / (ell * (3.0 * r_y + 2.0 * ell)),
                ),
            ]
        )
        return
    if a in ("SmoothedGda", "PerturbedSmoothedGda"):
        r_x = cfg.r_x
        if r_x <= ell:
            raise ConfigError(
                "step-size inequality violated: r_x > ell (surrogate "
                "strong convexity)"
            )
        if a == "SmoothedGda" and cfg.r_y != 0.0:
            raise ConfigError(
                "step-size inequality violated: r_y = 0 for the "
                "unperturbed smoothed method"
            )
        if a == "PerturbedSmoothedGda" and cfg.r_y <= 0.0:
            raise ConfigError(
                "step-size inequality violated: r_y > 0 (dual perturbation "
                "is required)"
            )
        checks = [
            ("c <= 1/(r_x + ell)", cfg.c, 1.0 / (r_x + ell)),
            ("alpha <= 1/(11*ell)", cfg.alpha, 1.0 / (11.0 * ell)),
            (
                "alpha <= c^2*(r_x - ell)^2/(4*ell*(1 + c*(r_x - ell))^2)",
                cfg.alpha,
                cfg.c**2
                * (r_x - ell) ** 2
                / (4.0 * ell * (1.0 + cfg.c * (r_x - ell)) ** 2),
            ),
            ("beta <= 1/36", cfg.beta, 1.0 / 36.0),
            (
                "beta <= (r_x - ell)^2/(384*r_x*(r_x + ell)^2)",
                cfg.beta,
                (r_x - ell) ** 2 / (384.0 * r_x * (r_x + ell) ** 2),
            ),
        ]
        if a == "PerturbedSmoothedGda":
            w = _omega(ell, r_x, cfg.r_y, cfg.alpha)
            checks.append(
                (
                    "beta <= 1/(384*r_x*alpha*omega^2)",
                    cfg.beta,
                    1.0 / (384.0 * r_x * cfg.alpha * w * w),
                )
            )
            checks.append(("beta <= r_y/ell", cfg.beta, cfg.r_y / ell))
        if cfg.beta <= 0.0:
            raise ConfigError(
                "step-size inequality violated: beta > 0 (proximal-center "
                "step is required)"
            )
        _check_caps(checks)
        return
    # PerturbedSmoothedFoam
    if cfg.r_x <= 3.0 * ell:
        raise ConfigError(
            "step-size inequality violated: r_x > 3*ell (double-loop "
            "surrogate curvature)"
        )
    if cfg.r_y <= 0.0:
        raise ConfigError(
            "step-size inequality violated: r_y > 0 (dual perturbation is "
            "required)"
        )
    if not 0.0 < cfg.beta < 1.0:
        raise ConfigError(
            "step-size inequality violated: 0 < beta < 1 (proximal-center "
            "averaging)"
        )
    if cfg.delta <= 0.0:
        raise ConfigError(
            "step-size inequality violated: delta > 0 (inner accuracy)"
        )
    _check_caps(
        [
            (
                "delta <= r_y^4*d_y^2/ell^4",
                cfg.delta,
                cfg.r_y**4 * d_y * d_y / ell**4,
            ),
            (
                "alpha <= 1/(r_x + ell)",
                cfg.alpha,
                1.0 / (cfg.r_x + ell),
            ),
            ("c <= 1/(r_y + ell)", cfg.c, 1.0 / (cfg.r_y + ell)),
        ]
    )


def select_config(
    algorithm: str,
    ell: float,
    d_y: float,
    epsilon: float,
    mode: str = "GS",
    max_iters: int = 10_000_000,
    seed: int = 0,
) -> SolverConfig:
    """Derive a Condition-compliant configuration for a target accuracy.

    Order constants are fixed to 1 and then clipped by every explicit
    cap; the result is re-validated and a ConfigError names the first
    violated inequality if the caps are mutually unsatisfiable.
    """
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm {algorithm!r}; known: " + ", ".join(ALGORITHMS)
        )
    if mode not in MODES:
        raise ConfigError(f"mode must be GS or OS, got {mode!r}")
    if not (ell > 0.0 and d_y > 0.0):
        raise ConfigError(f"need ell > 0 and d_y > 0, got {ell}, {d_y}")
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {epsilon}")
    r_y_gs = epsilon / d_y
    r_y_os = epsilon * epsilon / (ell * d_y * d_y)
    r_y = r_y_gs if mode == "GS" else r_y_os

    if algorithm == "TsGda":
        alpha = 1.0 / (4.0 * ell)
        # the timescale ratio is stated for ell ~ 1; the separation cap
        # c <= alpha clips it for small curvature
        cfg = SolverConfig(
            algorithm=algorithm,
            c=min(alpha / (_TSGDA_RATIO * ell * ell), alpha),
            alpha=alpha,
            epsilon=epsilon,
            mode=mode,
            max_iters=max_iters,
            seed=seed,
        )
    elif algorithm == "PerturbedGda":
        alpha = 1.0 / (4.0 * (ell + r_y))
        c = min(
            r_y * r_y * alpha / (16.0 * ell * ell),
            r_y / (ell * (3.0 * r_y + 2.0 * ell)),
        )
        cfg = SolverConfig(
            algorithm=algorithm,
            c=c,
            alpha=alpha,
            r_y=r_y,
            epsilon=epsilon,
            mode=mode,
            max_iters=max_iters,
            seed=seed,
        )
    elif algorithm in ("SmoothedGda", "PerturbedSmoothedGda"):
        r_x = 4.0 * ell
        c = 0.9 / (r_x + ell)
        alpha = min(
            1.0 / (11.0 * ell),
            c * c * (r_x - ell) ** 2
            / (4.0 * ell * (1.0 + c * (r_x - ell)) ** 2),
        )
        beta_static = min(
            1.0 / 36.0, (r_x - ell) ** 2 / (384.0 * r_x * (r_x + ell) ** 2)
        )
        if algorithm == "SmoothedGda":
            w = 0.0
            beta = min(epsilon * epsilon / (ell * ell * d_y * d_y), beta_static)
            r_y_used = 0.0
        else:
            w = _omega(ell, r_x, r_y, alpha)
            beta = min(
                beta_static,
                1.0 / (384.0 * r_x * alpha * w * w),
                r_y / ell,
            )
            r_y_used = r_y
        cfg = SolverConfig(
            algorithm=algorithm,
            c=c,
            alpha=alpha,
            beta=beta,
            r_x=r_x,
            r_y=r_y_used,
            epsilon=epsilon,
            mode=mode,
            max_iters=max_iters,
            seed=seed,
            omega=w,
        )
    else:  # PerturbedSmoothedFoam
        r_x = 4.0 * ell
        delta = r_y**4 * d_y * d_y / ell**4
        cfg = SolverConfig(
            algorithm=algorithm,
            c=0.9 / (r_y + ell),
            alpha=0.9 / (r_x + ell),
            beta=0.5,
            r_x=r_x,
            r_y=r_y,
            delta=delta,
            epsilon=epsilon,
            mode=mode,
            max_iters=max_iters,
            seed=seed,
        )
    validate_config(cfg, ell, d_y)
    return cfg


# ---------------------------------------------------------------------------
# Single-loop stepping
# ---------------------------------------------------------------------------


def _finite_or_raise(g: Vec, which: str, state: IterateState) -> None:
    if not np.all(np.isfinite(g)):
        raise OracleError(
            f"non-finite {which} gradient at t={state.t}: "
            f"x={state.x!r}, y={state.y!r}, z={state.z!r}"
        )


def initial_state(problem: MinimaxProblem, algorithm: str) -> IterateState:
    """Default start: projected origin, proximal center at x0."""
    x0 = project(problem.set_x, np.zeros(problem.dim_x))
    y0 = project(problem.set_y, np.zeros(problem.dim_y))
    z0 = (
        x0.copy()
        if algorithm
        in ("SmoothedGda", "PerturbedSmoothedGda", "PerturbedSmoothedFoam")
        else None
    )
    return IterateState(t=0, x=x0, y=y0, z=z0)


def step(
    algorithm: str,
    problem: MinimaxProblem,
    cfg: SolverConfig,
    state: IterateState,
) -> IterateState:
    """One iteration of a single-loop method.

    The dual update always consumes the freshly projected primal iterate
    except in the simultaneous two-timescale baseline.
    """
    if algorithm == "PerturbedSmoothedFoam":
        raise ConfigError(
            "PerturbedSmoothedFoam advances through foam_run, not step"
        )
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm {algorithm!r}; known: " + ", ".join(ALGORITHMS)
        )
    x, y, z = state.x, state.y, state.z
    if algorithm == "TsGda":
        gx = np.asarray(problem.grad_x(x, y), dtype=float)
        gy = np.asarray(problem.grad_y(x, y), dtype=float)
        _finite_or_raise(gx, "primal", state)
        _finite_or_raise(gy, "dual", state)
        xn = project(problem.set_x, x - cfg.c * gx)
        yn = project(problem.set_y, y + cfg.alpha * gy)
        zn = None
    elif algorithm == "PerturbedGda":
        gx = np.asarray(problem.grad_x(x, y), dtype=float)
        _finite_or_raise(gx, "primal", state)
        xn = project(problem.set_x, x - cfg.c * gx)
        gy = np.asarray(problem.grad_y(xn, y), dtype=float) - cfg.r_y * y
        _finite_or_raise(gy, "dual", state)
        yn = project(problem.set_y, y + cfg.alpha * gy)
        zn = None
    else:
        if z is None:
            raise ConfigError("state.z is required for smoothed algorithms")
        gx = np.asarray(problem.grad_x(x, y), dtype=float) + cfg.r_x * (x - z)
        _finite_or_raise(gx, "primal", state)
        xn = project(problem.set_x, x - cfg.c * gx)
        gy = np.asarray(problem.grad_y(xn, y), dtype=float) - cfg.r_y * y
        _finite_or_raise(gy, "dual", state)
        yn = project(problem.set_y, y + cfg.alpha * gy)
        zn = z + cfg.beta * (xn - z)
    return IterateState(
        t=state.t + 1,
        x=xn,
        y=yn,
        z=zn,
        last_step_x=float(np.linalg.norm(xn - x)),
        last_step_y=float(np.linalg.norm(yn - y)),
    )


# ---------------------------------------------------------------------------
# Traces and runs
# ---------------------------------------------------------------------------


@dataclass
class IterateTrace:
    """Record of one solver run.

    states holds every record_stride-th iterate plus always the last one;
    reports maps iteration index -> StationarityReport at audit strides.
    grad_calls counts individual gradient-oracle invocations.  wall_ms is
    wall-clock per phase and is excluded from byte-identity contracts.
    """

    config: SolverConfig
    states: list[IterateState] = field(default_factory=list)
    reports: list[tuple[int, StationarityReport]] = field(default_factory=list)
    grad_calls: int = 0
    wall_ms: dict[str, float] = field(default_factory=dict)
    final_metric: float = math.nan
    hit: bool = False
    diagnostics: dict[str, list[float]] = field(default_factory=dict)
    problem: MinimaxProblem | None = None

    def __post_init__(self) -> None:
        ts = [s.t for s in self.states]
        if ts != sorted(ts):
            raise ConfigError("trace states must be in increasing t order")


def _metric_fn(
    problem: MinimaxProblem,
    mode: str,
    os_region: tuple[float, float] | None,
) -> Callable[[IterateState], float]:
    if mode == "GS":

        def gs_metric(s: IterateState) -> float:
            gp, gd = gs_residual(problem, s.x, s.y)
            return max(gp, gd)

        return gs_metric

    def os_metric(s: IterateState) -> float:
        return os_residual(problem, s.x, region=os_region).value

    return os_metric


def run(
    algorithm: str,
    problem: MinimaxProblem,
    cfg: SolverConfig,
    init: IterateState | None = None,
    stop: Mapping[str, Any] | None = None,
    audit_stride: int = 0,
    record_stride: int = 1,
    os_region: tuple[float, float] | None = None,
) -> IterateTrace:
    """Iterate a single-loop method until the stop rule fires.

    Stops at the first recorded iterate (including the initial one) whose
    requested metric is <= epsilon, or after max_iters steps.  stop may
    override {"epsilon", "metric", "max_iters"} from cfg.  The metric
    oracle is evaluated once before iterating so an unsupported metric
    errors immediately.
    """
    if algorithm == "PerturbedSmoothedFoam":
        raise ConfigError(
            "PerturbedSmoothedFoam advances through foam_run, not run"
        )
    validate_config(cfg, problem.ell, problem.d_y)
    stop = dict(stop or {})
    epsilon = float(stop.get("epsilon", cfg.epsilon))
    metric = str(stop.get("metric", cfg.mode))
    max_iters = int(stop.get("max_iters", cfg.max_iters))
    if metric not in MODES:
        raise ConfigError(f"metric must be GS or OS, got {metric!r}")
    if record_stride < 1:
        raise ConfigError(f"record_stride must be >= 1, got {record_stride}")
    state = init if init is not None else initial_state(problem, algorithm)
    fn = _metric_fn(problem, metric, os_region)
    try:
        m = fn(state)
    except OracleError as exc:
        raise OracleError(
            f"stop metric {metric!r} unavailable for instance "
            f"{problem.name!r}: {exc}"
        ) from exc
    trace = IterateTrace(config=cfg, states=[state], problem=problem)
    audit_ms = 0.0
    t_start = time.perf_counter()
    if audit_stride > 0:
        a0 = time.perf_counter()
        trace.reports.append(
            (state.t, stationarity_report(problem, state.x, state.y,
                                          os_region=os_region))
        )
        audit_ms += (time.perf_counter() - a0) * 1e3
    steps = 0
    hit = epsilon > 0.0 and m <= epsilon
    while not hit and steps < max_iters:
        state = step(algorithm, problem, cfg, state)
        steps += 1
        trace.grad_calls += 2
        m = fn(state)
        hit = epsilon > 0.0 and m <= epsilon
        if hit or steps % record_stride == 0 or steps == max_iters:
            trace.states.append(state)
        if audit_stride > 0 and state.t % audit_stride == 0:
            a0 = time.perf_counter()
            trace.reports.append(
                (state.t, stationarity_report(problem, state.x, state.y,
                                              os_region=os_region))
            )
            audit_ms += (time.perf_counter() - a0) * 1e3
    if trace.states[-1].t != state.t:
        trace.states.append(state)
    trace.final_metric = m
    trace.hit = hit
    trace.wall_ms = {
        "solve": (time.perf_counter() - t_start) * 1e3 - audit_ms,
        "audit": audit_ms,
    }
    return trace


# ---------------------------------------------------------------------------
# Certified inner saddle solver
# ---------------------------------------------------------------------------


class InnerSolution(NamedTuple):
    """Certified saddle approximation: ||(x,y) - saddle||^2 <= certificate^2."""

    x: Vec
    y: Vec
    certificate: float
    grad_calls: int


InnerSolver = Callable[
    [MinimaxProblem, SurrogateParams, Any, float, "tuple[Vec, Vec] | None"],
    InnerSolution,
]


def inner_scsc(
    problem: MinimaxProblem,
    params: SurrogateParams,
    z: Any,
    delta: float,
    warm_start: tuple[Vec, Vec] | None = None,
) -> InnerSolution:
    """Projected extragradient on the surrogate saddle at center z.

    Returns as soon as the fixed-point certificate guarantees
    ||x - x*||^2 + ||y - y*||^2 <= delta.  The engine is replaceable:
    only this certificate is contractual.
    """
    ell = problem.ell
    if params.r_x <= ell:
        raise ConfigError("surrogate not strongly convex")
    if params.r_y <= 0.0:
        raise ConfigError("inner saddle solver needs r_y > 0")
    if not delta > 0.0:
        raise ConfigError(f"delta must be > 0, got {delta}")
    zv = as_vec(z, problem.dim_x)
    mu = min(params.r_x - ell, params.r_y)
    l_g = params.r_x + params.r_y + 2.0 * ell
    eta = 1.0 / (2.0 * l_g)
    kappa = (1.0 + eta * l_g) / (eta * mu)
    if warm_start is not None:
        x = project(problem.set_x, np.asarray(warm_start[0], dtype=float))
        y = project(problem.set_y, np.asarray(warm_start[1], dtype=float))
    else:
        x = project(problem.set_x, zv)
        y = project(problem.set_y, np.zeros(problem.dim_y))
    calls = 0
    best = math.inf
    target = math.sqrt(delta)
    for _ in range(_INNER_CAP):
        gx = np.asarray(problem.grad_x(x, y), dtype=float) + params.r_x * (
            x - zv
        )
        gy = np.asarray(problem.grad_y(x, y), dtype=float) - params.r_y * y
        calls += 2
        if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
            raise OracleError(
                f"non-finite surrogate gradient at x={x!r}, y={y!r}"
            )
        xh = project(problem.set_x, x - eta * gx)
        yh = project(problem.set_y, y + eta * gy)
        cert = kappa * math.hypot(
            float(np.linalg.norm(x - xh)), float(np.linalg.norm(y - yh))
        )
        best = min(best, cert)
        if cert <= target:
            return InnerSolution(x, y, cert, calls)
        gx = np.asarray(problem.grad_x(xh, yh), dtype=float) + params.r_x * (
            xh - zv
        )
        gy = np.asarray(problem.grad_y(xh, yh), dtype=float) - params.r_y * yh
        calls += 2
        x = project(problem.set_x, x - eta * gx)
        y = project(problem.set_y, y + eta * gy)
    err = OracleError(
        f"inner saddle solver hit the {_INNER_CAP}-iteration cap; best "
        f"certificate {best:.3e} > target {target:.3e}"
    )
    err.certificate = best  # type: ignore[attr-defined]
    raise err


# ---------------------------------------------------------------------------
# Double-loop method
# ---------------------------------------------------------------------------


def foam_run(
    problem: MinimaxProblem,
    cfg: SolverConfig,
    init: IterateState | None = None,
    audit_stride: int = 0,
    os_region: tuple[float, float] | None = None,
    inner: InnerSolver | None = None,
) -> tuple[IterateTrace, tuple[Vec, Vec, StationarityReport]]:
    """Outer proximal-center loop over a certified inner saddle solver.

    Each outer iteration solves the surrogate saddle at the current
    center to delta accuracy, then moves the center toward the inner
    primal solution.  The center with the smallest estimated envelope
    gradient r_x*||z_t - x_{t+1}|| is selected (the estimate is within
    r_x*sqrt(delta) of the truth, which blurs ties by at most twice
    that), and one simultaneous projected gradient step from its inner
    solution produces the reported pair.

    Stops early once the estimated envelope gradient falls below
    epsilon/4 (disabled when cfg.epsilon = 0).

    inner replaces the inner engine; any callable honoring the
    InnerSolution certificate contract is admissible, which is how the
    outer loop's guarantees are exercised against oracles that deliver
    no more accuracy than delta.
    """
    if cfg.algorithm != "PerturbedSmoothedFoam":
        raise ConfigError(
            f"foam_run drives PerturbedSmoothedFoam, got {cfg.algorithm!r}"
        )
    validate_config(cfg, problem.ell, problem.d_y)
    params = SurrogateParams(r_x=cfg.r_x, r_y=cfg.r_y)
    state = (
        init
        if init is not None
        else initial_state(problem, "PerturbedSmoothedFoam")
    )
    if state.z is None:
        raise ConfigError("state.z is required for the double-loop method")
    trace = IterateTrace(config=cfg, states=[state], problem=problem)
    inner_ms = 0.0
    audit_ms = 0.0
    t_start = time.perf_counter()
    stop_theta = cfg.epsilon / 4.0 if cfg.epsilon > 0.0 else 0.0
    best_est = math.inf
    best_snapshot: tuple[Vec, Vec, Vec] | None = None
    for t in range(cfg.max_iters):
        i0 = time.perf_counter()
        solve = inner_scsc if inner is None else inner
        try:
            x1, y1, cert, calls = solve(
                problem, params, state.z, cfg.delta, (state.x, state.y)
            )
        except OracleError as exc:
            raise OracleError(
                f"inner solver failed at outer iteration {t}: {exc}"
            ) from exc
        inner_ms += (time.perf_counter() - i0) * 1e3
        trace.grad_calls += calls
        est = cfg.r_x * float(np.linalg.norm(state.z - x1))
        # one extra x-gradient call per outer step: the surrogate primal
        # residual at the returned pair, a direct check on inner quality
        res = np.asarray(problem.grad_x(x1, y1), dtype=float) + cfg.r_x * (
            x1 - state.z
        )
        trace.grad_calls += 1
        trace.diagnostics.setdefault("foam_est", []).append(est)
        trace.diagnostics.setdefault("foam_inner_residual", []).append(
            float(np.linalg.norm(res))
        )
        if est < best_est:
            best_est = est
            best_snapshot = (x1, y1, state.z.copy())
        zn = state.z + cfg.beta * (x1 - state.z)
        state = IterateState(
            t=state.t + 1,
            x=x1,
            y=y1,
            z=zn,
            last_step_x=float(np.linalg.norm(x1 - trace.states[-1].x)),
            last_step_y=float(np.linalg.norm(y1 - trace.states[-1].y)),
        )
        trace.states.append(state)
        if audit_stride > 0 and state.t % audit_stride == 0:
            a0 = time.perf_counter()
            trace.reports.append(
                (state.t, stationarity_report(problem, state.x, state.y,
                                              os_region=os_region))
            )
            audit_ms += (time.perf_counter() - a0) * 1e3
        if stop_theta > 0.0 and est <= stop_theta:
            break
    if best_snapshot is None:
        # max_iters = 0: report the initial pair without a center step
        best_snapshot = (state.x, state.y, state.z)
    xb, yb, zb = best_snapshot
    gx = np.asarray(problem.grad_x(xb, yb), dtype=float) + cfg.r_x * (xb - zb)
    gy = np.asarray(problem.grad_y(xb, yb), dtype=float) - cfg.r_y * yb
    trace.grad_calls += 2
    alpha_hat = min(cfg.alpha, 1.0 / (cfg.r_x + problem.ell))
    c_hat = min(cfg.c, 1.0 / (cfg.r_y + problem.ell))
    x_hat = project(problem.set_x, xb - alpha_hat * gx)
    y_hat = project(problem.set_y, yb + c_hat * gy)
    a0 = time.perf_counter()
    report = stationarity_report(problem, x_hat, y_hat, os_region=os_region)
    audit_ms += (time.perf_counter() - a0) * 1e3
    trace.final_metric = report.gs if cfg.mode == "GS" else report.os
    trace.hit = cfg.epsilon > 0.0 and trace.final_metric <= cfg.epsilon
    trace.wall_ms = {
        "inner": inner_ms,
        "outer": (time.perf_counter() - t_start) * 1e3 - inner_ms - audit_ms,
        "audit": audit_ms,
    }
    return trace, (x_hat, y_hat, report)

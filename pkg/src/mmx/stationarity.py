"""Certified stationarity oracles, Lyapunov values, and inequality audits.

Every numeric routine returns an explicit error bound next to its answer;
nothing is reported as exact unless a closed-form oracle produced it.
Audits return the slack (RHS - LHS) of a named inequality so callers can
assert nonnegativity up to their own tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from .core import (
    Box,
    ConfigError,
    FullSpace,
    Interval,
    MinimaxProblem,
    OracleError,
    SurrogateParams,
    Vec,
    as_vec,
    f_tilde_value,
    normal_cone_residual,
    project,
    surrogate_value,
)
from .spectral import omega

LYAPUNOV_KINDS = ("Psi1", "Psi2", "PTilde")
INITIAL_GAP_KINDS = ("DeltaPsi1", "DeltaPsi2", "DeltaPTilde")
AUDIT_KINDS = (
    "DualErrPGDA",
    "DualErrNCSC",
    "GsToOs",
    "Psi1Descent",
    "Psi2Descent",
    "PDescent",
)

# Cap on certified fixed-point loops; linear convergence makes this generous.
_MAX_CERT_ITERS = 2_000_000


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """Output of a certified optimization oracle.

    points holds the optimizer(s); certified_error bounds the Euclidean
    distance from points[0] (and points jointly, for saddle results) to the
    true optimizer.  Analytic oracles report 0.  oracle_calls counts
    gradient evaluations spent.
    """

    points: tuple[Vec, ...]
    value: float
    certified_error: float
    oracle_calls: int

    def __post_init__(self) -> None:
        if not self.points:
            raise ConfigError("OracleResult needs at least one point")
        if not (self.certified_error >= 0.0):
            raise ConfigError(
                f"certified_error must be >= 0, got {self.certified_error}"
            )

    @property
    def point(self) -> Vec:
        return self.points[0]


@dataclass(frozen=True)
class StationarityReport:
    """Stationarity residuals of the original objective at one iterate.

    gs_primal / gs_dual are the two normal-cone residuals, gs their max.
    os is the proximal-displacement measure 2*ell*||prox(x) - x||, +inf
    when no certified proximal route exists for the instance.
    """

    gs_primal: float
    gs_dual: float
    gs: float
    os: float
    os_certified_slack: float

    def __post_init__(self) -> None:
        for name in ("gs_primal", "gs_dual", "gs", "os", "os_certified_slack"):
            v = getattr(self, name)
            if math.isnan(v) or v < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {v}")
        if self.gs != max(self.gs_primal, self.gs_dual):
            raise ConfigError("gs must equal max(gs_primal, gs_dual)")


@dataclass(frozen=True)
class InitialGapReport:
    """Initial optimality gap of a Lyapunov potential.

    kind names the potential; components holds the named scalars that were
    summed; method records whether every ingredient came from a closed
    form ("analytic") or at least one certified numeric solve ("numeric").
    """

    kind: str
    value: float
    components: dict[str, float]
    method: str

    def __post_init__(self) -> None:
        if self.kind not in INITIAL_GAP_KINDS:
            raise ConfigError(
                f"unknown initial-gap kind {self.kind!r}; known: "
                + ", ".join(INITIAL_GAP_KINDS)
            )
        if self.method not in ("analytic", "numeric"):
            raise ConfigError(f"method must be analytic|numeric, got {self.method!r}")


# ---------------------------------------------------------------------------
# Certified fixed-point loop (shared by the iterative oracle fallbacks)
# ---------------------------------------------------------------------------


def _certified_fixed_point(
    project: Callable[[Vec], Vec],
    step_grad: Callable[[Vec], Vec],
    w0: Vec,
    step: float,
    kappa: float,
    tol: float,
    what: str,
) -> tuple[Vec, float, int]:
    """Iterate w <- proj(w + step*grad(w)) until kappa*||w - w+|| <= tol.

    Returns (w, certified_distance, gradient_calls).  The certificate is
    valid for the returned (post-step) point because the step is a
    contraction toward the optimizer.
    """
    w = project(np.asarray(w0, dtype=float))
    calls = 0
    err = math.inf
    for _ in range(_MAX_CERT_ITERS):
        g = step_grad(w)
        calls += 1
        if not np.all(np.isfinite(g)):
            raise OracleError(f"{what}: non-finite gradient at {w!r}")
        w_next = project(w + step * g)
        err = kappa * float(np.linalg.norm(w - w_next))
        w = w_next
        if err <= tol:
            return w, err, calls
    raise OracleError(
        f"{what}: certificate {err:.3e} did not reach tol={tol:.3e} "
        f"within {_MAX_CERT_ITERS} iterations"
    )


# ---------------------------------------------------------------------------
# Best-response oracles
# ---------------------------------------------------------------------------


def inner_max(
    problem: MinimaxProblem, r_y: float, x: Any, tol: float = 1e-10
) -> OracleResult:
    """Maximize y -> f(x,y) - (r_y/2)||y||^2 over the dual set, certified.

    Uses the instance's closed form when present (certified_error 0);
    otherwise runs projected ascent, which needs r_y > 0 for its
    fixed-point certificate.
    """
    r_y = float(r_y)
    if r_y < 0.0:
        raise ConfigError(f"r_y must be >= 0, got {r_y}")
    xv = as_vec(x, problem.dim_x)
    prm = SurrogateParams(r_x=0.0, r_y=r_y)
    orc = problem.oracles
    if orc is not None and getattr(orc, "y_star", None) is not None:
        ys = as_vec(orc.y_star(prm, xv), problem.dim_y)
        val = float(getattr(orc, "phi_tilde")(prm, xv))
        return OracleResult((ys,), val, 0.0, 0)
    if r_y == 0.0:
        raise OracleError("merely concave dual; oracle unavailable")
    ell = problem.ell
    a = 1.0 / (ell + r_y)
    kappa = (1.0 + a * (ell + r_y)) / (a * r_y)

    def ascent(yv: Vec) -> Vec:
        return np.asarray(problem.grad_y(xv, yv), dtype=float) - r_y * yv

    y0 = project(problem.set_y, np.zeros(problem.dim_y))
    ys, err, calls = _certified_fixed_point(
        lambda w: project(problem.set_y, w), ascent, y0, a, kappa, tol, "inner_max"
    )
    val = f_tilde_value(problem, prm, xv, ys)
    return OracleResult((ys,), val, err, calls)


def prox_min(
    problem: MinimaxProblem,
    params: SurrogateParams,
    y: Any,
    z: Any,
    tol: float = 1e-10,
    alpha: float | None = None,
) -> OracleResult:
    """Minimize x -> F(x,y,z) over the primal set, certified.

    Requires r_x > ell so the objective is strongly convex.  When alpha is
    supplied, points also carries the ascent step taken from the returned
    minimizer: proj_Y(y + alpha * grad_y F(x_min, y, z)).
    """
    if params.r_x <= problem.ell:
        raise ConfigError("surrogate not strongly convex")
    yv = as_vec(y, problem.dim_y)
    zv = as_vec(z, problem.dim_x)
    orc = problem.oracles
    calls = 0
    if orc is not None and getattr(orc, "x_tilde", None) is not None:
        xt = as_vec(orc.x_tilde(params, yv, zv), problem.dim_x)
        val = float(getattr(orc, "d_tilde")(params, yv, zv))
        err = 0.0
    else:
        ell = problem.ell
        c0 = 1.0 / (params.r_x + ell)
        kappa = (1.0 + c0 * (ell + params.r_x)) / (c0 * (params.r_x - ell))

        def descent(xv: Vec) -> Vec:
            g = np.asarray(problem.grad_x(xv, yv), dtype=float)
            return g + params.r_x * (xv - zv)

        xt, err, calls = _certified_fixed_point(
            lambda w: project(problem.set_x, w),
            descent,
            zv,
            -c0,
            kappa,
            tol,
            "prox_min",
        )
        val = surrogate_value(problem, params, xt, yv, zv)
    if alpha is None:
        return OracleResult((xt,), val, err, calls)
    gy = np.asarray(problem.grad_y(xt, yv), dtype=float) - params.r_y * yv
    y_plus = project(problem.set_y, yv + float(alpha) * gy)
    return OracleResult((xt, y_plus), val, err, calls + 1)


def saddle_solve(
    problem: MinimaxProblem,
    params: SurrogateParams,
    z: Any,
    delta: float,
) -> OracleResult:
    """Solve the strongly-convex-strongly-concave surrogate saddle at z.

    Delegates to the certified inner solver; points = (x, y), value is the
    surrogate evaluated there, certified_error bounds the joint distance
    sqrt(||x-x*||^2 + ||y-y*||^2) <= sqrt(delta).
    """
    from .solvers import inner_scsc

    zv = as_vec(z, problem.dim_x)
    x, y, cert, calls = inner_scsc(problem, params, zv, delta)
    val = surrogate_value(problem, params, x, y, zv)
    return OracleResult((x, y), val, float(cert), calls)


# ---------------------------------------------------------------------------
# Stationarity residuals
# ---------------------------------------------------------------------------


def gs_residual(problem: MinimaxProblem, x: Any, y: Any) -> tuple[float, float]:
    """Normal-cone residuals (primal, dual) of the original objective.

    The primal residual is dist(0, grad_x f + N_X(x)); the dual residual
    is dist(0, -grad_y f + N_Y(y)).  Both on f itself, not a surrogate.
    """
    xv = as_vec(x, problem.dim_x)
    yv = as_vec(y, problem.dim_y)
    gx = np.asarray(problem.grad_x(xv, yv), dtype=float)
    gy = np.asarray(problem.grad_y(xv, yv), dtype=float)
    if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
        raise OracleError(f"non-finite gradient at x={xv!r}, y={yv!r}")
    gp = normal_cone_residual(problem.set_x, xv, gx)
    gd = normal_cone_residual(problem.set_y, yv, -gy)
    return gp, gd


def _phi_original(
    problem: MinimaxProblem, u: Vec, tol: float
) -> tuple[float, Vec, float]:
    """max_y f(u, y) with a certified dual point: (value, y, y_distance_err)."""
    orc = problem.oracles
    prm0 = SurrogateParams(0.0, 0.0)
    if orc is not None and getattr(orc, "y_star", None) is not None:
        ys = as_vec(orc.y_star(prm0, u), problem.dim_y)
        return float(getattr(orc, "phi_tilde")(prm0, u)), ys, 0.0
    if problem.dim_y == 1:
        sy = problem.set_y
        if isinstance(sy, Interval):
            lo, hi = sy.lo, sy.hi
        elif isinstance(sy, Box):
            lo, hi = float(sy.lower[0]), float(sy.upper[0])
        else:
            lo, hi = -sy.radius, sy.radius  # Ball in 1-D
        # golden section on a concave 1-D slice: certified by unimodality
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c1 = b - invphi * (b - a)
        c2 = a + invphi * (b - a)
        f1 = float(problem.f(u, np.array([c1])))
        f2 = float(problem.f(u, np.array([c2])))
        for _ in range(120):
            if b - a <= 1e-13 * (1.0 + abs(a) + abs(b)):
                break
            if f1 < f2:
                a, c1, f1 = c1, c2, f2
                c2 = a + invphi * (b - a)
                f2 = float(problem.f(u, np.array([c2])))
            else:
                b, c2, f2 = c2, c1, f1
                c1 = b - invphi * (b - a)
                f1 = float(problem.f(u, np.array([c1])))
        ym = np.array([0.5 * (a + b)])
        return float(problem.f(u, ym)), ym, 0.5 * (b - a)
    raise OracleError(
        "dual maximizer oracle unavailable: no closed form and dim_y > 1"
    )


def os_residual(
    problem: MinimaxProblem,
    x: Any,
    tol: float = 1e-8,
    region: tuple[float, float] | None = None,
    use_analytic: bool = True,
) -> OracleResult:
    """Proximal-displacement stationarity 2*ell*||prox(x) - x||, certified.

    prox is the minimizer of psi(u) = max_y f(u,y) + ell*||u - x||^2,
    which is ell-strongly convex.  With use_analytic the instance's closed
    form is used when available; the numeric route needs dim_x <= 2 and a
    bounded search region (argument, or the instance's advertised one).
    certified_error bounds ||returned prox - true prox||.
    """
    xv = as_vec(x, problem.dim_x)
    ell = problem.ell
    orc = problem.oracles
    if (
        use_analytic
        and orc is not None
        and getattr(orc, "moreau_prox", None) is not None
    ):
        u = as_vec(orc.moreau_prox(xv), problem.dim_x)
        val = 2.0 * ell * float(np.linalg.norm(u - xv))
        return OracleResult((u,), val, 0.0, 0)
    if problem.dim_x > 2:
        raise OracleError("numeric Moreau prox supported only for dim_x <= 2")
    if region is None and orc is not None:
        region = getattr(orc, "prox_region", None)
    if region is None:
        sx = problem.set_x
        if isinstance(sx, Box):
            region = (float(np.min(sx.lower)), float(np.max(sx.upper)))
        elif isinstance(sx, Interval):
            region = (sx.lo, sx.hi)
        elif isinstance(sx, FullSpace):
            raise OracleError(
                "numeric Moreau prox needs a bounded search region"
            )
        else:
            region = (
                float(np.min(sx.center)) - sx.radius,
                float(np.max(sx.center)) + sx.radius,
            )
    lo, hi = float(region[0]), float(region[1])
    if not lo < hi:
        raise ConfigError(f"empty search region ({lo}, {hi})")

    calls = 0
    y_err_last = 0.0

    def psi(u: Vec) -> float:
        nonlocal calls, y_err_last
        val, _, y_err = _phi_original(problem, u, tol)
        y_err_last = y_err
        calls += 1
        d = u - xv
        return val + ell * float(np.dot(d, d))

    if problem.dim_x == 1:
        grid = np.linspace(lo, hi, 2049)
        vals = [psi(np.array([g])) for g in grid]
        k = int(np.argmin(vals))
        a = grid[max(k - 1, 0)]
        b = grid[min(k + 1, len(grid) - 1)]
        # psi is strongly convex, hence unimodal: golden section certifies
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c1 = b - invphi * (b - a)
        c2 = a + invphi * (b - a)
        f1 = psi(np.array([c1]))
        f2 = psi(np.array([c2]))
        for _ in range(90):
            if b - a <= 1e-13 * (1.0 + abs(a) + abs(b)):
                break
            if f1 > f2:
                a, c1, f1 = c1, c2, f2
                c2 = a + invphi * (b - a)
                f2 = psi(np.array([c2]))
            else:
                b, c2, f2 = c2, c1, f1
                c1 = b - invphi * (b - a)
                f1 = psi(np.array([c1]))
        u = np.array([0.5 * (a + b)])
    else:
        n = 41
        gx = np.linspace(lo, hi, n)
        gy = np.linspace(lo, hi, n)
        best = None
        best_v = math.inf
        for ux in gx:
            for uy in gy:
                v = psi(np.array([ux, uy]))
                if v < best_v:
                    best_v, best = v, np.array([ux, uy])
        span = (hi - lo) / (n - 1)
        u = best
        for _ in range(30):
            improved = False
            for du in (
                (span, 0.0),
                (-span, 0.0),
                (0.0, span),
                (0.0, -span),
                (span, span),
                (-span, -span),
                (span, -span),
                (-span, span),
            ):
                cand = u + np.asarray(du)
                v = psi(cand)
                if v < best_v:
                    best_v, u = v, cand
                    improved = True
            if not improved:
                span *= 0.35
                if span < 1e-12:
                    break

    # strong convexity of psi (modulus ell): ||u - u*|| <= ||subgrad||/ell
    _, y_at_u, y_err = _phi_original(problem, u, tol)
    g = np.asarray(problem.grad_x(u, y_at_u), dtype=float) + 2.0 * ell * (u - xv)
    cert = (float(np.linalg.norm(g)) + ell * y_err) / ell
    val = 2.0 * ell * float(np.linalg.norm(u - xv))
    return OracleResult((u,), val, cert, calls)


def stationarity_report(
    problem: MinimaxProblem,
    x: Any,
    y: Any,
    tol: float = 1e-8,
    os_region: tuple[float, float] | None = None,
) -> StationarityReport:
    """Assemble both stationarity measures at (x, y).

    When the instance offers no certified proximal route, os (and its
    slack) are +inf: honest "not certified below any level".
    """
    gp, gd = gs_residual(problem, x, y)
    try:
        os_res = os_residual(problem, x, tol=tol, region=os_region)
        os_val = os_res.value
        os_slack = 2.0 * problem.ell * os_res.certified_error
    except OracleError:
        os_val = math.inf
        os_slack = math.inf
    return StationarityReport(
        gs_primal=gp,
        gs_dual=gd,
        gs=max(gp, gd),
        os=os_val,
        os_certified_slack=os_slack,
    )


# ---------------------------------------------------------------------------
# Lyapunov potentials
# ---------------------------------------------------------------------------


def _p_tilde(
    problem: MinimaxProblem,
    params: SurrogateParams,
    z: Vec,
    tol: float,
    delta: float | None = None,
) -> tuple[float, bool, int]:
    """(p(z), analytic?, calls): value of the smoothed primal envelope."""
    orc = problem.oracles
    if orc is not None and getattr(orc, "p_tilde", None) is not None:
        return float(getattr(orc, "p_tilde")(params, z)), True, 0
    if delta is None:
        delta = max(tol * tol, 1e-18)
    res = saddle_solve(problem, params, z, delta)
    return res.value, False, res.oracle_calls


def lyapunov(
    problem: MinimaxProblem,
    params: SurrogateParams,
    cfg: Any,
    kind: str,
    state: Any,
    tol: float = 1e-10,
) -> float:
    """Evaluate a solver potential at an iterate.

    Psi1   = 2*max_y f_perturbed(x, .) - f_perturbed(x, y)
    Psi2   = F(x,y,z) - 2*min_x F(.,y,z) + 2*p(z)
    PTilde = p(z)

    cfg (optional, may be None) contributes only cfg.delta as the inner
    accuracy for numeric saddle solves.
    """
    if kind not in LYAPUNOV_KINDS:
        raise ConfigError(
            f"unknown lyapunov kind {kind!r}; known: " + ", ".join(LYAPUNOV_KINDS)
        )
    xv = as_vec(state.x, problem.dim_x)
    yv = as_vec(state.y, problem.dim_y)
    if kind == "Psi1":
        phi = inner_max(problem, params.r_y, xv, tol=tol)
        return 2.0 * phi.value - f_tilde_value(problem, params, xv, yv)
    z = getattr(state, "z", None)
    if z is None:
        raise ConfigError(f"state.z is required for {kind}")
    zv = as_vec(z, problem.dim_x)
    delta = getattr(cfg, "delta", None) if cfg is not None else None
    p_val, _, _ = _p_tilde(problem, params, zv, tol, delta)
    if kind == "PTilde":
        return p_val
    f_sur = surrogate_value(problem, params, xv, yv, zv)
    d_val = prox_min(problem, params, yv, zv, tol=tol).value
    return f_sur - 2.0 * d_val + 2.0 * p_val


# ---------------------------------------------------------------------------
# Initial gaps
# ---------------------------------------------------------------------------


def _minmax_tilde(
    problem: MinimaxProblem, params: SurrogateParams, tol: float
) -> tuple[float, bool]:
    """(min_x max_y of the perturbed objective, analytic?)."""
    orc = problem.oracles
    if orc is not None and getattr(orc, "minmax_tilde", None) is not None:
        return float(getattr(orc, "minmax_tilde")(params)), True
    if problem.dim_x > 2:
        raise OracleError(
            "numeric min-max fallback supported only for dim_x <= 2"
        )
    sx = problem.set_x
    if isinstance(sx, Box):
        los, his = np.asarray(sx.lower, float), np.asarray(sx.upper, float)
    elif isinstance(sx, Interval):
        los, his = np.array([sx.lo]), np.array([sx.hi])
    elif orc is not None and getattr(orc, "prox_region", None) is not None:
        lo, hi = getattr(orc, "prox_region")
        los = np.full(problem.dim_x, float(lo))
        his = np.full(problem.dim_x, float(hi))
    else:
        raise OracleError(
            "global min-max unavailable: x-domain unbounded and no "
            "analytic oracle"
        )

    def phi(u: Vec) -> float:
        return inner_max(problem, params.r_y, u, tol=tol).value

    # shrinking-grid refinement; the envelope may be nonconvex, so a fine
    # first pass does the global work and zooming polishes
    if problem.dim_x == 1:
        pts = np.linspace(los[0], his[0], 4097)
        vals = [phi(np.array([p])) for p in pts]
        k = int(np.argmin(vals))
        a, b = pts[max(k - 1, 0)], pts[min(k + 1, 4096)]
        best = vals[k]
        for _ in range(40):
            pts = np.linspace(a, b, 17)
            vals = [phi(np.array([p])) for p in pts]
            k = int(np.argmin(vals))
            best = min(best, vals[k])
            a, b = pts[max(k - 1, 0)], pts[min(k + 1, 16)]
            if b - a <= 1e-13 * (1.0 + abs(a) + abs(b)):
                break
        return best, False
    n = 65
    g0 = np.linspace(los[0], his[0], n)
    g1 = np.linspace(los[1], his[1], n)
    best = math.inf
    arg = None
    for u0 in g0:
        for u1 in g1:
            v = phi(np.array([u0, u1]))
            if v < best:
                best, arg = v, np.array([u0, u1])
    span = max(float(his[0] - los[0]), float(his[1] - los[1])) / (n - 1)
    u = arg
    for _ in range(60):
        improved = False
        for du in (
            (span, 0.0),
            (-span, 0.0),
            (0.0, span),
            (0.0, -span),
        ):
            cand = np.clip(u + np.asarray(du), los, his)
            v = phi(cand)
            if v < best:
                best, u = v, cand
                improved = True
        if not improved:
            span *= 0.4
            if span < 1e-11:
                break
    return best, False


def initial_gap(
    problem: MinimaxProblem,
    params: SurrogateParams,
    cfg: Any,
    kind: str,
    state0: Any,
    tol: float = 1e-8,
) -> InitialGapReport:
    """Gap between a potential at the start point and the global min-max.

    DeltaPsi1 adds the start-up dual-mismatch term 4*ell^2*c*||y*(x0)-y0||^2
    and therefore requires cfg.c.  A gap more negative than -tol (scaled)
    is an oracle inconsistency and raises.
    """
    if kind not in INITIAL_GAP_KINDS:
        raise ConfigError(
            f"unknown initial-gap kind {kind!r}; known: "
            + ", ".join(INITIAL_GAP_KINDS)
        )
    mm, mm_analytic = _minmax_tilde(problem, params, tol)
    analytic = mm_analytic
    components: dict[str, float] = {}
    if kind == "DeltaPsi1":
        c = getattr(cfg, "c", None) if cfg is not None else None
        if c is None:
            raise ConfigError("initial-gap kind 'DeltaPsi1' requires cfg.c")
        xv = as_vec(state0.x, problem.dim_x)
        yv = as_vec(state0.y, problem.dim_y)
        phi = inner_max(problem, params.r_y, xv, tol=tol)
        analytic = analytic and phi.certified_error == 0.0
        psi1 = 2.0 * phi.value - f_tilde_value(problem, params, xv, yv)
        mismatch = float(np.linalg.norm(phi.point - yv))
        ell = problem.ell
        dual_term = 4.0 * ell * ell * float(c) * mismatch * mismatch
        components["psi1"] = psi1
        components["dual_mismatch_term"] = dual_term
        components["minmax_tilde"] = mm
        value = psi1 + dual_term - mm
    elif kind == "DeltaPsi2":
        z = getattr(state0, "z", None)
        if z is None:
            raise ConfigError("state0.z is required for DeltaPsi2")
        orc = problem.oracles
        analytic = analytic and orc is not None and (
            getattr(orc, "p_tilde", None) is not None
            and getattr(orc, "x_tilde", None) is not None
        )
        psi2 = lyapunov(problem, params, cfg, "Psi2", state0, tol=tol)
        components["psi2"] = psi2
        components["minmax_tilde"] = mm
        value = psi2 - mm
    else:
        z = getattr(state0, "z", None)
        if z is None:
            raise ConfigError("state0.z is required for DeltaPTilde")
        zv = as_vec(z, problem.dim_x)
        delta = getattr(cfg, "delta", None) if cfg is not None else None
        p_val, p_analytic, _ = _p_tilde(problem, params, zv, tol, delta)
        analytic = analytic and p_analytic
        components["p_tilde"] = p_val
        components["minmax_tilde"] = mm
        value = p_val - mm
    if value < -tol * (1.0 + abs(mm)):
        raise OracleError(
            f"negative initial gap for {kind}: {value:.3e}; "
            "oracles are inconsistent"
        )
    return InitialGapReport(
        kind=kind,
        value=value,
        components=components,
        method="analytic" if analytic else "numeric",
    )


# ---------------------------------------------------------------------------
# Inequality audits
# ---------------------------------------------------------------------------

_AUDIT_FIELDS: dict[str, tuple[str, ...]] = {
    "DualErrPGDA": ("problem", "params", "alpha", "x", "y", "y_prev"),
    "DualErrNCSC": ("problem", "params", "alpha", "y", "z"),
    "GsToOs": ("problem", "x", "y"),
    "Psi1Descent": (
        "problem",
        "params",
        "alpha",
        "c",
        "x",
        "y",
        "x_next",
        "y_next",
    ),
    "Psi2Descent": (
        "problem",
        "params",
        "alpha",
        "c",
        "beta",
        "x",
        "y",
        "z",
        "x_next",
        "y_next",
        "z_next",
    ),
    "PDescent": ("problem", "params", "beta", "z", "z_next"),
}


class _Ctx:
    """Validated audit context with attribute access."""

    def __init__(self, kind: str, ctx: Mapping[str, Any]):
        missing = [f for f in _AUDIT_FIELDS[kind] if f not in ctx]
        if missing:
            raise ConfigError(
                f"audit kind {kind!r}: missing context fields "
                + ", ".join(repr(m) for m in missing)
            )
        self._ctx = ctx

    def __getattr__(self, name: str) -> Any:
        try:
            return self._ctx[name]
        except KeyError as exc:
            raise ConfigError(f"audit context missing field {name!r}") from exc

    def get(self, name: str, default: Any = None) -> Any:
        return self._ctx.get(name, default)


class _St:
    """Minimal state shim for lyapunov() calls inside audits."""

    def __init__(self, x: Vec, y: Vec, z: Vec | None = None):
        self.x, self.y, self.z = x, y, z


def _x_star_of_z(
    problem: MinimaxProblem,
    params: SurrogateParams,
    z: Vec,
    tol: float,
    delta: float | None,
) -> tuple[Vec, float]:
    """(x-component of the surrogate saddle at z, certified distance)."""
    orc = problem.oracles
    if orc is not None and getattr(orc, "x_star", None) is not None:
        return as_vec(orc.x_star(params, z), problem.dim_x), 0.0
    if delta is None:
        delta = max(tol * tol, 1e-18)
    res = saddle_solve(problem, params, z, delta)
    return res.points[0], res.certified_error


def bound_audit(kind: str, context: Mapping[str, Any]) -> float:
    """Slack (RHS - LHS) of a named inequality at supplied data.

    Nonnegative slack up to the caller's tolerance means the inequality
    holds.  Descent kinds evaluate every applicable form (the refined one
    needs the previous dual iterate / combined constants) and return the
    smallest slack.  Missing context fields raise ConfigError naming them.
    """
    if kind not in AUDIT_KINDS:
        raise ConfigError(
            f"unknown audit kind {kind!r}; known: " + ", ".join(AUDIT_KINDS)
        )
    c = _Ctx(kind, context)
    tol = float(c.get("tol", 1e-10))
    problem: MinimaxProblem = c.problem

    if kind == "DualErrPGDA":
        params: SurrogateParams = c.params
        if params.r_y <= 0.0:
            raise ConfigError("DualErrPGDA needs r_y > 0")
        alpha = float(c.alpha)
        xv = as_vec(c.x, problem.dim_x)
        yv = as_vec(c.y, problem.dim_y)
        yp = as_vec(c.y_prev, problem.dim_y)
        ys = inner_max(problem, params.r_y, xv, tol=tol)
        lhs = float(np.linalg.norm(ys.point - yv)) - ys.certified_error
        ell = problem.ell
        rhs = (
            (1.0 + alpha * (ell + params.r_y))
            / (alpha * params.r_y)
            * float(np.linalg.norm(yv - yp))
        )
        return rhs - lhs

    if kind == "GsToOs":
        xv = as_vec(c.x, problem.dim_x)
        yv = as_vec(c.y, problem.dim_y)
        gp, gd = gs_residual(problem, xv, yv)
        prox = os_residual(
            problem, xv, tol=tol, region=c.get("os_region")
        )
        dist = float(np.linalg.norm(prox.point - xv))
        lhs = max(dist - prox.certified_error, 0.0) ** 2
        ell = problem.ell
        rhs = (2.0 * problem.d_y / ell) * gd + (gp / ell) ** 2
        return rhs - lhs

    if kind == "DualErrNCSC":
        params = c.params
        alpha = float(c.alpha)
        yv = as_vec(c.y, problem.dim_y)
        zv = as_vec(c.z, problem.dim_x)
        step = prox_min(problem, params, yv, zv, tol=tol, alpha=alpha)
        y_plus = step.points[1]
        xt_plus = prox_min(problem, params, y_plus, zv, tol=tol)
        xs, xs_err = _x_star_of_z(problem, params, zv, tol, c.get("delta"))
        w = omega(problem.ell, params.r_x, params.r_y, alpha)
        lhs = (
            float(np.linalg.norm(xs - xt_plus.point))
            - xs_err
            - xt_plus.certified_error
        )
        rhs = w * float(np.linalg.norm(yv - y_plus))
        return rhs - lhs

    if kind == "Psi1Descent":
        params = c.params
        alpha, cc = float(c.alpha), float(c.c)
        xv = as_vec(c.x, problem.dim_x)
        yv = as_vec(c.y, problem.dim_y)
        xn = as_vec(c.x_next, problem.dim_x)
        yn = as_vec(c.y_next, problem.dim_y)
        psi_cur = lyapunov(problem, params, None, "Psi1", _St(xv, yv), tol=tol)
        psi_next = lyapunov(problem, params, None, "Psi1", _St(xn, yn), tol=tol)
        d_psi = psi_next - psi_cur
        dx = float(np.linalg.norm(xn - xv))
        dy = float(np.linalg.norm(yn - yv))
        ell = problem.ell
        ys = inner_max(problem, params.r_y, xv, tol=tol)
        mismatch = float(np.linalg.norm(ys.point - yv)) + ys.certified_error
        rhs_basic = (
            2.0 * ell * mismatch * dx
            - 0.5 / alpha * dy * dy
            - 0.5 / cc * dx * dx
        )
        slack = rhs_basic - d_psi
        y_prev = c.get("y_prev")
        if y_prev is not None:
            yp = as_vec(y_prev, problem.dim_y)
            dyp = float(np.linalg.norm(yv - yp))
            rhs_ref = (
                0.25 / alpha * dyp * dyp
                - 0.5 / alpha * dy * dy
                - 7.0 / (64.0 * cc) * dx * dx
            )
            slack = min(slack, rhs_ref - d_psi)
        return slack

    if kind == "Psi2Descent":
        params = c.params
        alpha, cc, beta = float(c.alpha), float(c.c), float(c.beta)
        xv = as_vec(c.x, problem.dim_x)
        yv = as_vec(c.y, problem.dim_y)
        zv = as_vec(c.z, problem.dim_x)
        xn = as_vec(c.x_next, problem.dim_x)
        yn = as_vec(c.y_next, problem.dim_y)
        zn = as_vec(c.z_next, problem.dim_x)
        psi_cur = lyapunov(
            problem, params, None, "Psi2", _St(xv, yv, zv), tol=tol
        )
        psi_next = lyapunov(
            problem, params, None, "Psi2", _St(xn, yn, zn), tol=tol
        )
        step = prox_min(problem, params, yv, zv, tol=tol, alpha=alpha)
        y_plus = step.points[1]
        dyp = float(np.linalg.norm(yv - y_plus))
        dx = float(np.linalg.norm(xn - xv))
        dzx = float(np.linalg.norm(zv - xn))
        r_x = params.r_x
        neg = (
            -0.125 / cc * dx * dx
            - 0.125 / alpha * dyp * dyp
            - 0.125 * r_x * beta * dzx * dzx
        )
        xt_plus = prox_min(problem, params, y_plus, zv, tol=tol)
        xs, xs_err = _x_star_of_z(problem, params, zv, tol, c.get("delta"))
        drift = (
            float(np.linalg.norm(xs - xt_plus.point))
            + xs_err
            + xt_plus.certified_error
        )
        rhs_basic = neg + 24.0 * r_x * beta * drift * drift
        slack = rhs_basic - (psi_next - psi_cur)
        rhs_comb = (
            0.125 / cc * dx * dx
            + 0.0625 / alpha * dyp * dyp
            + 0.125 * r_x * beta * dzx * dzx
        )
        slack = min(slack, (psi_cur - psi_next) - rhs_comb)
        return slack

    # PDescent.  Audits the proximal-descent chain for the z update
    # z_next = z + beta*(x_next - z) of a delta-accurate inner solve:
    # with the exact inner error when x_next is supplied, and with the
    # certified budget when delta is supplied.  At least one is needed.
    params = c.params
    beta = float(c.beta)
    zv = as_vec(c.z, problem.dim_x)
    zn = as_vec(c.z_next, problem.dim_x)
    x_next = c.get("x_next")
    delta = c.get("delta")
    if x_next is None and delta is None:
        raise ConfigError(
            "audit kind 'PDescent': missing context fields; "
            "supply 'x_next' or 'delta' (or both)"
        )
    p_cur, _, _ = _p_tilde(problem, params, zv, tol, delta)
    p_next, _, _ = _p_tilde(problem, params, zn, tol, delta)
    xs, xs_err = _x_star_of_z(problem, params, zv, tol, delta)
    r_x = params.r_x
    grad_p = r_x * float(np.linalg.norm(zv - xs))
    d_p = p_next - p_cur
    slack = math.inf
    if x_next is not None:
        xn = as_vec(x_next, problem.dim_x)
        e = float(np.linalg.norm(xn - xs)) + xs_err
        rhs_raw = (
            -beta * (1.0 - beta) / r_x * grad_p * grad_p
            + beta * grad_p * e
            + r_x * beta * beta * e * e
        )
        slack = min(slack, rhs_raw - d_p)
    if delta is not None:
        root = math.sqrt(float(delta))
        rhs_mid = (
            -beta * (1.0 - beta) / r_x * grad_p * grad_p
            + beta * root * grad_p
            + r_x * beta * beta * float(delta)
        )
        rhs_final = (
            -beta * (1.0 - beta) / (2.0 * r_x) * grad_p * grad_p
            + (beta / (2.0 * (1.0 - beta)) + beta * beta)
            * r_x
            * float(delta)
        )
        slack = min(slack, rhs_mid - d_p, rhs_final - d_p)
    return slack

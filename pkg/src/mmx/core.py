"""Problem abstraction for smooth nonconvex-concave minimax optimization.

A problem is min over x in X of max over y in Y of f(x, y), where f has
jointly ell-Lipschitz gradients, Y is convex and bounded with 0 in Y, and
f(x, .) is concave on Y.  This module supplies the feasible-set variants
with exact projections and exact normal-cone residuals, and the perturbed /
smoothed surrogate used by every solver:

    f_tilde(x, y)       = f(x, y) - (r_y/2)*||y||^2
    F_tilde(x, y, z)    = f(x, y) + (r_x/2)*||x - z||^2 - (r_y/2)*||y||^2

Only sets with closed-form projection and residual are supported; the
stationarity measures demand an exact distance to the subdifferential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

__all__ = [
    "FEASIBILITY_TOL",
    "Vec",
    "MmxError",
    "DimensionError",
    "FeasibilityError",
    "ConfigError",
    "OracleError",
    "ProjectableSet",
    "FullSpace",
    "Box",
    "Ball",
    "Interval",
    "project",
    "normal_cone_residual",
    "diameter",
    "contains",
    "SurrogateParams",
    "MinimaxProblem",
    "IterateState",
    "ScalarOps",
    "surrogate_grads",
    "f_tilde_value",
    "surrogate_value",
    "as_vec",
]

# Feasibility drift is rounding only (projections are exact), so the
# tolerance is fixed near machine precision and scaled by (1 + ||x||).
FEASIBILITY_TOL = 1e-10

Vec = np.ndarray


class MmxError(Exception):
    """Base class for structured errors raised by this package."""


class DimensionError(MmxError, ValueError):
    """Vector dimension does not match the declared set or problem."""


class FeasibilityError(MmxError, ValueError):
    """A point violates set membership beyond the feasibility tolerance."""


class ConfigError(MmxError, ValueError):
    """A solver or sweep configuration violates a validity inequality."""


class OracleError(MmxError, RuntimeError):
    """An iterative oracle failed to reach its certified accuracy."""


def as_vec(p: Any, dim: int | None = None) -> Vec:
    """Coerce scalars / sequences to a finite float64 1-D array.

    Raises:
        DimensionError: wrong length or non-finite entries.
    """
    v = np.atleast_1d(np.asarray(p, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise DimensionError("vector has non-finite entries")
    return v


# ---------------------------------------------------------------------------
# Feasible sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FullSpace:
    """All of R^dim; projection is the identity."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError("FullSpace dimension must be >= 1")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box {x : lower <= x <= upper} (componentwise)."""

    lower: Vec
    upper: Vec

    def __post_init__(self) -> None:
        lo = as_vec(self.lower)
        hi = as_vec(self.upper, lo.shape[0])
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if np.any(lo > hi):
            raise ConfigError("Box requires lower <= upper componentwise")

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])


@dataclass(frozen=True)
class Ball:
    """Euclidean ball {x : ||x - center|| <= radius}."""

    center: Vec
    radius: float

    def __post_init__(self) -> None:
        c = as_vec(self.center)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigError("Ball radius must be positive and finite")

    @property
    def dim(self) -> int:
        return int(self.center.shape[0])


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] on the real line (dimension 1)."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (self.lo <= self.hi):
            raise ConfigError("Interval requires lo <= hi")

    @property
    def dim(self) -> int:
        return 1


ProjectableSet = FullSpace | Box | Ball | Interval


def _set_dim(s: ProjectableSet) -> int:
    return s.dim


def project(s: ProjectableSet, p: Any) -> Vec:
    """Euclidean projection of p onto the set.

    Box/Interval clamp componentwise; Ball rescales radially; FullSpace is
    the identity.

    Raises:
        DimensionError: dimension mismatch or NaN input.
    """
    v = as_vec(p, _set_dim(s))
    if isinstance(s, FullSpace):
        return v
    if isinstance(s, Box):
        return np.clip(v, s.lower, s.upper)
    if isinstance(s, Interval):
        return np.clip(v, s.lo, s.hi)
    d = v - s.center
    norm = float(np.linalg.norm(d))
    if norm <= s.radius:
        return v
    return s.center + d * (s.radius / norm)


def diameter(s: ProjectableSet) -> float:
    """sup ||u - v|| over the set; math.inf for FullSpace."""
    if isinstance(s, FullSpace):
        return math.inf
    if isinstance(s, Box):
        return float(np.linalg.norm(s.upper - s.lower))
    if isinstance(s, Interval):
        return s.hi - s.lo
    return 2.0 * s.radius


def contains(s: ProjectableSet, x: Any, tol: float = FEASIBILITY_TOL) -> bool:
    """Set membership within tol*(1+||x||)."""
    v = as_vec(x, _set_dim(s))
    slack = tol * (1.0 + float(np.linalg.norm(v)))
    if isinstance(s, FullSpace):
        return True
    if isinstance(s, Box):
        return bool(np.all(v >= s.lower - slack) and np.all(v <= s.upper + slack))
    if isinstance(s, Interval):
        return s.lo - slack <= v[0] <= s.hi + slack
    return float(np.linalg.norm(v - s.center)) <= s.radius + slack


def _box_residual(lo: Vec, hi: Vec, x: Vec, g: Vec, slack: float) -> float:
    # dist(0, g + N(x)) decomposes per coordinate for a box:
    #   interior        -> |g_i|
    #   at lower only   -> |g_i| if g_i < 0 else 0   (N_i = (-inf, 0])
    #   at upper only   -> g_i  if g_i > 0 else 0    (N_i = [0, inf))
    #   pinned (lo=hi)  -> 0                          (N_i = R)
    total = 0.0
    for i in range(x.shape[0]):
        at_lo = x[i] <= lo[i] + slack
        at_hi = x[i] >= hi[i] - slack
        gi = float(g[i])
        if at_lo and at_hi:
            r = 0.0
        elif at_lo:
            r = -gi if gi < 0.0 else 0.0
        elif at_hi:
            r = gi if gi > 0.0 else 0.0
        else:
            r = abs(gi)
        total += r * r
    return math.sqrt(total)


def normal_cone_residual(s: ProjectableSet, x: Any, g: Any) -> float:
    """Exact dist(0, g + N_set(x)), the game-stationarity residual.

    N_set(x) is the normal cone of the set at x.  A point x minimizes
    <g, .> locally over the set iff the residual vanishes.

    Raises:
        FeasibilityError: x outside the set beyond tolerance.
    """
    xv = as_vec(x, _set_dim(s))
    gv = as_vec(g, _set_dim(s))
    if not contains(s, xv):
        raise FeasibilityError(f"infeasible point: {xv!r} is not in {s!r}")
    slack = FEASIBILITY_TOL * (1.0 + float(np.linalg.norm(xv)))
    if isinstance(s, FullSpace):
        return float(np.linalg.norm(gv))
    if isinstance(s, Box):
        return _box_residual(s.lower, s.upper, xv, gv, slack)
    if isinstance(s, Interval):
        return _box_residual(
            np.array([s.lo]), np.array([s.hi]), xv, gv, slack
        )
    # Ball: interior -> ||g||; boundary -> remove the outward-normal part
    # when it points inward (min over t >= 0 of ||g + t*n||).
    dist_to_center = float(np.linalg.norm(xv - s.center))
    if dist_to_center < s.radius - slack:
        return float(np.linalg.norm(gv))
    n = (xv - s.center) / dist_to_center
    inner = float(np.dot(gv, n))
    return float(np.linalg.norm(gv - min(0.0, inner) * n))


# ---------------------------------------------------------------------------
# Problems and surrogate composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurrogateParams:
    """Weights of the smoothing and dual-perturbation terms.

    r_x = 0 disables smoothing (no proximal center z); smoothed solvers
    require r_x strictly above the smoothness constant ell, which callers
    enforce via `validate_for`.
    """

    r_x: float = 0.0
    r_y: float = 0.0

    def __post_init__(self) -> None:
        if self.r_x < 0 or self.r_y < 0:
            raise ConfigError("surrogate weights must be nonnegative")

    def validate_for(self, ell: float) -> None:
        """Check r_x = 0 or r_x > ell (strong convexity of the surrogate)."""
        if self.r_x != 0.0 and self.r_x <= ell:
            raise ConfigError(
                f"smoothing weight r_x={self.r_x} must exceed ell={ell} "
                "(or be exactly 0)"
            )


@dataclass(frozen=True)
class MinimaxProblem:
    """min over set_x of max over set_y of f(x, y).

    Fields:
        f, grad_x, grad_y: value and gradient oracles taking (x, y) vectors.
        ell: joint Lipschitz constant of both gradients.
        set_x, set_y: feasible sets; set_y must be bounded and contain 0.
        oracles: optional analytic-oracle bundle attached by instance
            constructors (see `mmx.instances`); None for generic problems.
        scalar_ops: optional float-arithmetic fast path for 1-D problems.
    """

    dim_x: int
    dim_y: int
    f: Callable[[Vec, Vec], float]
    grad_x: Callable[[Vec, Vec], Vec]
    grad_y: Callable[[Vec, Vec], Vec]
    ell: float
    set_x: ProjectableSet
    set_y: ProjectableSet
    oracles: Any = None
    scalar_ops: Any = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.ell <= 0 or not math.isfinite(self.ell):
            raise ConfigError("ell must be positive and finite")
        if _set_dim(self.set_x) != self.dim_x:
            raise DimensionError("set_x dimension does not match dim_x")
        if _set_dim(self.set_y) != self.dim_y:
            raise DimensionError("set_y dimension does not match dim_y")
        if not math.isfinite(diameter(self.set_y)):
            raise ConfigError("set_y must be bounded")
        if not contains(self.set_y, np.zeros(self.dim_y)):
            raise ConfigError("set_y must contain the origin")

    @property
    def d_y(self) -> float:
        """Diameter of the dual feasible set."""
        return diameter(self.set_y)


@dataclass(frozen=True)
class IterateState:
    """One solver iterate; z is present only for smoothed algorithms."""

    t: int
    x: Vec
    y: Vec
    z: Vec | None = None
    last_step_x: float = 0.0
    last_step_y: float = 0.0


@dataclass(frozen=True)
class ScalarOps:
    """Float-only oracles for 1-D problems (solver fast path).

    Bounds are closed intervals; +-inf marks a free coordinate.  The
    callables must compute exactly the same values as the problem's vector
    oracles (instance constructors delegate the vector path to these).
    """

    f: Callable[[float, float], float]
    grad_x: Callable[[float, float], float]
    grad_y: Callable[[float, float], float]
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float


def f_tilde_value(
    problem: MinimaxProblem, params: SurrogateParams, x: Vec, y: Vec
) -> float:
    """Perturbed objective f(x,y) - (r_y/2)||y||^2."""
    return problem.f(x, y) - 0.5 * params.r_y * float(np.dot(y, y))


def surrogate_value(
    problem: MinimaxProblem,
    params: SurrogateParams,
    x: Vec,
    y: Vec,
    z: Vec | None,
) -> float:
    """Smoothed surrogate f(x,y) + (r_x/2)||x-z||^2 - (r_y/2)||y||^2."""
    val = f_tilde_value(problem, params, x, y)
    if params.r_x != 0.0:
        if z is None:
            raise ConfigError("z is required when r_x > 0")
        d = x - z
        val += 0.5 * params.r_x * float(np.dot(d, d))
    return val


def surrogate_grads(
    problem: MinimaxProblem,
    params: SurrogateParams,
    x: Any,
    y: Any,
    z: Any = None,
) -> tuple[Vec, Vec]:
    """Gradients of the surrogate: (grad_x f + r_x(x-z), grad_y f - r_y*y).

    z is ignored when r_x = 0.  With r_x = r_y = 0 this returns the raw
    problem gradients.
    """
    xv = as_vec(x, problem.dim_x)
    yv = as_vec(y, problem.dim_y)
    gx = np.asarray(problem.grad_x(xv, yv), dtype=float).copy()
    gy = np.asarray(problem.grad_y(xv, yv), dtype=float).copy()
    if params.r_x != 0.0:
        if z is None:
            raise ConfigError("z is required when r_x > 0")
        zv = as_vec(z, problem.dim_x)
        gx += params.r_x * (xv - zv)
    if params.r_y != 0.0:
        gy -= params.r_y * yv
    return gx, gy

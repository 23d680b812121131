"""Hard 1-D minimax instances with exact piecewise-polynomial oracles.

Both tightness instances are piecewise quadratics in x that are linear in
y, so every derived quantity the audits need (dual value function,
smoothed value function, Moreau envelope, saddle values) is the minimum of
piecewise polynomials of degree at most four.  A small exact minimizer for
that class powers every oracle here; nothing is approximated beyond float
rounding, so callers may treat the oracle error as zero.

The module also provides the eigenvector-aligned adversarial starting
points whose one-step contraction factor equals 1 + lambda_i of the
matching recursion matrix, and the frozen-dual comparison process used to
lower-bound the smoothed methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .core import (
    Box,
    ConfigError,
    FullSpace,
    Interval,
    IterateState,
    MinimaxProblem,
    OracleError,
    ScalarOps,
    SurrogateParams,
    Vec,
)
from .spectral import (
    SpectralParams,
    a1_coeff,
    b1_coeff,
    eigen_closed,
    recursion_matrix,
)

__all__ = [
    "PolyPiece",
    "DualLinearBranch",
    "AnalyticOracles",
    "minimize_pieces",
    "eval_pieces",
    "dual_max_pieces",
    "gs_instance",
    "os_instance",
    "bilinear_quadratic",
    "make_instance",
    "instance_names",
    "eigen_init",
    "EIGEN_INIT_KINDS",
    "frozen_dual_step",
]

Poly = Sequence[float]  # ascending coefficients c0 + c1*x + c2*x^2 + ...


def _peval(coef: Poly, x: float) -> float:
    acc = 0.0
    for c in reversed(coef):
        acc = acc * x + c
    return acc


def _padd(p: Poly, q: Poly) -> tuple[float, ...]:
    n = max(len(p), len(q))
    return tuple(
        (p[i] if i < len(p) else 0.0) + (q[i] if i < len(q) else 0.0)
        for i in range(n)
    )


def _pscale(p: Poly, s: float) -> tuple[float, ...]:
    return tuple(s * c for c in p)


def _pmul(p: Poly, q: Poly) -> tuple[float, ...]:
    out = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def _ptrim(p: Poly) -> tuple[float, ...]:
    n = len(p)
    while n > 1 and p[n - 1] == 0.0:
        n -= 1
    return tuple(p[:n])


@dataclass(frozen=True)
class PolyPiece:
    """Polynomial a0 + a1*x + ... on the closed interval [lo, hi]."""

    lo: float
    hi: float
    coef: tuple[float, ...]

    def value(self, x: float) -> float:
        return _peval(self.coef, x)


def _piece_min(piece: PolyPiece) -> tuple[float, float]:
    """Exact minimizer of one polynomial piece on its interval."""
    coef = _ptrim(piece.coef)
    deg = len(coef) - 1
    lo, hi = piece.lo, piece.hi
    if deg == 0:
        x = min(max(0.0, lo), hi)
        return x, coef[0]
    lead = coef[-1]
    # p -> +inf as x -> +inf iff lead > 0; as x -> -inf iff the leading
    # term lead * x^deg -> +inf there.
    if not math.isfinite(hi) and lead < 0.0:
        raise OracleError("piecewise objective is unbounded below")
    if not math.isfinite(lo):
        up_at_minus_inf = lead > 0.0 if deg % 2 == 0 else lead < 0.0
        if not up_at_minus_inf:
            raise OracleError("piecewise objective is unbounded below")
    cands = [e for e in (lo, hi) if math.isfinite(e)]
    deriv = tuple((i + 1) * coef[i + 1] for i in range(deg))
    if deg == 1:
        roots: list[float] = []
    else:
        rr = np.roots(list(reversed(deriv)))
        roots = [
            float(r.real)
            for r in rr
            if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real))
        ]
    cands.extend(r for r in roots if lo <= r <= hi)
    if not cands:
        raise OracleError("piecewise objective has no finite minimizer")
    cands.sort()
    best_x, best_v = cands[0], _peval(coef, cands[0])
    for x in cands[1:]:
        v = _peval(coef, x)
        if v < best_v:
            best_x, best_v = x, v
    return best_x, best_v


def minimize_pieces(pieces: Sequence[PolyPiece]) -> tuple[float, float]:
    """Global (argmin, min) over a piecewise-polynomial function."""
    best: tuple[float, float] | None = None
    for piece in pieces:
        x, v = _piece_min(piece)
        if best is None or v < best[1]:
            best = (x, v)
    if best is None:
        raise OracleError("no pieces to minimize")
    return best


def eval_pieces(pieces: Sequence[PolyPiece], x: float) -> float:
    for piece in pieces:
        if piece.lo <= x <= piece.hi:
            return piece.value(x)
    raise OracleError(f"x={x} outside the piecewise domain")


def _add_quadratic(
    pieces: Sequence[PolyPiece], a: float, b: float, c: float
) -> list[PolyPiece]:
    """Add a*x^2 + b*x + c to every piece."""
    return [
        PolyPiece(p.lo, p.hi, _padd(p.coef, (c, b, a))) for p in pieces
    ]


@dataclass(frozen=True)
class DualLinearBranch:
    """f(x, y) = q(x) + g(x)*y for x in [lo, hi]."""

    lo: float
    hi: float
    q: tuple[float, ...]
    g: tuple[float, ...]


def _real_roots_in(coef: Poly, lo: float, hi: float) -> list[float]:
    coef = _ptrim(coef)
    if len(coef) == 1:
        return []
    rr = np.roots(list(reversed(coef)))
    out = [
        float(r.real)
        for r in rr
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real)) and lo < r.real < hi
    ]
    return sorted(out)


def _probe(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0
    return 0.0


def dual_max_pieces(
    branches: Sequence[DualLinearBranch],
    r_y: float,
    y_lo: float,
    y_hi: float,
) -> list[PolyPiece]:
    """Pieces of x -> max over y in [y_lo, y_hi] of q + g*y - (r_y/2)y^2.

    The inner maximizer is the clip of g/r_y, so each branch splits where
    g(x) crosses r_y*y_lo and r_y*y_hi; the envelope is C^1 across those
    splits, hence float error in a split location perturbs values by
    O(err^2) only.
    """
    out: list[PolyPiece] = []
    for br in branches:
        cuts = set()
        if r_y > 0.0:
            for t in (r_y * y_lo, r_y * y_hi):
                cuts.update(_real_roots_in(_padd(br.g, (-t,)), br.lo, br.hi))
        else:
            cuts.update(_real_roots_in(br.g, br.lo, br.hi))
        edges = [br.lo, *sorted(cuts), br.hi]
        for lo, hi in zip(edges[:-1], edges[1:]):
            gm = _peval(br.g, _probe(lo, hi))
            if r_y > 0.0:
                if gm < r_y * y_lo:
                    y = y_lo
                elif gm > r_y * y_hi:
                    y = y_hi
                else:
                    coef = _padd(br.q, _pscale(_pmul(br.g, br.g), 0.5 / r_y))
                    out.append(PolyPiece(lo, hi, coef))
                    continue
                coef = _padd(br.q, _pscale(br.g, y))
                coef = _padd(coef, (-0.5 * r_y * y * y,))
            else:
                y = y_hi if gm > 0.0 else (y_lo if gm < 0.0 else 0.0)
                coef = _padd(br.q, _pscale(br.g, y))
            out.append(PolyPiece(lo, hi, coef))
    return out


def _clip(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


@dataclass(frozen=True)
class AnalyticOracles:
    """Exact value-function oracles attached to an instance.

    Every callable takes the surrogate weights of the evaluation (not of
    the instance construction), so perturbation-free and smoothed variants
    reuse one bundle.  Optional fields are None when no closed form is
    available; callers then fall back to certified numeric search.
    """

    y_star: Callable[[SurrogateParams, Vec], Vec]
    phi_tilde: Callable[[SurrogateParams, Vec], float]
    minmax_tilde: Callable[[SurrogateParams], float] | None = None
    x_tilde: Callable[[SurrogateParams, Vec, Vec], Vec] | None = None
    d_tilde: Callable[[SurrogateParams, Vec, Vec], float] | None = None
    x_star: Callable[[SurrogateParams, Vec], Vec] | None = None
    p_tilde: Callable[[SurrogateParams, Vec], float] | None = None
    y_of_z: Callable[[SurrogateParams, Vec], Vec] | None = None
    moreau_prox: Callable[[Vec], Vec] | None = None
    moreau_env: Callable[[Vec], float] | None = None
    prox_region: tuple[float, float] | None = None


def _branch_oracles(
    branches: Sequence[DualLinearBranch],
    ell: float,
    y_lo: float,
    y_hi: float,
    prox_region: tuple[float, float],
) -> AnalyticOracles:
    """Build the full oracle bundle for a 1-D dual-linear instance."""

    def _branch_at(x: float) -> DualLinearBranch:
        for br in branches:
            if br.lo <= x <= br.hi:
                return br
        raise OracleError(f"x={x} outside the instance domain")

    def y_star(params: SurrogateParams, x: Vec) -> Vec:
        g = _peval(_branch_at(float(x[0])).g, float(x[0]))
        if params.r_y > 0.0:
            return np.array([_clip(g / params.r_y, y_lo, y_hi)])
        if g > 0.0:
            return np.array([y_hi])
        if g < 0.0:
            return np.array([y_lo])
        return np.array([_clip(0.0, y_lo, y_hi)])

    def phi_tilde(params: SurrogateParams, x: Vec) -> float:
        pieces = dual_max_pieces(branches, params.r_y, y_lo, y_hi)
        return eval_pieces(pieces, float(x[0]))

    def minmax_tilde(params: SurrogateParams) -> float:
        pieces = dual_max_pieces(branches, params.r_y, y_lo, y_hi)
        return minimize_pieces(pieces)[1]

    def _f_pieces(y: float) -> list[PolyPiece]:
        return [
            PolyPiece(br.lo, br.hi, _padd(br.q, _pscale(br.g, y)))
            for br in branches
        ]

    def _sur_min(
        params: SurrogateParams, y: float, z: float
    ) -> tuple[float, float]:
        pieces = _add_quadratic(
            _f_pieces(y), 0.5 * params.r_x, -params.r_x * z,
            0.5 * params.r_x * z * z,
        )
        x, v = minimize_pieces(pieces)
        return x, v - 0.5 * params.r_y * y * y

    def x_tilde(params: SurrogateParams, y: Vec, z: Vec) -> Vec:
        return np.array([_sur_min(params, float(y[0]), float(z[0]))[0]])

    def d_tilde(params: SurrogateParams, y: Vec, z: Vec) -> float:
        return _sur_min(params, float(y[0]), float(z[0]))[1]

    def _prox_phi_tilde(
        params: SurrogateParams, z: float
    ) -> tuple[float, float]:
        pieces = dual_max_pieces(branches, params.r_y, y_lo, y_hi)
        pieces = _add_quadratic(
            pieces, 0.5 * params.r_x, -params.r_x * z,
            0.5 * params.r_x * z * z,
        )
        return minimize_pieces(pieces)

    def x_star(params: SurrogateParams, z: Vec) -> Vec:
        return np.array([_prox_phi_tilde(params, float(z[0]))[0]])

    def p_tilde(params: SurrogateParams, z: Vec) -> float:
        return _prox_phi_tilde(params, float(z[0]))[1]

    def y_of_z(params: SurrogateParams, z: Vec) -> Vec:
        return y_star(params, x_star(params, z))

    def _moreau(x: float) -> tuple[float, float]:
        pieces = dual_max_pieces(branches, 0.0, y_lo, y_hi)
        pieces = _add_quadratic(pieces, ell, -2.0 * ell * x, ell * x * x)
        return minimize_pieces(pieces)

    def moreau_prox(x: Vec) -> Vec:
        return np.array([_moreau(float(x[0]))[0]])

    def moreau_env(x: Vec) -> float:
        return _moreau(float(x[0]))[1]

    return AnalyticOracles(
        y_star=y_star,
        phi_tilde=phi_tilde,
        minmax_tilde=minmax_tilde,
        x_tilde=x_tilde,
        d_tilde=d_tilde,
        x_star=x_star,
        p_tilde=p_tilde,
        y_of_z=y_of_z,
        moreau_prox=moreau_prox,
        moreau_env=moreau_env,
        prox_region=prox_region,
    )


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0.0 and math.isfinite(v)):
            raise ConfigError(f"{name} must be positive and finite, got {v}")


def gs_instance(
    ell: float = 1.0, d_y: float = 1.0, r_y: float = 0.1
) -> MinimaxProblem:
    """Piecewise instance whose dual-residual decay is geometric.

    f is 0 for x < 0, -(ell/2)x^2 + b*x*y on the middle branch
    [0, r_y*d_y/b] with b = sqrt(3*ell*r_y), and affine in y beyond it.
    r_y here is a construction constant baked into f itself; it must match
    the dual perturbation of the solver run for the closed forms to apply.
    """
    _require_positive(ell=ell, d_y=d_y, r_y=r_y)
    if r_y > ell / 3.0 * (1.0 + 1e-12):
        raise ConfigError(
            f"r_y={r_y} exceeds ell/3={ell / 3.0}; the coupling "
            "b=sqrt(3*ell*r_y) would break the ell-Lipschitz gradient bound"
        )
    b = math.sqrt(3.0 * ell * r_y)
    x_bar = r_y * d_y / b
    c3 = -0.5 * ell * (r_y * d_y) ** 2 / (b * b)  # = -r_y*d_y^2/6
    gd = r_y * d_y  # dual slope of the outer branch

    def f_s(x: float, y: float) -> float:
        if x < 0.0:
            return 0.0
        if x <= x_bar:
            return (-0.5 * ell * x + b * y) * x
        return c3 + gd * y

    def gx_s(x: float, y: float) -> float:
        if x < 0.0 or x > x_bar:
            return 0.0
        return -ell * x + b * y

    def gy_s(x: float, y: float) -> float:
        if x < 0.0:
            return 0.0
        if x <= x_bar:
            return b * x
        return gd

    branches = (
        DualLinearBranch(-math.inf, 0.0, (0.0,), (0.0,)),
        DualLinearBranch(0.0, x_bar, (0.0, 0.0, -0.5 * ell), (0.0, b)),
        DualLinearBranch(x_bar, math.inf, (c3,), (gd,)),
    )
    region = (-1.0 - x_bar - d_y, 1.0 + x_bar + d_y)
    return _scalar_problem(
        f_s, gx_s, gy_s, ell, 0.0, d_y,
        oracles=_branch_oracles(branches, ell, 0.0, d_y, region),
        name="gs-hard",
    )


def os_instance(ell: float = 1.0, d_y: float = 1.0) -> MinimaxProblem:
    """Separable instance f(x, y) = h(x)*y with a flat-capped bump h.

    h is quadratic on |x| <= 1, splices C^1 to a cap of 2*c1 at |x| >= 2,
    with c1 = ell/(2*(d_y+1)); the scaling keeps both block gradients
    ell-Lipschitz jointly.
    """
    _require_positive(ell=ell, d_y=d_y)
    c1 = ell / (2.0 * (d_y + 1.0))

    def h(x: float) -> float:
        ax = abs(x)
        if ax <= 1.0:
            return c1 * x * x
        if ax < 2.0:
            return 2.0 * c1 - c1 * (ax - 2.0) ** 2
        return 2.0 * c1

    def h_prime(x: float) -> float:
        ax = abs(x)
        if ax <= 1.0:
            return 2.0 * c1 * x
        if ax < 2.0:
            return 2.0 * c1 * (2.0 - ax) * math.copysign(1.0, x)
        return 0.0

    def f_s(x: float, y: float) -> float:
        return h(x) * y

    def gx_s(x: float, y: float) -> float:
        return h_prime(x) * y

    def gy_s(x: float, y: float) -> float:
        return h(x)

    branches = (
        DualLinearBranch(-math.inf, -2.0, (0.0,), (2.0 * c1,)),
        DualLinearBranch(-2.0, -1.0, (0.0,), (-2.0 * c1, -4.0 * c1, -c1)),
        DualLinearBranch(-1.0, 1.0, (0.0,), (0.0, 0.0, c1)),
        DualLinearBranch(1.0, 2.0, (0.0,), (-2.0 * c1, 4.0 * c1, -c1)),
        DualLinearBranch(2.0, math.inf, (0.0,), (2.0 * c1,)),
    )
    return _scalar_problem(
        f_s, gx_s, gy_s, ell, 0.0, d_y,
        oracles=_branch_oracles(branches, ell, 0.0, d_y, (-4.0, 4.0)),
        name="os-hard",
    )


def _scalar_problem(
    f_s: Callable[[float, float], float],
    gx_s: Callable[[float, float], float],
    gy_s: Callable[[float, float], float],
    ell: float,
    y_lo: float,
    y_hi: float,
    oracles: AnalyticOracles,
    name: str,
) -> MinimaxProblem:
    """Wrap scalar oracles as a dim-1 MinimaxProblem (single source of truth)."""
    ops = ScalarOps(
        f=f_s, grad_x=gx_s, grad_y=gy_s,
        x_lo=-math.inf, x_hi=math.inf, y_lo=y_lo, y_hi=y_hi,
    )
    return MinimaxProblem(
        dim_x=1,
        dim_y=1,
        f=lambda x, y: f_s(float(x[0]), float(y[0])),
        grad_x=lambda x, y: np.array([gx_s(float(x[0]), float(y[0]))]),
        grad_y=lambda x, y: np.array([gy_s(float(x[0]), float(y[0]))]),
        ell=ell,
        set_x=FullSpace(1),
        set_y=Interval(y_lo, y_hi),
        oracles=oracles,
        scalar_ops=ops,
        name=name,
    )


def bilinear_quadratic(
    dim: int = 1,
    a: float = 1.0,
    coupling: float = 0.8,
    bound: float = 1.0,
) -> MinimaxProblem:
    """f(x, y) = -(a/2)||x||^2 + x.B.y with Y the box [-bound, bound]^dim.

    B = coupling * I; the saddle of every surrogate sits at the origin,
    which makes this the reference problem for oracle and inner-solver
    tests.  ell = max(a, |coupling|).
    """
    if dim < 1:
        raise ConfigError("dim must be at least 1")
    _require_positive(a=a, bound=bound)
    if coupling == 0.0:
        raise ConfigError("coupling must be nonzero")
    ell = max(a, abs(coupling))

    def f_s(x: float, y: float) -> float:
        return -0.5 * a * x * x + coupling * x * y

    if dim == 1:
        # delegate through the scalar path so both agree bitwise
        def f(x: Vec, y: Vec) -> float:
            return f_s(float(x[0]), float(y[0]))
    else:
        def f(x: Vec, y: Vec) -> float:
            return (
                -0.5 * a * float(np.dot(x, x))
                + coupling * float(np.dot(x, y))
            )

    def grad_x(x: Vec, y: Vec) -> Vec:
        return -a * x + coupling * y

    def grad_y(x: Vec, y: Vec) -> Vec:
        return coupling * x

    def y_star(params: SurrogateParams, x: Vec) -> Vec:
        g = coupling * x
        if params.r_y > 0.0:
            return np.clip(g / params.r_y, -bound, bound)
        return np.sign(g) * bound

    def phi_tilde(params: SurrogateParams, x: Vec) -> float:
        ys = y_star(params, x)
        return (
            f(x, ys) - 0.5 * params.r_y * float(np.dot(ys, ys))
        )

    def x_tilde(params: SurrogateParams, y: Vec, z: Vec) -> Vec:
        if params.r_x <= a:
            raise OracleError("surrogate not strongly convex")
        return (params.r_x * z - coupling * y) / (params.r_x - a)

    def d_tilde(params: SurrogateParams, y: Vec, z: Vec) -> float:
        xt = x_tilde(params, y, z)
        d = xt - z
        return (
            f(xt, y)
            + 0.5 * params.r_x * float(np.dot(d, d))
            - 0.5 * params.r_y * float(np.dot(y, y))
        )

    base = dict(
        y_star=y_star,
        phi_tilde=phi_tilde,
        x_tilde=x_tilde,
        d_tilde=d_tilde,
    )
    scalar_ops = None
    if dim == 1:
        branch = (
            DualLinearBranch(
                -math.inf, math.inf, (0.0, 0.0, -0.5 * a), (0.0, coupling)
            ),
        )
        full = _branch_oracles(
            branch, ell, -bound, bound, (-2.0 * bound - 2.0, 2.0 * bound + 2.0)
        )
        oracles = AnalyticOracles(
            **base,
            minmax_tilde=full.minmax_tilde,
            x_star=full.x_star,
            p_tilde=full.p_tilde,
            y_of_z=full.y_of_z,
            moreau_prox=full.moreau_prox,
            moreau_env=full.moreau_env,
            prox_region=full.prox_region,
        )
        scalar_ops = ScalarOps(
            f=f_s,
            grad_x=lambda x, y: -a * x + coupling * y,
            grad_y=lambda x, y: coupling * x,
            x_lo=-math.inf, x_hi=math.inf, y_lo=-bound, y_hi=bound,
        )
    else:
        oracles = AnalyticOracles(**base)
    return MinimaxProblem(
        dim_x=dim,
        dim_y=dim,
        f=f,
        grad_x=grad_x,
        grad_y=grad_y,
        ell=ell,
        set_x=FullSpace(dim),
        set_y=(
            Interval(-bound, bound) if dim == 1
            else Box(np.full(dim, -bound), np.full(dim, bound))
        ),
        oracles=oracles,
        scalar_ops=scalar_ops,
        name="bilinear-quadratic",
    )


_REGISTRY: dict[str, Callable[..., MinimaxProblem]] = {
    "gs-hard": gs_instance,
    "os-hard": os_instance,
    "bilinear-quadratic": bilinear_quadratic,
}


def instance_names() -> list[str]:
    return sorted(_REGISTRY)


def make_instance(name: str, **params: Any) -> MinimaxProblem:
    """Construct a registered instance by CLI name."""
    try:
        ctor = _REGISTRY[name]
    except KeyError:
        raise ConfigError(
            f"unknown instance {name!r}; known: {', '.join(instance_names())}"
        ) from None
    return ctor(**params)


EIGEN_INIT_KINDS = ("PgdaGS", "PsgdaGS", "PgdaOS", "PsgdaOS", "SgdaOS")


def _middle_guard(value: float, cap: float, what: str, bound: str) -> None:
    if not 0.0 <= value <= cap:
        raise ConfigError(
            f"{what}={value:.6g} outside [0, {cap:.6g}] (= {bound}); "
            "decrease epsilon"
        )


def _eigen_residual(m: np.ndarray, v: np.ndarray, lam: float) -> None:
    resid = float(np.linalg.norm(m @ v - lam * v))
    if resid > 1e-9 * float(np.linalg.norm(v)):
        raise OracleError(
            f"eigenvector residual {resid:.3e} exceeds 1e-9*||v||; "
            "closed-form eigenvalue inconsistent with the recursion matrix"
        )


def eigen_init(
    kind: str, ell: float, d_y: float, epsilon: float, cfg: Any
) -> IterateState:
    """Adversarial start aligned with the slow eigendirection.

    cfg supplies the step sizes (attributes r_y, r_x, c, alpha, beta as the
    kind requires).  The returned state contracts by exactly the closed
    1 + lambda factor per step while it stays in the quadratic branch; a
    0.9 safety margin on the branch guard absorbs rounding.
    """
    _require_positive(ell=ell, d_y=d_y, epsilon=epsilon)
    if kind == "PgdaGS":
        r_y, c, alpha = cfg.r_y, cfg.c, cfg.alpha
        b = math.sqrt(3.0 * ell * r_y)
        params = SpectralParams(ell=ell, r_y=r_y, b=b, c=c, alpha=alpha)
        a1, b1 = a1_coeff(params), b1_coeff(params)
        lam = eigen_closed("Lambda1", params)
        x0 = 2.0 * epsilon / ell
        ratio = (
            2.0 * b * (1.0 + ell * c) * alpha
            / (math.sqrt(a1 * a1 - 4.0 * b1) + 2.0 * ell * c - a1)
        )
        y0 = ratio * x0
        _middle_guard(x0, 0.9 * r_y * d_y / b, "x0", "0.9*r_y*D_Y/b")
        _middle_guard(y0, 0.9 * d_y, "y0", "0.9*D_Y")
        _eigen_residual(
            recursion_matrix("M1", params), np.array([x0, y0]), lam
        )
        return IterateState(t=0, x=np.array([x0]), y=np.array([y0]))
    if kind == "PsgdaGS":
        r_x, r_y = cfg.r_x, cfg.r_y
        c, alpha, beta = cfg.c, cfg.alpha, cfg.beta
        b = math.sqrt(3.0 * ell * r_y)
        params = SpectralParams(
            ell=ell, r_x=r_x, r_y=r_y, b=b, c=c, alpha=alpha, beta=beta
        )
        lam = eigen_closed("Lambda2Full", params)
        if beta + lam <= 0.0:
            raise ConfigError(
                "beta + lambda2 <= 0; the eigen-aligned start is undefined "
                "for this configuration"
            )
        x0 = 2.0 * (beta + lam) * epsilon / (r_x * abs(lam))
        num = (
            c * ell * beta + c * ell * lam - c * r_x * lam - beta * lam
            + c * r_x * beta * lam - lam * lam
        )
        y0 = num / (b * c * (beta + lam)) * x0
        z0 = beta * (1.0 + lam) / (beta + lam) * x0
        _middle_guard(x0, 0.9 * r_y * d_y / b, "x0", "0.9*r_y*D_Y/b")
        _middle_guard(y0, 0.9 * d_y, "y0", "0.9*D_Y")
        _eigen_residual(
            recursion_matrix("M2", params), np.array([x0, y0, z0]), lam
        )
        return IterateState(
            t=0, x=np.array([x0]), y=np.array([y0]), z=np.array([z0])
        )
    if kind == "PgdaOS":
        x0 = (3.0 * d_y + 2.0) * epsilon / (ell * d_y)
        _middle_guard(x0, 0.9, "x0", "0.9 (edge of the quadratic branch)")
        decay = ell * cfg.c * d_y / (d_y + 1.0)
        if not 0.0 < decay < 1.0:
            raise ConfigError("c*ell*gamma outside (0, 1); no contraction")
        return IterateState(t=0, x=np.array([x0]), y=np.array([d_y]))
    if kind in ("PsgdaOS", "SgdaOS"):
        gamma = d_y / (d_y + 1.0)
        params = SpectralParams(
            ell=ell, r_x=cfg.r_x, c=cfg.c, beta=cfg.beta, gamma=gamma
        )
        v1 = eigen_closed("V1Exact", params)
        lam = eigen_closed("Lambda3", params)
        x0 = (3.0 * d_y + 2.0) * epsilon / (ell * d_y)
        z0 = x0 / v1
        _middle_guard(x0, 0.9, "x0", "0.9 (edge of the quadratic branch)")
        _middle_guard(z0, 0.9, "z0", "0.9 (edge of the quadratic branch)")
        _eigen_residual(
            recursion_matrix("M3", params), np.array([x0, z0]), lam
        )
        return IterateState(
            t=0, x=np.array([x0]), y=np.array([d_y]), z=np.array([z0])
        )
    raise ConfigError(
        f"unknown eigen_init kind {kind!r}; known: {', '.join(EIGEN_INIT_KINDS)}"
    )


def frozen_dual_step(
    ell: float, d_y: float, cfg: Any, state: tuple[float, float]
) -> tuple[float, float]:
    """One step of the comparison process with the dual pinned at D_Y.

    Mirrors the smoothed x/z updates on the quadratic branch with
    y = d_y frozen, i.e. the affine map I + M3 applied Gauss-Seidel style
    (the z update consumes the new x).
    """
    x, z = state
    gamma = d_y / (d_y + 1.0)
    xn = x - cfg.c * (ell * gamma * x + cfg.r_x * (x - z))
    zn = z + cfg.beta * (xn - z)
    return xn, zn

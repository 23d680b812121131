"""Spectral machinery for the linearized solver recursions.

On the hard instances' middle branch each solver's update is affine, so one
step acts as state+ = (I + M) state for a small increment matrix M:

    M1 (2x2, state (x, y)):   perturbed descent-ascent
    M2 (3x3, state (x, y, z)): perturbed smoothed descent-ascent
    M3 (2x2, state (x, z)):   smoothed recursion with the dual pinned at D_Y

The smallest-magnitude eigenvalue of M governs the geometric decay rate
1 + lambda of the adversarial trajectory, hence the iteration-complexity
lower bound.  This module builds the matrices, evaluates every closed-form
eigen quantity, and cross-checks them with a small residual-verified
numeric eigensolver.

Numerically delicate closed forms are evaluated in cancellation-free
product form (the tiny root of a quadratic loses all precision in the
textbook formula when |B| << A^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, OracleError

__all__ = [
    "SpectralParams",
    "SpectralReport",
    "recursion_matrix",
    "eigen_closed",
    "eig_numeric",
    "a1_coeff",
    "b1_coeff",
    "b2_coeff",
    "c2_coeff",
    "a2_coeff",
    "e_disc",
    "omega",
    "build_report",
    "MATRIX_KINDS",
    "CLOSED_KINDS",
]

MATRIX_KINDS = ("M1", "M2", "M3")
CLOSED_KINDS = (
    "Lambda1",
    "Lambda2Full",
    "Lambda2Leading",
    "Lambda3",
    "V1Exact",
    "Omega",
    "EDisc",
)


@dataclass(frozen=True)
class SpectralParams:
    """Parameter bundle for the recursion matrices (subset per matrix).

    b is the instance coupling coefficient (b^2 = 3*ell*r_y on the
    game-stationarity hard instance); gamma = D_Y/(D_Y+1) enters only M3.
    Missing entries stay None and are reported by name when required.
    """

    ell: float | None = None
    r_x: float | None = None
    r_y: float | None = None
    b: float | None = None
    c: float | None = None
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None

    def require(self, *names: str) -> list[float]:
        vals = []
        for n in names:
            v = getattr(self, n)
            if v is None:
                raise ConfigError(f"spectral parameter '{n}' is required here")
            vals.append(float(v))
        return vals


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def _m1(p: SpectralParams) -> np.ndarray:
    ell, r_y, b, c, alpha = p.require("ell", "r_y", "b", "c", "alpha")
    return np.array(
        [
            [ell * c, -c * b],
            [alpha * b * (1 + ell * c), -alpha * r_y - c * b * b * alpha],
        ]
    )


def _m2(p: SpectralParams) -> np.ndarray:
    ell, r_x, r_y, b, c, alpha, beta = p.require(
        "ell", "r_x", "r_y", "b", "c", "alpha", "beta"
    )
    u = 1 + c * ell - c * r_x
    return np.array(
        [
            [c * ell - c * r_x, -c * b, c * r_x],
            [alpha * b * u, -r_y * alpha - c * alpha * b * b, c * r_x * alpha * b],
            [beta * u, -c * b * beta, -beta + beta * c * r_x],
        ]
    )


def _m3(p: SpectralParams) -> np.ndarray:
    ell, r_x, c, beta, gamma = p.require("ell", "r_x", "c", "beta", "gamma")
    a3 = ell * c * gamma + c * r_x
    return np.array(
        [
            [-a3, c * r_x],
            [beta * (1 - a3), -beta * (1 - c * r_x)],
        ]
    )


def recursion_matrix(which: str, params: SpectralParams) -> np.ndarray:
    """Increment matrix M of state+ = (I+M) state for the named recursion.

    Raises:
        ConfigError: unknown kind, or a required parameter is missing.
    """
    key = which.strip().upper()
    if key == "M1":
        return _m1(params)
    if key == "M2":
        return _m2(params)
    if key == "M3":
        return _m3(params)
    raise ConfigError(f"unknown recursion matrix kind {which!r}")


# ---------------------------------------------------------------------------
# Closed-form eigen quantities
# ---------------------------------------------------------------------------


def a1_coeff(p: SpectralParams) -> float:
    """A1 = trace(M1) = ell*c - alpha*r_y - alpha*b^2*c."""
    ell, r_y, b, c, alpha = p.require("ell", "r_y", "b", "c", "alpha")
    return ell * c - alpha * r_y - alpha * b * b * c


def b1_coeff(p: SpectralParams) -> float:
    """B1 = det(M1) = c*alpha*(b^2 - ell*r_y); equals 2*ell*c*alpha*r_y
    under the instance coupling b^2 = 3*ell*r_y."""
    ell, r_y, b, c, alpha = p.require("ell", "r_y", "b", "c", "alpha")
    return c * alpha * (b * b - ell * r_y)


def _lambda1(p: SpectralParams) -> float:
    a1, b1 = a1_coeff(p), b1_coeff(p)
    disc = a1 * a1 - 4 * b1
    scale = max(a1 * a1, abs(4 * b1), 1e-300)
    if disc < -1e-12 * scale:
        raise ConfigError(
            "outside the real-eigenvalue regime (negative discriminant for M1)"
        )
    s = math.sqrt(max(disc, 0.0))
    # product form of (A1 + sqrt(A1^2-4B1))/2: exact for the tiny root
    return -2.0 * b1 / (s - a1)


def b2_coeff(p: SpectralParams) -> float:
    """B2 = trace(M2)."""
    ell, r_x, r_y, b, c, alpha, beta = p.require(
        "ell", "r_x", "r_y", "b", "c", "alpha", "beta"
    )
    return (
        c * ell - c * r_x - b * b * c * alpha - beta + c * r_x * beta - alpha * r_y
    )


def c2_coeff(p: SpectralParams) -> float:
    """C2 = -(sum of principal 2x2 minors of M2)."""
    ell, r_x, r_y, b, c, alpha, beta = p.require(
        "ell", "r_x", "r_y", "b", "c", "alpha", "beta"
    )
    return (
        -(b * b) * c * alpha
        + c * ell * beta
        - b * b * c * alpha * beta
        + c * ell * alpha * r_y
        - c * r_x * alpha * r_y
        - alpha * beta * r_y
        + c * r_x * alpha * beta * r_y
    )


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def a2_coeff(p: SpectralParams) -> float:
    """Cardano resolvent A2 = -(2*B2^3 + 9*B2*C2 + 27*det(M2)).

    This is the characteristic-polynomial-consistent value; the golden test
    locks it against a high-precision evaluation of trace / minors / det.
    """
    b2, c2 = b2_coeff(p), c2_coeff(p)
    det = _det3(_m2(p))
    return -(2.0 * b2 ** 3 + 9.0 * b2 * c2 + 27.0 * det)


def _lambda2_full(p: SpectralParams) -> float:
    b2, c2, a2 = b2_coeff(p), c2_coeff(p), a2_coeff(p)
    s = b2 * b2 + 3.0 * c2
    disc = 4.0 * s ** 3 - a2 * a2
    scale = max(abs(4.0 * s ** 3), a2 * a2, 1e-300)
    if disc < -1e-12 * scale:
        raise ConfigError(
            "outside the real-eigenvalue regime (negative Cardano discriminant)"
        )
    d2 = complex(a2, math.sqrt(max(disc, 0.0)))
    if d2 == 0:
        raise ConfigError("degenerate Cardano resolvent (D2 = 0)")
    croot = d2 ** (1.0 / 3.0)  # principal complex cube root
    t1 = (1 + 1j * math.sqrt(3.0)) * s / (3.0 * 2 ** (2.0 / 3.0) * croot)
    t2 = (1 - 1j * math.sqrt(3.0)) / (6.0 * 2 ** (1.0 / 3.0)) * croot
    lam = b2 / 3.0 + t1 + t2
    # a wrong branch leaves an imaginary part at |lam| scale; correct
    # branches leave only rounding noise at the scale of the summed terms,
    # so the tolerance carries a machine-precision floor for that scale
    term_scale = abs(b2) / 3.0 + abs(t1) + abs(t2)
    tol = 1e-9 * abs(lam) + 32.0 * 2.22e-16 * term_scale
    if abs(lam.imag) > tol:
        raise OracleError(
            f"closed-form eigenvalue has imaginary part {lam.imag:.3e} "
            f"beyond tolerance {tol:.3e}"
        )
    return lam.real


def e_disc(p: SpectralParams) -> float:
    """Leading-order discriminant E of the small-eigenvalue expansion."""
    ell, r_x, r_y, alpha, beta = p.require("ell", "r_x", "r_y", "alpha", "beta")
    return (
        ell ** 2 * beta ** 2
        - 10 * r_x * ell * alpha * beta * r_y
        + 4 * ell ** 2 * alpha * beta * r_y
        + r_x ** 2 * alpha ** 2 * r_y ** 2
        + 4 * r_x * ell * alpha ** 2 * r_y ** 2
        + 4 * ell ** 2 * alpha ** 2 * r_y ** 2
    )


def _lambda2_leading(p: SpectralParams) -> float:
    ell, r_x, r_y, alpha, beta = p.require("ell", "r_x", "r_y", "alpha", "beta")
    e = e_disc(p)
    if e < 0:
        raise ConfigError("outside the leading-order regime (E < 0)")
    den = math.sqrt(e) + r_x * alpha * r_y + 2 * ell * alpha * r_y - ell * beta
    if den == 0:
        raise ConfigError("degenerate leading-order denominator")
    return -4.0 * ell * alpha * beta * r_y / den


def _a3_b3(p: SpectralParams) -> tuple[float, float]:
    ell, r_x, c, gamma = p.require("ell", "r_x", "c", "gamma")
    return ell * c * gamma + c * r_x, 1 - c * r_x


def _lambda3(p: SpectralParams) -> float:
    ell, c, beta, gamma = p.require("ell", "c", "beta", "gamma")
    a3, b3 = _a3_b3(p)
    u = a3 + b3 * beta
    disc = u * u - 4 * ell * c * beta * gamma
    scale = max(u * u, abs(4 * ell * c * beta * gamma), 1e-300)
    if disc < -1e-12 * scale:
        raise ConfigError(
            "outside the real-eigenvalue regime (negative discriminant for M3)"
        )
    # product form of (-u + sqrt(u^2 - 4*ell*c*beta*gamma))/2
    return -2.0 * ell * c * gamma * beta / (u + math.sqrt(max(disc, 0.0)))


def _v1_exact(p: SpectralParams) -> float:
    c, r_x, beta = p.require("c", "r_x", "beta")
    a3, b3 = _a3_b3(p)
    w = a3 - b3 * beta
    disc = w * w + 4 * c * r_x * beta * (1 - a3)
    if disc < 0:
        raise ConfigError("outside the real-eigenvalue regime (V1 discriminant)")
    return 2.0 * c * r_x / (w + math.sqrt(disc))


def omega(ell: float, r_x: float, r_y: float, alpha: float) -> float:
    """Dual-to-primal error amplification factor of the smoothed problem:

        (1/sqrt(2 r_y)) * ((r_x-ell) + alpha*ell*(3 r_x - 2 ell))
                        / (alpha * (r_x-ell)^{3/2})
    """
    if r_y <= 0 or r_x <= ell or alpha <= 0:
        raise ConfigError("omega requires r_y > 0, r_x > ell, alpha > 0")
    return (
        ((r_x - ell) + alpha * ell * (3 * r_x - 2 * ell))
        / (alpha * (r_x - ell) ** 1.5)
        / math.sqrt(2 * r_y)
    )


def _omega_from(p: SpectralParams) -> float:
    ell, r_x, r_y, alpha = p.require("ell", "r_x", "r_y", "alpha")
    return omega(ell, r_x, r_y, alpha)


_CLOSED = {
    "LAMBDA1": _lambda1,
    "LAMBDA2FULL": _lambda2_full,
    "LAMBDA2LEADING": _lambda2_leading,
    "LAMBDA3": _lambda3,
    "V1EXACT": _v1_exact,
    "OMEGA": _omega_from,
    "EDISC": e_disc,
}


def eigen_closed(which: str, params: SpectralParams) -> float:
    """Evaluate a closed-form eigen quantity by kind.

    Kinds: Lambda1, Lambda2Full, Lambda2Leading, Lambda3, V1Exact, Omega,
    EDisc.  Lambda2Full follows the published Cardano branch in complex
    arithmetic (principal cube root) and asserts the imaginary part is
    below 1e-9 relative before returning the real part.

    Raises:
        ConfigError: unknown kind, missing parameter, or a discriminant
            outside the real-eigenvalue regime.
    """
    key = which.strip().upper()
    try:
        fn = _CLOSED[key]
    except KeyError:
        raise ConfigError(f"unknown eigen quantity kind {which!r}") from None
    return fn(params)


# ---------------------------------------------------------------------------
# Numeric cross-check eigensolver
# ---------------------------------------------------------------------------


def _char_coeffs(m: np.ndarray) -> tuple[float, float, float]:
    # p(x) = x^3 - tr x^2 + m2 x - det
    tr = float(np.trace(m))
    m2 = float(
        (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        + (m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0])
        + (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
    )
    return tr, m2, _det3(m)


def _eigvec(m: np.ndarray, lam: complex) -> np.ndarray:
    a = m.astype(complex) - lam * np.eye(m.shape[0])
    n = m.shape[0]
    if n == 2:
        cands = [
            np.array([a[0, 1], -a[0, 0]]),
            np.array([a[1, 1], -a[1, 0]]),
        ]
    else:
        cands = [
            np.cross(a[i], a[j])
            for i, j in ((0, 1), (0, 2), (1, 2))
        ]
    best = max(cands, key=lambda v: float(np.linalg.norm(v)))
    nb = float(np.linalg.norm(best))
    if nb == 0.0:
        # whole rows vanished (e.g. scalar matrix): any direction works
        return np.eye(n, dtype=complex)[0]
    return best / nb


def eig_numeric(m: np.ndarray) -> list[complex]:
    """Eigenvalues of a 2x2 or 3x3 matrix, residual-verified.

    2x2 uses the cancellation-safe quadratic formula; 3x3 solves the real
    characteristic cubic and Newton-polishes each root.  Every returned
    eigenvalue carries an eigenvector residual ||(M - lam I) v|| at most
    1e-10 * ||M||_F (repeated roots are returned with multiplicity).

    Raises:
        ConfigError: unsupported shape.
        OracleError: residual check failed.
    """
    m = np.asarray(m, dtype=float)
    if m.shape == (2, 2):
        tr = float(np.trace(m))
        det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        disc = complex(tr * tr - 4 * det)
        s = cmath.sqrt(disc)
        # pick the sign that avoids cancellation in -b +/- s
        if (tr * s.real) < 0:
            s = -s
        r1 = (tr + s) / 2
        r2 = det / r1 if r1 != 0 else (tr - r1)
        roots = [r1, r2]
    elif m.shape == (3, 3):
        tr, m2, det = _char_coeffs(m)
        coeffs = [1.0, -tr, m2, -det]
        roots = [complex(r) for r in np.roots(coeffs)]

        def pval(x: complex) -> complex:
            return ((x - tr) * x + m2) * x - det

        def pder(x: complex) -> complex:
            return (3 * x - 2 * tr) * x + m2

        polished = []
        for r in roots:
            x, px = r, abs(pval(r))
            for _ in range(8):
                d = pder(x)
                if abs(d) < 1e-30:
                    break
                cand = x - pval(x) / d
                pc = abs(pval(cand))
                # near-multiple roots drown p(x) in rounding noise; only
                # accept strictly improving steps
                if pc >= 0.5 * px:
                    break
                x, px = cand, pc
                if px == 0.0:
                    break
            polished.append(x)
        # repeated roots stall plain Newton at ~eps^(1/m); their seed errors
        # are symmetric around the true root, so the cluster mean recovers
        # machine precision
        merged = list(polished)
        for i in range(3):
            cluster = [
                j
                for j in range(3)
                if abs(polished[j] - polished[i])
                <= 1e-4 * max(abs(polished[i]), abs(polished[j]))
            ]
            if len(cluster) > 1:
                mean = sum(polished[j] for j in cluster) / len(cluster)
                for j in cluster:
                    merged[j] = mean
        roots = merged
    else:
        raise ConfigError(f"eig_numeric supports 2x2 and 3x3 only, got {m.shape}")

    norm_m = float(np.linalg.norm(m))
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-14 * max(abs(r), 1.0):
            r = complex(r.real, 0.0)
        v = _eigvec(m, r)
        resid = float(np.linalg.norm((m.astype(complex) - r * np.eye(m.shape[0])) @ v))
        if resid > 1e-10 * max(norm_m, 1e-300):
            raise OracleError(
                f"eigenpair residual {resid:.3e} exceeds 1e-10*||M|| for lam={r}"
            )
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# Report assembly (consumed by the CLI `spectral` subcommand)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralReport:
    """Closed-form vs numeric comparison at one parameter point."""

    matrix: str
    closed_kind: str
    numeric_eigenvalues: tuple[complex, ...]
    closed_value: float
    abs_deviation: float
    rel_deviation: float
    sign_ok: bool
    order_ratio: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "matrix": self.matrix,
            "closed_kind": self.closed_kind,
            "numeric_eigenvalues": [
                {"re": z.real, "im": z.imag} for z in self.numeric_eigenvalues
            ],
            "closed_value": self.closed_value,
            "abs_deviation": self.abs_deviation,
            "rel_deviation": self.rel_deviation,
            "sign_ok": self.sign_ok,
            "order_ratio": self.order_ratio,
        }


_MATRIX_FOR = {"LAMBDA1": "M1", "LAMBDA2FULL": "M2", "LAMBDA3": "M3"}


def build_report(
    closed_kind: str,
    params: SpectralParams,
    order_ratio: float | None = None,
) -> SpectralReport:
    """Compare a closed-form eigenvalue against the numeric spectrum.

    The deviation is measured to the nearest numeric eigenvalue; sign_ok
    records the strict negativity the theory predicts.
    """
    key = closed_kind.strip().upper()
    if key not in _MATRIX_FOR:
        raise ConfigError(
            f"build_report accepts eigenvalue kinds only, got {closed_kind!r}"
        )
    matrix = _MATRIX_FOR[key]
    mat = recursion_matrix(matrix, params)
    closed = eigen_closed(closed_kind, params)
    numeric = tuple(eig_numeric(mat))
    dev = min(abs(z - closed) for z in numeric)
    rel = dev / max(abs(closed), 1e-300)
    return SpectralReport(
        matrix=matrix,
        closed_kind=closed_kind,
        numeric_eigenvalues=numeric,
        closed_value=closed,
        abs_deviation=float(dev),
        rel_deviation=float(rel),
        sign_ok=closed < 0.0,
        order_ratio=order_ratio,
    )


# ---------------------------------------------------------------------------
# Default parameter grids
# ---------------------------------------------------------------------------

_GRID_ELL = (0.5, 0.8, 1.3, 2.1)
_GRID_DY = (0.5, 1.0, 2.0, 3.5, 5.0)
_GRID_EPS = tuple(2.0**-k for k in range(2, 7))


def _coupled_m1(ell: float, d_y: float, eps: float) -> SpectralParams:
    r_y = eps / d_y
    alpha = 1.0 / (4.0 * (ell + r_y))
    c = min(
        r_y * r_y * alpha / (16.0 * ell * ell),
        r_y / (ell * (3.0 * r_y + 2.0 * ell)),
    )
    return SpectralParams(
        ell=ell, r_y=r_y, b=math.sqrt(3.0 * ell * r_y), c=c, alpha=alpha
    )


def _coupled_m2(ell: float, d_y: float, eps: float) -> SpectralParams:
    r_y = eps / d_y
    r_x = 4.0 * ell
    c = 0.9 / (r_x + ell)
    alpha = min(
        1.0 / (11.0 * ell),
        c * c * (r_x - ell) ** 2 / (4.0 * ell * (1.0 + c * (r_x - ell)) ** 2),
    )
    om = omega(ell, r_x, r_y, alpha)
    beta = min(
        1.0 / 36.0,
        (r_x - ell) ** 2 / (384.0 * r_x * (r_x + ell) ** 2),
        1.0 / (384.0 * r_x * alpha * om * om),
        r_y / ell,
    )
    return SpectralParams(
        ell=ell,
        r_x=r_x,
        r_y=r_y,
        b=math.sqrt(3.0 * ell * r_y),
        c=c,
        alpha=alpha,
        beta=beta,
        gamma=d_y / (d_y + 1.0),
    )


def _coupled_m3(ell: float, d_y: float, eps: float) -> SpectralParams:
    r_x = 4.0 * ell
    c = 0.9 / (r_x + ell)
    beta = min(
        eps * eps / (ell * ell * d_y * d_y),
        1.0 / 36.0,
        (r_x - ell) ** 2 / (384.0 * r_x * (r_x + ell) ** 2),
    )
    return SpectralParams(
        ell=ell, r_x=r_x, c=c, beta=beta, gamma=d_y / (d_y + 1.0)
    )


def _m2_margin_ok(p: SpectralParams) -> bool:
    # near the vanishing-discriminant surface of the depressed cubic no
    # float64 route resolves the middle root to 1e-8, so the default
    # grid stays clear of it
    b2, c2, a2 = b2_coeff(p), c2_coeff(p), a2_coeff(p)
    disc = 4.0 * (b2 * b2 + 3.0 * c2) ** 3 - a2 * a2
    return disc >= 2e-4 * a2 * a2


def condition_grid(which: str, n: int = 100) -> list[SpectralParams]:
    """Deterministic lattice of step-size-coupled parameter points.

    Every point satisfies the standing step-size conditions of the
    recursion it feeds, so closed-form eigenvalues are defined and
    strictly negative at each.  Raises when the lattice cannot supply n
    points.
    """
    key = which.strip().upper()
    builders = {
        "LAMBDA1": (_coupled_m1, lambda p: True),
        "LAMBDA2FULL": (_coupled_m2, _m2_margin_ok),
        "LAMBDA3": (_coupled_m3, lambda p: True),
    }
    if key not in builders:
        raise ConfigError(
            f"no default grid for {which!r}; choose one of "
            "Lambda1, Lambda2Full, Lambda3"
        )
    build, keep = builders[key]
    out: list[SpectralParams] = []
    for scale in (1.0, 0.71, 1.37):  # extra shells if the filter rejects
        for ell in _GRID_ELL:
            for d_y in _GRID_DY:
                for eps in _GRID_EPS:
                    p = build(ell * scale, d_y, eps)
                    if keep(p):
                        out.append(p)
                    if len(out) == n:
                        return out
    raise ConfigError(
        f"default grid for {which!r} has only {len(out)} valid points, "
        f"needs {n}"
    )

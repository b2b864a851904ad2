"""Arc-length/normal-distance parabola density and its Jacobian correction.

The raw density N1(l(x)) * N2(p(x)) (l = signed arc length to the nearest
point of y = a*x^2, p = normal distance) is not a probability density: the
map from (arc length, normal offset) to the plane distorts area by
|1 - kappa*eta| (kappa the signed curvature at the foot, eta the signed
normal offset), so the honest density divides by that factor. The
normalization experiment integrates both on a Simpson grid and reports the
fold mass that the single-nearest-foot correction necessarily excludes.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import BeyondCurvatureCenter

# Jacobian factors at/below this are treated as folded (the map collapses)
FOLD_EPS = 1e-9

DEFAULT_A_GRID = (0.25, 0.5, 1.0)
DEFAULT_SIGMA_GRID = (0.25, 0.5, 1.0)
DEFAULT_BOX = 5.0
DEFAULT_N = 500


@dataclass(frozen=True)
class AcaParabolaModel:
    a: float
    sigma1: float  # along-curve (arc length) axis
    sigma2: float  # normal axis

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("a must be nonzero")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ValueError("sigmas must be positive")


@dataclass(frozen=True)
class ProjectionResult:
    t0: float  # parameter of the nearest parabola point (t, a t^2)
    p: float  # distance to it
    l: float  # arc length from the vertex, signed by sign(t0)
    side: str  # above | below the graph (empty for points on it)


def _t0_candidates_scalar(a, px, py):
    """Real roots of 2 a^2 t^3 + (1 - 2 a py) t - px = 0 (foot candidates)."""
    q = (1.0 - 2.0 * a * py) / (6.0 * a * a)
    r = px / (4.0 * a * a)
    disc = q ** 3 + r ** 2
    if disc > 0.0:
        s = math.sqrt(disc)
        return [float(np.cbrt(r + s) + np.cbrt(r - s))]
    if disc == 0.0:
        c = float(np.cbrt(r))
        return [2.0 * c, -c]
    phi = math.acos(r / math.sqrt((-q) ** 3))
    return [
        2.0 * math.sqrt(-q) * math.cos((phi + 2.0 * math.pi * i) / 3.0) for i in range(3)
    ]


def project_to_parabola(m, point):
    """Nearest point of y = a x^2 via the closed-form cubic.

    All critical-point candidates are compared by distance (ties to the
    smaller t), which also covers the degenerate double-root case.
    """
    px, py = float(point[0]), float(point[1])
    cands = _t0_candidates_scalar(m.a, px, py)
    best_t, best_d2 = None, None
    for t in sorted(cands):
        d2 = (t - px) ** 2 + (m.a * t * t - py) ** 2
        if best_d2 is None or d2 < best_d2 - 1e-15:
            best_t, best_d2 = t, d2
    p = math.sqrt(best_d2)
    l = math.copysign(arc_length(m, best_t), best_t) if best_t != 0.0 else 0.0
    gap = py - m.a * px * px
    side = "above" if gap > 0 else ("below" if gap < 0 else "")
    return ProjectionResult(t0=best_t, p=p, l=l, side=side)


def arc_length(m, t0):
    """Arc length of y = a x^2 from the vertex to (t0, a t0^2), as a magnitude.

    Callers wanting a signed coordinate apply sign(t0) themselves (that is the
    convention ProjectionResult.l uses).
    """
    aa = abs(m.a)
    t = abs(t0)
    root = math.sqrt(1.0 + 4.0 * aa * aa * t * t)
    return 0.5 * t * root + math.asinh(2.0 * aa * t) / (4.0 * aa)


def curvature_radius(m, t0):
    """Radius of the osculating circle at (t0, a t0^2)."""
    return (1.0 + 4.0 * m.a * m.a * t0 * t0) ** 1.5 / (2.0 * abs(m.a))


def orientation_side(m, point, proj):
    """above/below from the sign of det([[p1-x(t0), x'(t0)], [p2-y(t0), y'(t0)]]).

    Negative determinant means the point sits on the upward-normal side of its
    foot, i.e. above the graph; this never vanishes for off-curve points since
    the foot-to-point vector is normal to the tangent.
    """
    n1 = point[0] - proj.t0
    n2 = point[1] - m.a * proj.t0 * proj.t0
    det = n1 * 2.0 * m.a * proj.t0 - n2
    return "above" if det < 0 else "below"


def aca_log_density(m, point, corrected=False):
    """Raw: ln N(l | 0, sigma1^2) + ln N(p | 0, sigma2^2). Corrected: raw minus
    ln|1 - kappa*eta| (kappa signed curvature at the foot, eta = +p above the
    graph / -p below), the area distortion of the arc-length/normal map.

    Raises BeyondCurvatureCenter when the factor is <= 0, i.e. the point lies
    at or past the curvature center on the concave side, where the map folds.
    """
    proj = project_to_parabola(m, point)
    raw = (
        -math.log(2.0 * math.pi * m.sigma1 * m.sigma2)
        - 0.5 * (proj.l / m.sigma1) ** 2
        - 0.5 * (proj.p / m.sigma2) ** 2
    )
    if not corrected:
        return raw
    factor = _jacobian_factor(m.a, proj.t0, proj.p, proj.side != "below")
    if factor <= FOLD_EPS:
        raise BeyondCurvatureCenter(
            f"normal offset {proj.p:.6g} reaches the curvature center at t0={proj.t0:.6g}"
        )
    return raw - math.log(factor)


def _jacobian_factor(a, t0, p, above):
    kappa = 2.0 * a / (1.0 + 4.0 * a * a * t0 * t0) ** 1.5
    eta = np.where(above, p, -p)
    return 1.0 - kappa * eta


def _project_t0_grid(a, px, py):
    """Vectorized nearest-foot parameter for arrays of points."""
    q = (1.0 - 2.0 * a * py) / (6.0 * a * a)
    r = px / (4.0 * a * a)
    disc = q ** 3 + r ** 2
    nonneg = disc >= 0.0
    s = np.sqrt(np.where(nonneg, disc, 0.0))
    t_single = np.cbrt(r + s) + np.cbrt(r - s)
    mq = np.where(nonneg, 1.0, -q)
    phi = np.arccos(np.clip(np.where(nonneg, 0.0, r) / np.sqrt(mq ** 3), -1.0, 1.0))
    best_t = t_single
    d2_single = (t_single - px) ** 2 + (a * t_single ** 2 - py) ** 2
    best_d2 = np.where(nonneg, d2_single, np.inf)
    for i in range(3):
        t = 2.0 * np.sqrt(mq) * np.cos((phi + 2.0 * np.pi * i) / 3.0)
        d2 = (t - px) ** 2 + (a * t * t - py) ** 2
        closer = ~nonneg & (
            (d2 < best_d2 - 1e-15) | (np.isclose(d2, best_d2, rtol=0, atol=1e-15) & (t < best_t))
        )
        best_t = np.where(closer, t, best_t)
        best_d2 = np.where(closer, d2, best_d2)
    return best_t


def _log_density_grid(m, px, py):
    """(raw_log, factor) arrays for point grids; factor is the Jacobian term."""
    a = m.a
    t0 = _project_t0_grid(a, px, py)
    p = np.hypot(px - t0, py - a * t0 * t0)
    aa = abs(a)
    root = np.sqrt(1.0 + 4.0 * a * a * t0 * t0)
    l = 0.5 * t0 * root + np.arcsinh(2.0 * aa * t0) / (4.0 * aa)
    raw = (
        -math.log(2.0 * math.pi * m.sigma1 * m.sigma2)
        - 0.5 * (l / m.sigma1) ** 2
        - 0.5 * (p / m.sigma2) ** 2
    )
    factor = _jacobian_factor(a, t0, p, py > a * px * px)
    return raw, factor


def fold_mass(m, tail=40.0):
    """Mass of the base (arc, normal) Gaussian lying beyond the cut locus,
    i.e. normal offsets past c(t) = sqrt(1 + 4 a^2 t^2) / (2|a|) on the concave
    side. This is exactly what the single-nearest-foot corrected density loses,
    so its integral comes out at 1 minus this. Computed by 1-D quadrature."""
    a, s1, s2 = m.a, m.sigma1, m.sigma2
    aa = abs(a)

    def g(t):
        root = np.sqrt(1.0 + 4.0 * a * a * t * t)
        l = 0.5 * t * root + np.arcsinh(2.0 * aa * t) / (4.0 * aa)
        cut = root / (2.0 * aa)
        n1 = np.exp(-0.5 * (l / s1) ** 2) / (math.sqrt(2.0 * math.pi) * s1)
        q = 0.5 * special.erfc(cut / (s2 * math.sqrt(2.0)))
        return n1 * q * root

    # g is even in t and peaks at t=0; integrating outward from the peak keeps
    # the adaptive rule from missing a narrow ridge
    span = tail * max(m.sigma1, 1.0)
    val, _ = integrate.quad(g, 0.0, span, limit=200)
    return 2.0 * float(val)


def normalization_table(
    a_grid=DEFAULT_A_GRID,
    sigma_grid=DEFAULT_SIGMA_GRID,
    box=DEFAULT_BOX,
    n=DEFAULT_N,
):
    """Simpson-integrate the raw and corrected densities for every (a, s1, s2)
    combination over [-box, box]^2 with n segments per axis.

    Returns a list of dicts with keys a, sigma1, sigma2, raw_integral,
    corrected_integral, excluded_mass. Grid nodes where the Jacobian factor
    has collapsed (<= FOLD_EPS, the cut-locus cusp) contribute nothing to the
    corrected integral; excluded_mass is the fold mass the correction cannot
    recover (see fold_mass).
    """
    n = int(n)
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    xs = np.linspace(-box, box, n + 1)
    px, py = np.meshgrid(xs, xs, indexing="ij")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    weights = np.outer(w, w) * (2.0 * box / n) ** 2 / 9.0
    rows = []
    for a in a_grid:
        for s1 in sigma_grid:
            for s2 in sigma_grid:
                m = AcaParabolaModel(a, s1, s2)
                raw_log, factor = _log_density_grid(m, px, py)
                raw = np.exp(raw_log)
                ok = factor > FOLD_EPS
                corr = np.where(ok, raw / np.where(ok, factor, 1.0), 0.0)
                rows.append(
                    {
                        "a": a,
                        "sigma1": s1,
                        "sigma2": s2,
                        "raw_integral": float(np.sum(weights * raw)),
                        "corrected_integral": float(np.sum(weights * corr)),
                        "excluded_mass": fold_mass(m),
                    }
                )
    return rows

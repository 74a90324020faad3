"""Closed-form limit shape of random lozenge tilings of a hexagon.

Normalized coordinates put the origin at the centre of the alpha,beta,gamma
hexagon (horizontal sides of length beta).  The inscribed ellipse is the
zero set of :func:`ellipse_E`; inside it the density of vertical lozenges is
``arccot(Q/sqrt(E))/pi``, outside it the density is frozen at 0 or 1.

Along a single horizontal line the same density is described by the
cumulative profile ``A`` on ``[0, 1]`` built from the quadratics ``f1`` and
``f2`` (:class:`LineParams`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
from scipy import integrate

SQRT3 = math.sqrt(3.0)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def arccot(z):
    """Inverse cotangent with range ``(0, pi)``; continuous through 0."""
    return np.pi / 2.0 - np.arctan(z)


class Region(Enum):
    ELLIPSE_INTERIOR = "interior"
    R0 = "R0"
    R1 = "R1"
    SINGULAR_POINT = "singular"
    BOUNDARY = "boundary"  # on the inscribed ellipse, away from singular points
    OUTSIDE = "outside"


class SingularPointError(ValueError):
    """The density is discontinuous (undefined) at the four singular points."""


# ---------------------------------------------------------------------------
# hexagon geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) <= 0:
            raise ValueError(f"side lengths must be positive: {self}")

    def scaled(self, s: float) -> "ShapeParams":
        return ShapeParams(s * self.alpha, s * self.beta, s * self.gamma)

    @property
    def area(self) -> float:
        al, be, ga = self.alpha, self.beta, self.gamma
        return (al * be + be * ga + al * ga) * SQRT3 / 2.0

    @property
    def y_top(self) -> float:
        return SQRT3 / 4.0 * (self.alpha + self.gamma)

    @property
    def depth(self) -> float:
        """Normalized distance (in line units) from the top side to the bottom side."""
        return self.alpha + self.gamma

    def x_bounds(self, y):
        """Left and right ends of the horizontal chord at height y."""
        al, be, ga = self.alpha, self.beta, self.gamma
        y = np.asarray(y, dtype=float)
        xl = np.maximum(y / SQRT3 - (be + ga) / 2.0, -y / SQRT3 - (al + be) / 2.0)
        xr = np.minimum((al + be) / 2.0 - y / SQRT3, y / SQRT3 + (be + ga) / 2.0)
        return xl, xr

    def vertices(self) -> np.ndarray:
        """Hexagon corners, counter-clockwise from the top-right corner."""
        al, be, ga = self.alpha, self.beta, self.gamma
        yt = self.y_top
        pts = [
            ((al - ga + 2 * be) / 4.0, yt),          # top right
            ((al - ga - 2 * be) / 4.0, yt),          # top left
            (-(al + 2 * be + ga) / 4.0, SQRT3 / 4.0 * (ga - al)),  # leftmost
            ((al - ga - 2 * be) / 4.0 - (al - ga) / 2.0, -yt),    # bottom left
            ((al - ga + 2 * be) / 4.0 - (al - ga) / 2.0, -yt),    # bottom right
            ((al + 2 * be + ga) / 4.0, SQRT3 / 4.0 * (al - ga)),  # rightmost
        ]
        return np.array(pts)

    def contains(self, x, y, tol: float = 1e-12):
        xl, xr = self.x_bounds(y)
        return (np.abs(y) <= self.y_top + tol) & (x >= xl - tol) & (x <= xr + tol)

    # -- the inscribed ellipse ------------------------------------------------

    @cached_property
    def tangency_points(self) -> np.ndarray:
        """Point where the inscribed ellipse touches each side.

        Side i joins ``vertices()[i]`` and ``vertices()[i+1]``; sides 0 and 3
        are the horizontal (beta) sides.
        """
        v = self.vertices()
        out = []
        for i in range(6):
            p0, p1 = v[i], v[(i + 1) % 6]
            # E is quadratic along the side and has its (double) zero at the maximum
            e0, eh, e1 = (float(ellipse_E(self, *(p0 + s * (p1 - p0)))) for s in (0.0, 0.5, 1.0))
            a2 = 2 * e0 - 4 * eh + 2 * e1
            a1 = -3 * e0 + 4 * eh - e1
            s = -a1 / (2 * a2)
            out.append(p0 + s * (p1 - p0))
        return np.array(out)

    @cached_property
    def singular_points(self) -> np.ndarray:
        """Tangency points on the sides of length alpha or gamma."""
        return self.tangency_points[[1, 2, 4, 5]]

    @cached_property
    def _sector_angles(self) -> np.ndarray:
        tp = self.tangency_points
        return np.arctan2(tp[:, 1], tp[:, 0])


def ellipse_E(sp: ShapeParams, x, y):
    """Quadratic that is positive exactly inside the inscribed ellipse."""
    al, be, ga = sp.alpha, sp.beta, sp.gamma
    s = al + 2 * be + ga
    return 3 * al * be * ga * (al + be + ga) - (
        3 * (al + ga) ** 2 * x ** 2
        - 2 * SQRT3 * s * (al - ga) * x * y
        + (s ** 2 - 4 * al * ga) * y ** 2
    )


def hyperbola_Q(sp: ShapeParams, x, y):
    al, be, ga = sp.alpha, sp.beta, sp.gamma
    return SQRT3 / 2.0 * (4.0 / 3.0 * y ** 2 - 4 * x ** 2 + be ** 2 + al * be + be * ga - al * ga)


def _frozen_value(sp: ShapeParams, x, y):
    """0 or 1 according to the corner region containing (x, y).

    Each frozen component is the part of the angular sector (seen from the
    centre) between two consecutive tangency points that lies outside the
    ellipse.  Sector i+1 ends at corner ``vertices()[i+1]``; corners 2
    (leftmost) and 5 (rightmost) carry density 1.
    """
    ang = np.arctan2(y, x)
    ta = sp._sector_angles
    # tangency points are counter-clockwise; index of the sector start
    rel = np.mod(ang[..., None] - ta, 2 * np.pi)
    nxt = np.mod(np.roll(ta, -1) - ta, 2 * np.pi)
    inside = rel < nxt
    i = np.argmax(inside, axis=-1)
    corner = (i + 1) % 6
    return np.where((corner == 2) | (corner == 5), 1.0, 0.0)


def density_grid(sp: ShapeParams, x, y) -> np.ndarray:
    """Vectorised density; NaN outside the hexagon and at singular points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    E = ellipse_E(sp, x, y)
    Q = hyperbola_Q(sp, x, y)
    out = np.empty(x.shape)
    pos = E > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[pos] = arccot(Q[pos] / np.sqrt(E[pos])) / np.pi
    if (~pos).any():
        out[~pos] = _frozen_value(sp, x[~pos], y[~pos])
    out[~sp.contains(x, y, tol=1e-9)] = np.nan
    return out


def classify_region(sp: ShapeParams, x: float, y: float, tol: float = 1e-9) -> Region:
    scale = sp.alpha + sp.beta + sp.gamma
    if not sp.contains(x, y, tol=tol * scale):
        return Region.OUTSIDE
    d = np.hypot(sp.singular_points[:, 0] - x, sp.singular_points[:, 1] - y)
    if d.min() <= tol * scale:
        return Region.SINGULAR_POINT
    E = float(ellipse_E(sp, x, y))
    if abs(E) <= tol * scale ** 4:
        return Region.BOUNDARY
    if E > 0:
        return Region.ELLIPSE_INTERIOR
    return Region.R1 if _frozen_value(sp, np.array(x), np.array(y)) == 1.0 else Region.R0


def density_P(sp: ShapeParams, x: float, y: float) -> float:
    """Limiting density of vertical lozenges near (x, y)."""
    reg = classify_region(sp, x, y)
    if reg is Region.SINGULAR_POINT:
        raise SingularPointError(f"density undefined at singular point ({x}, {y})")
    if reg is Region.OUTSIDE:
        raise ValueError(f"({x}, {y}) lies outside the hexagon")
    if reg is Region.R0:
        return 0.0
    if reg is Region.R1:
        return 1.0
    if reg is Region.BOUNDARY:
        return float(_frozen_value(sp, np.array(x), np.array(y)))
    E = float(ellipse_E(sp, x, y))
    return float(arccot(float(hyperbola_Q(sp, x, y)) / math.sqrt(E)) / math.pi)


# ---------------------------------------------------------------------------
# one horizontal line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineParams:
    """Per-line data: vertical fraction ``lam`` and boundary ramps ``rho_l``, ``rho_r``."""

    lam: float
    rho_l: float
    rho_r: float
    kappa: float | None = None
    roots: tuple[float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")
        if self.rho_l < 0 or self.rho_r < 0:
            raise ValueError("rho_l and rho_r must be non-negative")
        object.__setattr__(self, "roots", _roots(self))

    @property
    def rho(self) -> float:
        return self.rho_l + self.rho_r

    @property
    def _p(self) -> float:
        return self.lam ** 2 + self.rho * self.lam - self.rho_r

    @property
    def _q(self) -> float:
        return self.lam ** 2 + self.rho * self.lam - self.rho_l

    def f2_coeffs(self) -> tuple[float, float, float]:
        """``(A, B, C)`` with ``f2(t) = A t^2 + B t + C``."""
        s2 = (self.rho + 2 * self.lam) ** 2
        return -s2, s2 - self._p ** 2 + self._q ** 2, -self._q ** 2

    def discriminant(self) -> float:
        A, B, C = self.f2_coeffs()
        return B * B - 4 * A * C

    def discriminant_product(self) -> float:
        lam, rl, rr, rho = self.lam, self.rho_l, self.rho_r, self.rho
        return 16 * lam * (1 - lam) * (lam + rr) * (lam + rl) * (lam + rho) * (lam + rho + 1)


def _roots(lp: LineParams) -> tuple[float, float]:
    A, B, C = lp.f2_coeffs()
    D = max(lp.discriminant(), 0.0)
    if A == 0:
        return (0.0, 1.0)
    sq = math.sqrt(D)
    qq = -0.5 * (B + math.copysign(sq, B))
    if qq == 0:
        r = -B / (2 * A)
        return (r, r)
    r1, r2 = sorted((qq / A, C / qq))
    return (r1, r2)


def line_params(sp: ShapeParams, kappa: float) -> LineParams:
    """Line at fraction ``kappa`` of the way down, rescaled to unit length."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must be in (0, 1), got {kappa}")
    al, be, ga = sp.alpha, sp.beta, sp.gamma
    k = kappa * (al + ga)
    m = min(k, al, ga, al + ga - k)
    n = be + m
    return LineParams(m / n, abs(al - k) / n, abs(ga - k) / n, kappa)


def f1(lp: LineParams, t):
    p, q = lp._p, lp._q
    return 2 * t * (1 - t) - p * t - q * (1 - t)


def f2(lp: LineParams, t):
    s2 = (lp.rho + 2 * lp.lam) ** 2
    return s2 * t * (1 - t) - lp._p ** 2 * t - lp._q ** 2 * (1 - t)


def roots(lp: LineParams, check: bool = True) -> tuple[float, float]:
    """Roots ``r1 <= r2`` of f2; optionally assert the discriminant identity."""
    if check:
        d1, d2 = lp.discriminant(), lp.discriminant_product()
        if abs(d1 - d2) > 1e-12 * max(abs(d2), 1e-300) and abs(d1 - d2) > 1e-15:
            raise AssertionError(f"discriminant mismatch: {d1} vs {d2}")
    return lp.roots


def _edge_value(lp: LineParams, r: float) -> float:
    v = f1(lp, r)
    scale = 1.0 + abs(lp._p) + abs(lp._q)
    if abs(v) <= 1e-12 * scale:
        return 0.5
    return 0.0 if v > 0 else 1.0


def aprime(lp: LineParams, t):
    """Limiting density of verticals at position t in [0, 1] along the line."""
    r1, r2 = lp.roots
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape)
    mid = (t > r1) & (t < r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        tm = t[mid]
        out[mid] = arccot(f1(lp, tm) / np.sqrt(np.maximum(f2(lp, tm), 0.0))) / np.pi
    out[t <= r1] = _edge_value(lp, r1)
    out[t >= r2] = _edge_value(lp, r2)
    return out if out.ndim else float(out)


def a_cumulative(lp: LineParams, t: float, tol: float = 1e-9) -> float:
    """``A(t) = integral_0^t A'``, by adaptive quadrature."""
    if t <= 0:
        return 0.0
    t = min(t, 1.0)
    r1, r2 = lp.roots
    total = _edge_value(lp, r1) * min(t, max(r1, 0.0))
    lo, hi = max(r1, 0.0), min(t, r2)
    if hi > lo:
        val, err = integrate.quad(lambda s: aprime(lp, s), lo, hi, epsabs=tol * 1e-2, epsrel=1e-12, limit=200)
        if err > tol:
            raise RuntimeError(f"quadrature did not converge (error estimate {err:g})")
        total += val
    if t > r2:
        total += _edge_value(lp, r2) * (t - max(r2, 0.0))
    return total


def _piece_integrals(fn, lo: np.ndarray, hi: np.ndarray, sing: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integrals of ``fn`` over ``[lo, hi]`` pieces.

    ``fn`` may have square-root behaviour at the points listed in ``sing``; a
    piece starting or ending at such a point uses ``s = end +- width * u^2``,
    which makes the integrand smooth in u.
    """
    width = hi - lo
    u = (_GL_X + 1) / 2
    w = _GL_W / 2
    at_lo = np.isin(lo, sing)
    at_hi = np.isin(hi, sing) & ~at_lo
    nodes = lo[:, None] + width[:, None] * u
    jac = np.broadcast_to(width[:, None], nodes.shape).copy()
    nodes[at_lo] = lo[at_lo, None] + width[at_lo, None] * u ** 2
    jac[at_lo] = 2 * width[at_lo, None] * u
    nodes[at_hi] = hi[at_hi, None] - width[at_hi, None] * u ** 2
    jac[at_hi] = 2 * width[at_hi, None] * u
    return (fn(nodes.ravel()).reshape(nodes.shape) * jac * w).sum(axis=1)


def a_profile(lp: LineParams, ts) -> np.ndarray:
    """``A`` on an increasing grid of points, by piecewise Gauss-Legendre."""
    ts = np.asarray(ts, dtype=float)
    r1, r2 = lp.roots
    inner = [r for r in (r1, r2) if 0.0 < r < 1.0]
    # the midpoint keeps a single piece from touching both roots
    cuts = np.unique(np.concatenate([ts, [0.0], inner, [0.5 * (r1 + r2)]]))
    cuts = cuts[(cuts >= 0.0) & (cuts <= ts.max())]
    pieces = _piece_integrals(lambda s: aprime(lp, s), cuts[:-1], cuts[1:], np.array(inner))
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    return np.interp(ts, cuts, cum)


def hilbert_residual(lp: LineParams, t: float) -> float:
    """Hilbert transform of ``A' + J'`` at t (``J' = 1/2`` on the two ramps).

    Vanishes on ``(r1, r2)``; off that interval its sign encodes optimality.
    """
    r1, r2 = lp.roots
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    rl, rr = lp.rho_l, lp.rho_r
    # ramps: (1/2) * integral 1/(t-s) over [-rho_l, 0] and [1, 1+rho_r]
    ramp = 0.5 * (math.log(t + rl) - math.log(t) + math.log(1 - t) - math.log(1 + rr - t))

    # A' part: PV integral_0^1 A'(s)/(t-s) ds.  Subtracting A'(t) leaves a
    # bounded integrand; the subtracted constant integrates to log(t/(1-t)).
    gt = float(aprime(lp, t))
    cuts = sorted({0.0, 1.0, t, *(r for r in (r1, r2) if 0.0 < r < 1.0)})
    total = gt * (math.log(t) - math.log(1 - t))
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for lo, hi in zip(cuts, cuts[1:]):
                val, _ = integrate.quad(
                    lambda s: (aprime(lp, s) - gt) / (t - s) if s != t else 0.0,
                    lo, hi, limit=200, epsabs=1e-12,
                )
                total += val
        except integrate.IntegrationWarning as exc:
            raise RuntimeError(f"principal-value quadrature failed at t={t}: {exc}") from exc
    return (ramp + total) / math.pi


def line_coordinates(sp: ShapeParams, x, y):
    """Map a point to (kappa, t): fractional depth and position along its line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    kappa = (sp.y_top - y) / (SQRT3 / 2.0) / sp.depth
    xl, xr = sp.x_bounds(y)
    return kappa, (x - xl) / (xr - xl)


def consistency_density_vs_line(sp: ShapeParams, points) -> float:
    """Max ``|density_P - aprime|`` over the points, comparing both closed forms."""
    worst = 0.0
    for x, y in points:
        kappa, t = line_coordinates(sp, x, y)
        lp = line_params(sp, float(kappa))
        d = abs(density_P(sp, x, y) - aprime(lp, float(t)))
        worst = max(worst, d)
    return worst


# ---------------------------------------------------------------------------
# integrals over the hexagon
# ---------------------------------------------------------------------------

def _ellipse_crossings(sp: ShapeParams, y: float) -> list[float]:
    """x where the horizontal line at height y meets the ellipse."""
    al, be, ga = sp.alpha, sp.beta, sp.gamma
    s = al + 2 * be + ga
    A = 3 * (al + ga) ** 2
    B = -2 * SQRT3 * s * (al - ga) * y
    C = (s ** 2 - 4 * al * ga) * y ** 2 - 3 * al * be * ga * (al + be + ga)
    disc = B * B - 4 * A * C
    if disc <= 0:
        return []
    r = math.sqrt(disc)
    return sorted(((-B - r) / (2 * A), (-B + r) / (2 * A)))


def _row_integral(sp: ShapeParams, y: float, x0: float, x1: float, tol: float = 1e-11) -> float:
    """``integral_{x0}^{x1} P(x, y) dx`` with breakpoints at the ellipse."""
    cuts = [x0] + [c for c in _ellipse_crossings(sp, y) if x0 < c < x1] + [x1]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        mid = 0.5 * (lo + hi)
        if ellipse_E(sp, mid, y) <= 0:
            total += (hi - lo) * float(_frozen_value(sp, np.array(mid), np.array(y)))
            continue
        val, _ = integrate.quad(_interior_density_row(sp, y), lo, hi, epsabs=tol, epsrel=10 * tol, limit=100)
        total += val
    return total


def _interior_density_row(sp: ShapeParams, y: float):
    """Scalar ``x -> P(x, y)`` valid inside the ellipse (E and Q expanded in x)."""
    al, be, ga = sp.alpha, sp.beta, sp.gamma
    s = al + 2 * be + ga
    e2 = -3 * (al + ga) ** 2
    e1 = 2 * SQRT3 * s * (al - ga) * y
    e0 = 3 * al * be * ga * (al + be + ga) - (s ** 2 - 4 * al * ga) * y ** 2
    q2 = -2 * SQRT3
    q0 = SQRT3 / 2.0 * (4.0 / 3.0 * y ** 2 + be ** 2 + al * be + be * ga - al * ga)
    half_pi, atan, sqrt = math.pi / 2, math.atan, math.sqrt

    def fn(x: float) -> float:
        E = (e2 * x + e1) * x + e0
        if E <= 0:  # rounding at the crossings
            E = 1e-300
        return (half_pi - atan((q2 * x * x + q0) / sqrt(E))) / math.pi

    return fn


def _y_breaks(sp: ShapeParams, y0: float, y1: float) -> list[float]:
    pts = list(sp.vertices()[:, 1]) + list(sp.tangency_points[:, 1])
    return sorted({y0, y1, *(p for p in pts if y0 < p < y1)})


def region_integral(
    sp: ShapeParams, x0: float, x1: float, y0: float, y1: float, tol: float = 1e-9
) -> tuple[float, float]:
    """``(integral of P, area)`` over the rectangle clipped to the hexagon.

    ``tol`` is the absolute tolerance of the outer quadrature; rows use ``tol/100``.
    """
    y0, y1 = max(y0, -sp.y_top), min(y1, sp.y_top)
    if y1 <= y0:
        return 0.0, 0.0

    def limits(y):
        xl, xr = sp.x_bounds(y)
        return max(x0, float(xl)), min(x1, float(xr))

    def inner(y):
        lo, hi = limits(y)
        return _row_integral(sp, y, lo, hi, tol / 100) if hi > lo else 0.0

    def width(y):
        lo, hi = limits(y)
        return max(hi - lo, 0.0)

    ys = _y_breaks(sp, y0, y1)
    tot = area = 0.0
    for lo, hi in zip(ys, ys[1:]):
        tot += integrate.quad(inner, lo, hi, epsabs=tol, epsrel=tol, limit=100)[0]
        area += integrate.quad(width, lo, hi, epsabs=1e-12, limit=100)[0]
    return tot, area


def clipped_area(sp: ShapeParams, x0: float, x1: float, y0: float, y1: float) -> float:
    """Area of the rectangle ``[x0,x1] x [y0,y1]`` inside the hexagon."""
    y0, y1 = max(y0, -sp.y_top), min(y1, sp.y_top)
    if y1 <= y0:
        return 0.0

    def width(y):
        xl, xr = sp.x_bounds(y)
        return max(min(x1, float(xr)) - max(x0, float(xl)), 0.0)

    ys = sorted({y0, y1, *(p for p in sp.vertices()[:, 1] if y0 < p < y1)})
    # the width is piecewise linear with kinks where a bin edge meets a side
    kinks = []
    for xb in (x0, x1):
        for yy in (SQRT3 * (xb + (sp.beta + sp.gamma) / 2.0), -SQRT3 * (xb + (sp.alpha + sp.beta) / 2.0),
                   SQRT3 * ((sp.alpha + sp.beta) / 2.0 - xb), SQRT3 * (xb - (sp.beta + sp.gamma) / 2.0)):
            if y0 < yy < y1:
                kinks.append(yy)
    ys = sorted(set(ys) | set(kinks))
    # Simpson is exact on each linear piece
    return sum((hi - lo) / 6.0 * (width(lo) + 4 * width((lo + hi) / 2) + width(hi)) for lo, hi in zip(ys, ys[1:]))


def average_density(sp: ShapeParams, tol: float = 1e-7) -> float:
    """Mean of P over the whole hexagon by 2-D adaptive quadrature."""
    v = sp.vertices()
    tot, _ = region_integral(sp, v[:, 0].min(), v[:, 0].max(), -sp.y_top, sp.y_top, tol=tol * sp.area)
    return tot / sp.area


# ---------------------------------------------------------------------------
# typical height surface
# ---------------------------------------------------------------------------

def boundary_height_left(sp: ShapeParams, kdepth):
    """Normalized height at the left end of the line at depth ``kdepth``."""
    return np.where(kdepth <= sp.alpha, sp.gamma + kdepth, 2 * sp.alpha + sp.gamma - kdepth)


def boundary_height_right(sp: ShapeParams, kdepth):
    return sp.beta + np.abs(sp.gamma - kdepth)


@dataclass
class HeightSurfaceGrid:
    xs: np.ndarray
    ys: np.ndarray
    H: np.ndarray  # shape (len(ys), len(xs)); NaN outside the hexagon
    spacing: float
    right_mismatch: float  # max |integrated - prescribed| at right ends of rows


def height_surface(sp: ShapeParams, spacing: float = 1 / 200) -> HeightSurfaceGrid:
    """Integrate ``dH/dx = 1 - 3P`` along rows from the left boundary value."""
    v = sp.vertices()
    xs = np.arange(math.floor(v[:, 0].min() / spacing), math.ceil(v[:, 0].max() / spacing) + 1) * spacing
    ys = np.arange(math.ceil(-sp.y_top / spacing), math.floor(sp.y_top / spacing) + 1) * spacing
    H = np.full((len(ys), len(xs)), np.nan)
    mismatch = 0.0
    for j, y in enumerate(ys):
        xl, xr = (float(b) for b in sp.x_bounds(y))
        inside = xs[(xs > xl) & (xs < xr)]
        cross = [c for c in _ellipse_crossings(sp, y) if xl < c < xr]
        extra = [0.5 * sum(cross)] if len(cross) == 2 else []
        cuts = np.unique(np.concatenate([[xl, xr], inside, cross, extra]))
        pieces = _piece_integrals(
            lambda x: 1 - 3 * density_grid(sp, x, np.full(x.shape, y)), cuts[:-1], cuts[1:], np.array(cross)
        )
        kd = (sp.y_top - y) / (SQRT3 / 2.0)
        cum = float(boundary_height_left(sp, kd)) + np.concatenate([[0.0], np.cumsum(pieces)])
        mask = (xs > xl) & (xs < xr)
        H[j, mask] = np.interp(xs[mask], cuts, cum)
        mismatch = max(mismatch, abs(cum[-1] - float(boundary_height_right(sp, kd))))
    return HeightSurfaceGrid(xs, ys, H, spacing, mismatch)

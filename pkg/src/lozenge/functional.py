"""The logarithmic-energy functional on admissible line profiles.

For piecewise-linear f, g with compactly supported derivatives,
``<f, g> = integral integral f'(x) g'(y) log|x - y| dx dy`` is evaluated in
closed form segment by segment.  ``V(A) = <A + J, A + J>`` where ``J' = 1/2``
on ``[-rho_l, 0]`` and ``[1, 1 + rho_r]``; up to an additive constant and
``o(1)`` it equals ``log(count)/n^2`` for the tilings whose verticals on a
line follow the profile A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact import HexDims, ValidationError, line_count, line_length, validate_positions
from .limit_shape import LineParams, a_profile


def log_kernel_antiderivative(u):
    """``F(u) = u^2 (2 log|u| - 3)/4`` with ``F(0) = 0``; ``F'' = log|u|``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = u * u * (2 * np.log(np.abs(u)) - 3) / 4
    return np.where(u == 0, 0.0, out)


def rect_log_integral(a, b, c, d):
    """``integral_a^b integral_c^d log|x - y| dy dx`` (broadcasts)."""
    F = log_kernel_antiderivative
    return F(np.subtract(b, c)) + F(np.subtract(a, d)) - F(np.subtract(b, d)) - F(np.subtract(a, c))


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous function linear between ``xs``; constant outside ``[xs[0], xs[-1]]``."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
            raise ValidationError("need matching 1-D breakpoints and values (at least 2)")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs)

    def __call__(self, t):
        return np.interp(t, self.xs, self.ys)

    def __add__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        xs = np.union1d(self.xs, other.xs)
        return PiecewiseLinear(xs, self(xs) + other(xs))

    def __sub__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return self + other.scale(-1.0)

    def scale(self, s: float) -> "PiecewiseLinear":
        return PiecewiseLinear(self.xs, s * self.ys)


def inner_product(f: PiecewiseLinear, g: PiecewiseLinear) -> float:
    """Exact ``<f, g>`` by summing the closed form over all segment pairs."""
    fs, gs = f.slopes, g.slopes
    a, b = f.xs[:-1, None], f.xs[1:, None]
    c, d = g.xs[None, :-1], g.xs[None, 1:]
    return float(np.sum(fs[:, None] * gs[None, :] * rect_log_integral(a, b, c, d)))


@dataclass(frozen=True)
class JProfile:
    """Boundary ramps: ``J' = 1/2`` on ``[-rho_l, 0]`` and on ``[1, 1 + rho_r]``."""

    rho_l: float
    rho_r: float

    def __post_init__(self) -> None:
        if self.rho_l < 0 or self.rho_r < 0:
            raise ValidationError("ramp lengths must be non-negative")

    def as_function(self) -> PiecewiseLinear:
        xs = [-self.rho_l, 0.0, 1.0, 1.0 + self.rho_r]
        ys = [0.0, self.rho_l / 2, self.rho_l / 2, (self.rho_l + self.rho_r) / 2]
        # drop zero-length ramps
        keep = [0] + [i for i in range(1, 4) if xs[i] > xs[i - 1]]
        return PiecewiseLinear(np.array(xs)[keep], np.array(ys)[keep])


@dataclass(frozen=True)
class AdmissibleFn(PiecewiseLinear):
    """``A(0) = 0``, slopes in ``[0, 1]`` on ``[0, 1]``; ``lam = A(1)``."""

    def __post_init__(self) -> None:
        super().__post_init__()
        tol = 1e-12
        if abs(self.xs[0]) > tol or abs(self.xs[-1] - 1) > tol:
            raise ValidationError("breakpoints must run from 0 to 1")
        if abs(self.ys[0]) > tol:
            raise ValidationError("A(0) must be 0")
        s = self.slopes
        if s.min() < -tol or s.max() > 1 + tol:
            raise ValidationError("slopes must lie in [0, 1]")

    @property
    def lam(self) -> float:
        return float(self.ys[-1])

    @classmethod
    def from_slopes(cls, slopes: Sequence[float]) -> "AdmissibleFn":
        s = np.asarray(slopes, dtype=float)
        n = len(s)
        return cls(np.linspace(0.0, 1.0, n + 1), np.concatenate([[0.0], np.cumsum(s) / n]))

    @classmethod
    def from_positions(cls, positions: Sequence[int], n: int) -> "AdmissibleFn":
        """Profile of verticals at hexagonal positions on a line of n segments."""
        s = np.zeros(n)
        if len(positions):
            s[np.asarray(positions) - 1] = 1.0
        return cls.from_slopes(s)


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    n_segments: int


def functional_V(A: PiecewiseLinear, jp: JProfile) -> FunctionalValue:
    f = A + jp.as_function()
    return FunctionalValue(inner_product(f, f), len(f.xs) - 1)


# ---------------------------------------------------------------------------
# maximization
# ---------------------------------------------------------------------------

def _project(v: np.ndarray, lam: float, tol: float = 1e-12) -> np.ndarray:
    """Euclidean projection onto ``{0 <= s <= 1, mean(s) = lam}``.

    The projection is ``clip(v - mu, 0, 1)`` for the shift mu solving the
    mean constraint; mu is found by bisection.
    """
    if lam <= 0:
        return np.zeros_like(v)
    if lam >= 1:
        return np.ones_like(v)
    lo, hi = float(v.min()) - 1.0, float(v.max())
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        m = np.clip(v - mu, 0.0, 1.0).mean()
        if abs(m - lam) <= tol * 1e-3:
            break
        if m > lam:
            lo = mu
        else:
            hi = mu
    s = np.clip(v - mu, 0.0, 1.0)
    # spread the remaining rounding error over the free coordinates
    free = (s > 0) & (s < 1)
    if free.any():
        s[free] += (lam - s.mean()) * len(s) / free.sum()
        s = np.clip(s, 0.0, 1.0)
    if abs(s.mean() - lam) > tol:
        raise AssertionError(f"projection missed the mean constraint: {s.mean()} vs {lam}")
    return s


@dataclass(frozen=True)
class MaximizeResult:
    A: AdmissibleFn
    slopes: np.ndarray  # the projected grid slopes, exactly in [0, 1]
    value: float
    iterations: int
    converged: bool
    step_norm: float


def _quadratic_form(jp: JProfile, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(G, g)`` with ``V(s) = s.G.s + g.s + const`` for slopes on a uniform grid."""
    x = np.linspace(0.0, 1.0, n + 1)
    a, b = x[:-1, None], x[1:, None]
    G = rect_log_integral(a, b, x[None, :-1], x[None, 1:])
    g = np.zeros(n)
    for lo, hi in ((-jp.rho_l, 0.0), (1.0, 1.0 + jp.rho_r)):
        if hi > lo:
            # cross term 2 * (1/2) * <segment_i, ramp>
            g += rect_log_integral(a[:, 0], b[:, 0], lo, hi)
    return G, g


def maximize(
    jp: JProfile,
    lam: float,
    n_grid: int = 200,
    tol: float = 1e-8,
    max_iter: int = 10_000,
) -> MaximizeResult:
    """Projected gradient ascent for ``V`` over admissible slopes on a uniform grid.

    Steps are ``1/L`` with L the Lipschitz constant of the gradient, so every
    step increases V.  Stops when an iteration moves the slopes by less than
    ``tol`` in max norm, or after ``max_iter`` iterations.
    """
    if n_grid < 10:
        raise ValidationError("n_grid must be at least 10")
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("lambda must be in [0, 1]")
    G, g = _quadratic_form(jp, n_grid)
    L = 2.0 * float(np.max(np.abs(np.linalg.eigvalsh(G))))
    s = _project(np.full(n_grid, lam), lam)

    def value(v):
        return float(v @ G @ v + g @ v)

    best, best_val = s, value(s)
    converged = False
    step = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2.0 * (G @ s) + g
        nxt = _project(s + grad / L, lam)
        step = float(np.max(np.abs(nxt - s)))
        s = nxt
        val = value(s)
        if val >= best_val:
            best, best_val = s, val
        if step < tol:
            converged = True
            break
    A = AdmissibleFn.from_slopes(best)
    return MaximizeResult(A, best, functional_V(A, jp).value, it, converged, step)


def closed_form_profile(lam: float, rho_l: float, rho_r: float, ts) -> np.ndarray:
    """The explicit maximizer ``A`` evaluated at ``ts``."""
    return a_profile(LineParams(lam, rho_l, rho_r), ts)


# ---------------------------------------------------------------------------
# exact counts versus the functional
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiemannCheck:
    lhs: float
    rhs: float
    gap: float
    n: int


def riemann_check(dims: HexDims, k: int, p1: Sequence[int], p2: Sequence[int]) -> RiemannCheck:
    """Compare ``log(count1/count2)/n^2`` with ``V(A1) - V(A2)`` on line k."""
    p1 = validate_positions(dims, k, p1)
    p2 = validate_positions(dims, k, p2)
    c1, c2 = line_count(dims, k, p1), line_count(dims, k, p2)
    if c1 == 0 or c2 == 0:
        raise ValidationError("a configuration has no tilings")
    n = line_length(dims, k)
    lhs = (math.log(c1) - math.log(c2)) / n ** 2
    jp = JProfile(abs(dims.a - k) / n, abs(dims.c - k) / n)
    v1 = functional_V(AdmissibleFn.from_positions(p1, n), jp).value
    v2 = functional_V(AdmissibleFn.from_positions(p2, n), jp).value
    rhs = v1 - v2
    return RiemannCheck(lhs, rhs, abs(lhs - rhs), n)

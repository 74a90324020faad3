import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge.exact import HexDims, ValidationError, line_length, mirror_positions
from lozenge.functional import (
    AdmissibleFn,
    JProfile,
    PiecewiseLinear,
    _project,
    closed_form_profile,
    functional_V,
    inner_product,
    log_kernel_antiderivative,
    maximize,
    rect_log_integral,
    riemann_check,
)
from oracles import log_rect_quad, pwl_inner_quad


@st.composite
def pwl(draw, max_pieces=4, lo=-2.0, hi=3.0):
    m = draw(st.integers(1, max_pieces))
    xs = sorted(set(draw(st.lists(st.floats(lo, hi), min_size=m + 1, max_size=m + 1))))
    if len(xs) < 2 or min(np.diff(xs)) < 1e-3:
        xs = list(np.linspace(lo, hi, m + 1))
    ys = draw(st.lists(st.floats(-2, 2), min_size=len(xs), max_size=len(xs)))
    return PiecewiseLinear(np.array(xs), np.array(ys))


@st.composite
def admissible(draw, n=8, lam=None):
    s = np.array(draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    if lam is not None:
        s = _project(s, lam)
    return AdmissibleFn.from_slopes(s)


# -- the bilinear form ----------------------------------------------------------------

def test_kernel_antiderivative():
    assert log_kernel_antiderivative(0.0) == 0.0
    u = np.array([0.3, 1.7, -2.2])
    h = 1e-4
    second = (log_kernel_antiderivative(u + h) - 2 * log_kernel_antiderivative(u) + log_kernel_antiderivative(u - h)) / h ** 2
    assert np.allclose(second, np.log(np.abs(u)), atol=1e-6)


def test_unit_square():
    assert rect_log_integral(0.0, 1.0, 0.0, 1.0) == pytest.approx(-1.5, abs=1e-15)
    f = PiecewiseLinear(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert inner_product(f, f) == pytest.approx(-1.5, abs=1e-15)
    assert log_rect_quad(0.0, 1.0, 0.0, 1.0) == pytest.approx(-1.5, abs=1e-8)


@pytest.mark.parametrize("rect", [(0, 1, 2, 3), (0, 2, 1, 3), (-1, 0.5, 0, 1), (0, 1, 0, 0.3), (0.2, 0.7, -3, 4)])
def test_rect_integral_matches_quadrature(rect):
    assert rect_log_integral(*rect) == pytest.approx(log_rect_quad(*rect), abs=1e-8)


@pytest.mark.parametrize("dist", [10.0, 100.0, 1000.0])
def test_far_ramps_are_log_distance(dist):
    f = PiecewiseLinear(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    g = PiecewiseLinear(np.array([dist, dist + 1]), np.array([0.0, 1.0]))
    val = inner_product(f, g)
    assert val == pytest.approx(log_rect_quad(0, 1, dist, dist + 1), abs=1e-8)
    # the next term in the expansion is -1/(12 d^2)
    assert abs(val - math.log(dist)) < 0.1 / dist ** 2


@settings(max_examples=30)
@given(pwl(max_pieces=3), pwl(max_pieces=3))
def test_inner_product_matches_quadrature(f, g):
    assert inner_product(f, g) == pytest.approx(pwl_inner_quad(f, g), abs=1e-8)


@given(pwl(), pwl(), pwl(), st.floats(-3, 3))
def test_bilinear_and_symmetric(f, g, h, s):
    fg = inner_product(f, g)
    assert fg == pytest.approx(inner_product(g, f), abs=1e-12)
    lhs = inner_product(f.scale(s) + g, h)
    rhs = s * inner_product(f, h) + inner_product(g, h)
    assert lhs == pytest.approx(rhs, abs=1e-10 * (1 + abs(rhs)))


@st.composite
def compact_pwl(draw):
    # f' has zero total mass, so f is zero outside the breakpoints
    m = draw(st.integers(2, 6))
    xs = np.sort(np.array(draw(st.lists(st.floats(-2, 2), min_size=m + 1, max_size=m + 1, unique=True))))
    if np.min(np.diff(xs)) < 1e-3:
        xs = np.linspace(-2, 2, m + 1)
    ys = np.array(draw(st.lists(st.floats(-2, 2), min_size=m - 1, max_size=m - 1)))
    return PiecewiseLinear(xs, np.concatenate([[0.0], ys, [0.0]]))


@settings(max_examples=200)
@given(compact_pwl())
def test_negative_semidefinite(f):
    val = inner_product(f, f)
    if np.max(np.abs(f.ys)) < 1e-12:
        assert abs(val) <= 1e-10
    else:
        assert val < 0


# -- the functional ---------------------------------------------------------------------

def test_j_profile():
    jp = JProfile(0.4, 0.2)
    J = jp.as_function()
    assert np.allclose(J([-0.4, 0.0, 0.5, 1.0, 1.2]), [0, 0.2, 0.2, 0.2, 0.3])
    assert np.allclose(J.slopes, [0.5, 0.0, 0.5])
    assert np.allclose(JProfile(0.0, 0.0).as_function().slopes, [0.0])
    with pytest.raises(ValidationError):
        JProfile(-1.0, 0.0)


def test_admissible_validation():
    with pytest.raises(ValidationError):
        AdmissibleFn(np.array([0.0, 1.0]), np.array([0.0, 1.5]))
    with pytest.raises(ValidationError):
        AdmissibleFn(np.array([0.0, 0.5]), np.array([0.0, 0.5]))
    A = AdmissibleFn.from_positions([2, 3], 4)
    assert np.allclose(A.ys, [0, 0, 0.25, 0.5, 0.5]) and A.lam == 0.5


@given(admissible(lam=0.4), admissible(lam=0.4), st.floats(0, 2), st.floats(0, 2))
def test_concavity(A1, A2, rl, rr):
    jp = JProfile(rl, rr)
    mid = (A1 + A2).scale(0.5)
    lhs = 0.5 * (functional_V(A1, jp).value + functional_V(A2, jp).value)
    rhs = functional_V(mid, jp).value
    # the gap is -<A1-A2, A1-A2>/4, strictly positive when the profiles differ
    gap = -inner_product(A1 - A2, A1 - A2) / 4
    assert rhs - lhs == pytest.approx(gap, abs=1e-10)
    if np.max(np.abs(A1.ys - A2.ys)) > 1e-9:
        assert rhs > lhs


# -- maximization ---------------------------------------------------------------------------

@given(st.lists(st.floats(-3, 3), min_size=5, max_size=40), st.floats(0, 1))
def test_projection_is_feasible_and_idempotent(v, lam):
    s = _project(np.array(v), lam)
    assert np.all((s >= 0) & (s <= 1))
    assert abs(s.mean() - lam) <= 1e-12
    assert np.allclose(_project(s, lam), s, atol=1e-9)


def test_projection_is_nearest_point():
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = rng.normal(size=12)
        p = _project(v, 0.3)
        for _ in range(20):
            q = _project(rng.uniform(0, 1, 12), 0.3)
            assert np.sum((v - p) ** 2) <= np.sum((v - q) ** 2) + 1e-12


@pytest.mark.parametrize("lam, rl, rr", [(0.5, 0.0, 0.0), (0.4, 0.5, 0.25), (0.3, 1.0, 0.2)])
def test_maximize_recovers_closed_form(lam, rl, rr):
    res = maximize(JProfile(rl, rr), lam, n_grid=200)
    ts = res.A.xs
    assert res.converged
    assert np.max(np.abs(res.A(ts) - closed_form_profile(lam, rl, rr, ts))) <= 0.02
    assert res.A.lam == pytest.approx(lam, abs=1e-12)
    assert np.all((res.slopes >= 0) & (res.slopes <= 1))
    assert abs(res.slopes.mean() - lam) <= 1e-12


def test_maximize_lambda_zero():
    res = maximize(JProfile(0.3, 0.3), 0.0, n_grid=20)
    assert np.all(res.A.ys == 0.0)
    with pytest.raises(ValidationError):
        maximize(JProfile(0, 0), 0.5, n_grid=5)


def test_maximize_refinement_invariance():
    jp = JProfile(0.5, 0.25)
    coarse = maximize(jp, 0.4, n_grid=50).A
    fine = maximize(jp, 0.4, n_grid=200).A
    ts = np.linspace(0, 1, 51)
    assert np.max(np.abs(coarse(ts) - fine(ts))) < 0.02


def test_closed_form_beats_perturbations():
    lam, rl, rr = 0.4, 0.5, 0.25
    jp = JProfile(rl, rr)
    n = 100
    ts = np.linspace(0, 1, n + 1)
    best = AdmissibleFn(ts, closed_form_profile(lam, rl, rr, ts))
    v_best = functional_V(best, jp).value
    rng = np.random.default_rng(7)
    for _ in range(100):
        s = _project(best.slopes + rng.normal(scale=rng.uniform(0.01, 0.3), size=n), lam)
        assert functional_V(AdmissibleFn.from_slopes(s), jp).value < v_best


# -- exact counts ---------------------------------------------------------------------------

def _configs(n):
    k = n // 2
    clustered = tuple(range(k // 2 + 1, k // 2 + 1 + k))
    spread = tuple(range(2, n + k + 1, 3))[:k]
    return HexDims(n, n, n), k, clustered, spread


def test_riemann_identical_configs():
    d, k, p, _ = _configs(8)
    r = riemann_check(d, k, p, p)
    assert r.lhs == 0.0 and r.rhs == 0.0 and r.gap == 0.0


def test_riemann_mirror_pair():
    # with a = c the middle line maps to itself under reflection, so both sides vanish
    d, k = HexDims(12, 7, 12), 12
    n = line_length(d, k)
    p = (3, 4, 9, 10, 11, 15, 16, 17, 18, 19, 20, 21)[: k]
    p = tuple(q for q in p if q <= n)
    p = p + tuple(q for q in range(1, n + 1) if q not in p)[: k - len(p)]
    r = riemann_check(d, k, tuple(sorted(p)), mirror_positions(tuple(sorted(p)), n))
    assert abs(r.lhs) < 1e-10 and abs(r.rhs) < 1e-10


def test_riemann_gap_decreases():
    gaps = [riemann_check(*_configs(n)).gap for n in (8, 16, 24)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


def test_riemann_rejects_invalid():
    d, k, p, _ = _configs(8)
    with pytest.raises(ValidationError):
        riemann_check(d, k, p, p[:-1])

import itertools
import json
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from lozenge import _kernels
from lozenge.exact import CapExceeded, HexDims, line_distribution, macmahon_count
from lozenge.limit_shape import ShapeParams, a_profile, line_params, region_integral
from lozenge.sampler import (
    SampleBatch,
    arctic_region,
    cftp_heights,
    cftp_sample,
    density_map,
    empirical_line_profile,
    enumerate_all_tilings,
    glauber_step,
    interior_vertices,
    mcmc_heights,
    mcmc_sample,
    sample_batch,
)
from lozenge.tiling import (
    HeightField,
    PlanePartition,
    height_violations,
    heights_from_tiling,
    max_heights,
    min_heights,
    tiling_from_heights,
    tiling_from_partition,
)


def _interior(dims):
    ks, qs = interior_vertices(dims)
    return list(zip(ks.tolist(), qs.tolist()))


# -- enumeration ---------------------------------------------------------------

@pytest.mark.parametrize("dims", [(1, 1, 1), (2, 2, 2), (1, 2, 2), (2, 3, 1)])
def test_enumerate_all_tilings_counts(dims):
    d = HexDims(*dims)
    ts = list(enumerate_all_tilings(d))
    assert len(ts) == len({t.verticals for t in ts}) == macmahon_count(d)


def test_enumerate_all_tilings_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_all_tilings(HexDims(3, 3, 3), cap=100))


# -- single-site dynamics ------------------------------------------------------

def test_glauber_at_extremes():
    d = HexDims(2, 2, 2)
    lo = HeightField(d, min_heights(d))
    for v in _interior(d):
        assert glauber_step(lo, v, "down") == lo
    unit = HexDims(1, 1, 1)
    up = glauber_step(HeightField(unit, min_heights(unit)), (1, 1), "up")
    assert np.array_equal(up.heights, max_heights(unit))
    with pytest.raises(ValueError):
        glauber_step(lo, (0, 2), "up")


def test_glauber_two_state_occupancy():
    d = HexDims(1, 1, 1)
    rng = np.random.default_rng(11)
    s = HeightField(d, min_heights(d))
    top = HeightField(d, max_heights(d))
    n = 10_000
    hits = 0
    for coin in rng.integers(0, 2, size=n):
        s = glauber_step(s, (1, 1), bool(coin))
        hits += s == top
    # after each step the state equals the coin, so occupancy is Binomial(n, 1/2)
    assert abs(hits / n - 0.5) < 3 * 0.5 / np.sqrt(n)


def _random_state(dims, seed, sweeps=20):
    return mcmc_heights(dims, sweeps, seed, "min" if seed % 2 else "max")


@pytest.mark.parametrize("dims", [(2, 2, 2), (3, 2, 4), (4, 4, 4)])
def test_glauber_validity_and_kernel_agreement(dims):
    d = HexDims(*dims)
    rng = np.random.default_rng(3)
    verts = _interior(d)
    s = HeightField(d, _random_state(d, 5))
    h = s.heights.copy()
    for _ in range(2000):
        v = verts[rng.integers(len(verts))]
        up = bool(rng.integers(2))
        s = glauber_step(s, v, up)
        _kernels.site_update(h, v[0], v[1], up)
        assert height_violations(d, s.heights) == []
        assert np.array_equal(h, s.heights)


@pytest.mark.parametrize("dims", [(2, 2, 2), (3, 3, 3), (2, 4, 3)])
def test_glauber_monotone(dims):
    d = HexDims(*dims)
    rng = np.random.default_rng(4)
    verts = _interior(d)
    for trial in range(40):
        h1, h2 = _random_state(d, 2 * trial), _random_state(d, 2 * trial + 1)
        # pointwise min and max of height functions are height functions
        lo, hi = HeightField(d, np.minimum(h1, h2)), HeightField(d, np.maximum(h1, h2))
        assert height_violations(d, lo.heights) == [] and height_violations(d, hi.heights) == []
        for _ in range(50):
            v = verts[rng.integers(len(verts))]
            coin = bool(rng.integers(2))
            lo, hi = glauber_step(lo, v, coin), glauber_step(hi, v, coin)
            assert np.all(lo.heights <= hi.heights)


# -- coupling from the past -----------------------------------------------------

def test_cftp_unit_hexagon():
    hs, _ = cftp_heights(HexDims(1, 1, 1), 99, 20_000)
    frac = np.mean(hs[:, 1, 1] == 3)
    assert abs(frac - 0.5) < 0.02


def test_cftp_deterministic():
    d = HexDims(3, 2, 4)
    assert cftp_sample(d, 17) == cftp_sample(d, 17)
    a, _ = cftp_heights(d, 17, 10)
    b, _ = cftp_heights(d, 17, 5, start=5)
    assert np.array_equal(a[5:], b)


def test_cftp_parallel_matches_serial():
    d = HexDims(3, 3, 3)
    a, ha = cftp_heights(d, 8, 40, jobs=1)
    b, hb = cftp_heights(d, 8, 40, jobs=2)
    assert np.array_equal(a, b) and np.array_equal(ha, hb)


SMALL = [d for d in itertools.product(range(1, 4), repeat=3) if macmahon_count(HexDims(*d)) <= 500]


@pytest.mark.parametrize("dims", SMALL)
def test_cftp_chi_square(dims):
    d = HexDims(*dims)
    count = macmahon_count(d)
    n = 100 * count
    hs, _ = cftp_heights(d, 1000 + count, n)
    observed = Counter(h.tobytes() for h in hs)
    support = {heights_from_tiling(t).heights.astype(np.int16).tobytes() for t in enumerate_all_tilings(d)}
    assert set(observed) <= support
    freq = np.array([observed.get(k, 0) for k in support])
    assert stats.chisquare(freq).pvalue > 1e-3


def test_cftp_line_marginal_small():
    d = HexDims(2, 2, 2)
    hs, _ = cftp_heights(d, 5, 40_000)
    # line 1 runs over columns 1..4; the vertical sits where the height drops by 2
    drops = np.diff(hs[:, 1, 1:5].astype(int), axis=1) == -2
    freq = drops.mean(axis=0)
    exact = [float(line_distribution(d, 1)[(p,)]) for p in (1, 2, 3)]
    assert np.allclose(freq, exact, atol=0.01)


# -- approximate sampling --------------------------------------------------------

@pytest.mark.parametrize("start, seed", [("min", 1), ("max", 2), ("min", 3)])
def test_mcmc_line_marginal(start, seed):
    d = HexDims(2, 2, 2)
    n = 20_000
    rng = np.random.default_rng(seed)
    counts = Counter()
    for s in rng.integers(0, 2 ** 62, size=n):
        h = mcmc_heights(d, 1000, int(s), start)
        counts[tuple(np.nonzero(np.diff(h[1, 1:5]) == -2)[0] + 1)] += 1
    exact = line_distribution(d, 1)
    for p, f in exact.items():
        assert abs(counts[p] / n - float(f)) < 0.015


def test_mcmc_sample_valid():
    d = HexDims(4, 3, 5)
    t = mcmc_sample(d, 200, 9, start="max")
    assert height_violations(d, heights_from_tiling(t).heights) == []
    with pytest.raises(ValueError):
        mcmc_sample(d, 10, 1, start="middle")


# -- batches ---------------------------------------------------------------------

def test_batch_jsonl_round_trip(tmp_path):
    d = HexDims(3, 2, 3)
    batch = sample_batch(d, 5, 42)
    path = tmp_path / "b.jsonl"
    batch.write_jsonl(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    rec = json.loads(lines[0])
    assert rec["seed"] == 42 and rec["method"] == "cftp" and "version" in rec
    again = SampleBatch.read_jsonl(path)
    assert again.tilings == batch.tilings
    assert np.array_equal(again.heights, batch.heights)


def test_batch_reproducible_and_methods():
    d = HexDims(2, 2, 2)
    assert np.array_equal(sample_batch(d, 4, 1).heights, sample_batch(d, 4, 1).heights)
    assert len(sample_batch(d, 20, 0, "enum")) == 20
    mc = sample_batch(d, 3, 0, "mcmc", sweeps=50)
    assert mc.metadata()["sweeps"] == 50
    with pytest.raises(ValueError):
        sample_batch(d, 1, 0, "magic")


# -- statistics ------------------------------------------------------------------

def test_density_map_totals():
    d = HexDims(5, 3, 4)
    batch = sample_batch(d, 7, 3)
    g = density_map(batch, bin_width=0.3)
    assert g.overall_fraction() == pytest.approx(20 / (15 + 12 + 20), abs=1e-15)
    assert np.all(g.n_vertical <= g.n_sites)
    f = g.freq[np.isfinite(g.freq)]
    assert np.all((f >= 0) & (f <= 1))
    # per-sample lozenge total
    assert g.n_lozenges.sum() == 7 * (15 + 12 + 20)
    assert g.area.sum() == pytest.approx(g.shape.area, rel=1e-12)


def test_density_map_tracks_limit_density():
    d = HexDims(16, 16, 16)
    g = density_map(sample_batch(d, 30, 8), bin_width=0.2)
    gaps, means = [], []
    for i, j in zip(*np.nonzero(g.n_sites >= 30 * 5)):
        tot, area = region_integral(g.shape, g.x_edges[i], g.x_edges[i + 1], g.y_edges[j], g.y_edges[j + 1])
        means.append(tot / area)
        gaps.append(abs(g.freq[i, j] - tot / area))
    assert max(gaps) < 0.1
    # the side bins lean into the vertical-only corners, the top and bottom bins into the vertical-free ones
    assert max(means) > 0.65 and min(means) < 0.06


def _arctic_by_components(t):
    """Union-find over same-orientation edge adjacency; arctic = components on the boundary."""
    from lozenge.tiling import lozenges

    loz = lozenges(t)
    parent = list(range(len(loz)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owners = {}
    for i, l in enumerate(loz):
        for e in l.edges():
            owners.setdefault(e, []).append(i)
    for own in owners.values():
        if len(own) == 2 and loz[own[0]].orientation == loz[own[1]].orientation:
            parent[find(own[0])] = find(own[1])
    boundary_roots = {find(own[0]) for own in owners.values() if len(own) == 1}
    return {l: find(i) in boundary_roots for i, l in enumerate(loz)}


def test_arctic_empty_partition_all_frozen():
    t = tiling_from_partition(PlanePartition.empty(HexDims(3, 4, 2)))
    m = arctic_region(t)
    assert all(m.arctic)


def test_arctic_exhaustive_small():
    d = HexDims(2, 2, 2)
    mixed = 0
    for t in enumerate_all_tilings(d):
        m = arctic_region(t)
        assert dict(zip(m.lozenges, m.arctic)) == _arctic_by_components(t)
        mixed += not all(m.arctic)
    # only tilings with a non-frozen core have lozenges outside the arctic region
    assert 0 < mixed < 20


def test_arctic_sample_agrees_with_components():
    t = cftp_sample(HexDims(12, 12, 12), 3)
    m = arctic_region(t)
    assert dict(zip(m.lozenges, m.arctic)) == _arctic_by_components(t)
    assert 0 < m.n_arctic < len(m.lozenges)


def test_empirical_line_profile_concentrates():
    d = HexDims(16, 16, 16)
    hs, _ = cftp_heights(d, 77, 100)
    sp = ShapeParams(1.0, 1.0, 1.0)
    for k in (4, 8, 12):
        lp = line_params(sp, k / 32)
        sups = []
        for h in hs:
            prof = empirical_line_profile(tiling_from_heights(HeightField(d, h)), k)
            ts = np.linspace(0, 1, len(prof))
            sups.append(np.max(np.abs(prof - a_profile(lp, ts))))
        assert np.percentile(sups, 95) < 0.1

"""Uniform random tilings: exact (monotone CFTP), approximate (Glauber) and exhaustive.

Sampling runs on the height function.  An interior vertex may move by +/-3
(adding or removing one unit cube); the heat-bath update driven by a fair
coin sends it to the top or bottom value its six neighbours allow.  The
update is monotone in the height field, so coupling from the past only
needs to watch the chains started at the minimal and maximal heights.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import __version__
from . import _kernels
from .exact import CapExceeded, HexDims, gelfand_enumerate, line_length, macmahon_count
from .limit_shape import ShapeParams, clipped_area
from .tiling import (
    OUTSIDE,
    GelfandPattern,
    HeightField,
    Lozenge,
    LozengeTiling,
    boundary_mask,
    heights_from_tiling,
    hexagon_mask,
    hexagon_top_row,
    lozenges,
    max_heights,
    min_heights,
    tiling_from_heights,
    tiling_from_pattern,
    vertex_xy,
)

ChainState = HeightField  # the chain state is a valid height function

DEFAULT_MAX_DOUBLINGS = 40


class HorizonExceeded(RuntimeError):
    """CFTP did not coalesce within the configured horizon cap."""


def interior_vertices(dims: HexDims) -> tuple[np.ndarray, np.ndarray]:
    """Row-major ``(ks, qs)`` of the vertices the dynamics may move."""
    ks, qs = np.nonzero(hexagon_mask(dims) & ~boundary_mask(dims))
    return ks.astype(np.int64), qs.astype(np.int64)


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------

def enumerate_all_tilings(dims: HexDims, cap: int = 100_000) -> Iterator[LozengeTiling]:
    """Every tiling exactly once, depth-first over interlacing pattern rows."""
    total = macmahon_count(dims)
    if total > cap:
        raise CapExceeded(f"{dims.as_tuple()} has {total} tilings, cap is {cap}")
    for rows in gelfand_enumerate(hexagon_top_row(dims), cap=cap):
        yield tiling_from_pattern(GelfandPattern(rows), dims)


# ---------------------------------------------------------------------------
# single-site dynamics
# ---------------------------------------------------------------------------

_NEIGHBOURS = tuple(zip(_kernels.NBR_DK.tolist(), _kernels.NBR_DQ.tolist(), _kernels.NBR_R.tolist()))


def glauber_step(s: ChainState, vertex: tuple[int, int], coin: str | bool) -> ChainState:
    """Heat-bath move at an interior vertex.

    ``coin`` is ``"up"``/``True`` or ``"down"``/``False``.  The height moves
    by 3 in that direction when every edge rule stays satisfied, otherwise
    the state is returned unchanged.
    """
    up = coin if isinstance(coin, bool) else {"up": True, "down": False}[coin]
    k, q = vertex
    if not (hexagon_mask(s.dims)[k, q] and not boundary_mask(s.dims)[k, q]):
        raise ValueError(f"vertex {vertex} is not interior")
    h = s.heights
    new = int(h[k, q]) + (3 if up else -3)
    for dk, dq, r in _NEIGHBOURS:
        hu = int(h[k + dk, q + dq])
        if not hu + r - 3 <= new <= hu + r:
            return s
    out = h.copy()
    out[k, q] = new
    return HeightField(s.dims, out)


def _start(dims: HexDims, start: str) -> np.ndarray:
    if start == "min":
        return min_heights(dims).copy()
    if start == "max":
        return max_heights(dims).copy()
    raise ValueError(f"start must be 'min' or 'max', got {start!r}")


def mcmc_heights(dims: HexDims, sweeps: int, seed: int, start: str = "min") -> np.ndarray:
    h = _start(dims, start)
    ks, qs = interior_vertices(dims)
    if sweeps > 0:
        _kernels.run_sweeps(h, ks, qs, h.shape[1], np.uint64(seed), sweeps, 1)
    return h


def mcmc_sample(dims: HexDims, sweeps: int, seed: int, start: str = "min") -> LozengeTiling:
    """Approximately uniform tiling after ``sweeps`` full systematic passes."""
    return tiling_from_heights(HeightField(dims, mcmc_heights(dims, sweeps, seed, start)))


# ---------------------------------------------------------------------------
# coupling from the past
# ---------------------------------------------------------------------------

def _cftp_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    dims, seed, start, count, max_doublings = args
    ks, qs = interior_vertices(dims)
    out, horizons = _kernels.cftp_batch(
        min_heights(dims).copy(), max_heights(dims).copy(), ks, qs,
        np.uint64(seed), start, count, max_doublings,
    )
    return out, horizons


def cftp_heights(
    dims: HexDims,
    seed: int,
    count: int = 1,
    start: int = 0,
    max_doublings: int = DEFAULT_MAX_DOUBLINGS,
    jobs: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Height arrays (int16) of exact samples ``start .. start+count-1``.

    Sample ``i`` depends only on ``(seed, i)``, so results do not depend on
    ``jobs``.
    """
    if jobs <= 1 or count < 2 * jobs:
        out, horizons = _cftp_chunk((dims, seed, start, count, max_doublings))
    else:
        bounds = np.linspace(0, count, jobs + 1).astype(int)
        tasks = [(dims, seed, start + lo, hi - lo, max_doublings) for lo, hi in zip(bounds, bounds[1:])]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_cftp_chunk, tasks))
        out = np.concatenate([p[0] for p in parts])
        horizons = np.concatenate([p[1] for p in parts])
    if (horizons < 0).any():
        bad = int(np.argmax(horizons < 0)) + start
        raise HorizonExceeded(f"sample {bad} did not coalesce within 2^{max_doublings} sweeps")
    out[:, ~hexagon_mask(dims)] = OUTSIDE
    return out, horizons


def cftp_sample(dims: HexDims, seed: int, max_doublings: int = DEFAULT_MAX_DOUBLINGS) -> LozengeTiling:
    """Exactly uniform tiling; a deterministic function of ``seed``."""
    h, _ = cftp_heights(dims, seed, 1, 0, max_doublings)
    return tiling_from_heights(HeightField(dims, h[0]))


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------

@dataclass
class SampleBatch:
    """Samples generated from ``(dims, seed, method, count)``; heights are primary."""

    dims: HexDims
    seed: int
    method: str
    heights: np.ndarray  # (count, a+c+1, a+b+1)
    horizons: np.ndarray | None = None
    sweeps: int | None = None
    _tilings: list | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.heights.shape[0])

    @property
    def tilings(self) -> list[LozengeTiling]:
        if self._tilings is None:
            self._tilings = [tiling_from_heights(HeightField(self.dims, h)) for h in self.heights]
        return self._tilings

    def metadata(self) -> dict:
        meta = {"seed": self.seed, "method": self.method, "version": __version__}
        if self.sweeps is not None:
            meta["sweeps"] = self.sweeps
        return meta

    def write_jsonl(self, path: str | os.PathLike) -> None:
        meta = self.metadata()
        with open(path, "w") as fh:
            for i, t in enumerate(self.tilings):
                rec = t.to_json()
                rec.update(meta, index=i)
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")

    @classmethod
    def read_jsonl(cls, path: str | os.PathLike) -> "SampleBatch":
        tilings = []
        meta: dict = {}
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    meta = rec
                    tilings.append(LozengeTiling.from_json(rec))
        if not tilings:
            raise ValueError(f"{path} holds no samples")
        dims = tilings[0].dims
        if any(t.dims != dims for t in tilings):
            raise ValueError("samples in one batch must share dims")
        hs = np.stack([heights_from_tiling(t).heights for t in tilings])
        batch = cls(dims, int(meta.get("seed", 0)), str(meta.get("method", "unknown")), hs,
                    sweeps=meta.get("sweeps"))
        batch._tilings = tilings
        return batch


def sample_batch(
    dims: HexDims,
    count: int,
    seed: int,
    method: str = "cftp",
    sweeps: int = 1000,
    jobs: int = 1,
) -> SampleBatch:
    """``count`` samples by ``cftp``, ``mcmc`` or ``enum`` (every tiling once)."""
    if method == "cftp":
        hs, horizons = cftp_heights(dims, seed, count, jobs=jobs)
        return SampleBatch(dims, seed, method, hs, horizons)
    if method == "mcmc":
        hs = np.stack([
            mcmc_heights(dims, sweeps, int(_kernels.sample_seed(np.uint64(seed), i)))
            for i in range(count)
        ])
        return SampleBatch(dims, seed, method, hs, sweeps=sweeps)
    if method == "enum":
        ts = list(enumerate_all_tilings(dims, cap=max(count, 1)))
        hs = np.stack([heights_from_tiling(t).heights for t in ts])
        batch = SampleBatch(dims, seed, method, hs)
        batch._tilings = ts
        return batch
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass
class DensityGrid:
    """Binned vertical-lozenge statistics in normalized coordinates.

    ``freq`` is the fraction of horizontal lattice edges in the bin that are
    bisected by a vertical lozenge.  Horizontal edges and lozenges have the
    same density, so this estimates the local density of vertical lozenges.
    """

    shape: ShapeParams
    sigma: float
    x_edges: np.ndarray
    y_edges: np.ndarray
    n_vertical: np.ndarray  # (nx, ny), summed over samples
    n_sites: np.ndarray     # horizontal interior edges, times samples
    n_lozenges: np.ndarray  # lozenge centres of all orientations, summed
    area: np.ndarray        # bin area clipped to the hexagon (normalized units)
    n_samples: int

    @property
    def freq(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.n_sites > 0, self.n_vertical / self.n_sites, np.nan)

    @property
    def centres(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.x_edges[:-1] + self.x_edges[1:]) / 2, (self.y_edges[:-1] + self.y_edges[1:]) / 2

    def overall_fraction(self) -> float:
        """Vertical lozenges over all lozenges; exactly ``ac/(ab+bc+ca)``."""
        return float(self.n_vertical.sum() / self.n_lozenges.sum())

    def rows(self) -> list[tuple[float, float, float, int]]:
        """``(bin_x, bin_y, freq, n_sites)`` for every bin meeting the hexagon."""
        xc, yc = self.centres
        f = self.freq
        return [
            (float(xc[i]), float(yc[j]), float(f[i, j]), int(self.n_sites[i, j]))
            for i in range(len(xc)) for j in range(len(yc)) if self.n_sites[i, j] > 0
        ]


def _bin_edges(lo: float, hi: float, w: float) -> np.ndarray:
    # bins are centred on the origin so the centre of the hexagon has its own bin
    i0 = int(np.floor(lo / w - 0.5))
    i1 = int(np.ceil(hi / w + 0.5))
    return (np.arange(i0, i1 + 1) + 0.5) * w


def density_map(batch: SampleBatch, bin_width: float = 0.05, sigma: float | None = None) -> DensityGrid:
    """Empirical per-bin frequency of vertical lozenges."""
    if len(batch) < 1:
        raise ValueError("density_map needs at least one sample")
    dims = batch.dims
    a, b, c = dims.as_tuple()
    sigma = float(sigma) if sigma is not None else (a + b + c) / 3.0
    sp = ShapeParams(a / sigma, b / sigma, c / sigma)
    m = hexagon_mask(dims)
    H = batch.heights.astype(np.int64)

    # horizontal edges (k, q)-(k, q+1); vertical lozenges where the height drops by 2
    hor = m[:, 1:] & m[:, :-1]
    hor[0, :] = hor[-1, :] = False  # top and bottom sides bound no lozenge on both sides
    vert = ((H[:, :, 1:] - H[:, :, :-1]) == -2).sum(axis=0) * hor
    # down-right edges (k, q)-(k+1, q) and down-left edges (k, q+1)-(k+1, q)
    dr_site = m[1:, :] & m[:-1, :]
    right = ((H[:, 1:, :] - H[:, :-1, :]) == 2).sum(axis=0) * dr_site
    dl_site = m[1:, :-1] & m[:-1, 1:]
    left = ((H[:, 1:, :-1] - H[:, :-1, 1:]) == -2).sum(axis=0) * dl_site

    def coords(ks, qs):
        x, y = vertex_xy(dims, ks, qs)
        return x / sigma, y / sigma

    kk, qq = np.nonzero(hor)
    hx, hy = coords(kk, qq + 0.5)
    hv = vert[kk, qq]
    kr, qr = np.nonzero(dr_site)
    rx, ry = coords(kr + 0.5, qr)
    rv = right[kr, qr]
    kl, ql = np.nonzero(dl_site)
    lx, ly = coords(kl + 0.5, ql + 0.5)
    lv = left[kl, ql]

    v = sp.vertices()
    xe = _bin_edges(v[:, 0].min(), v[:, 0].max(), bin_width)
    ye = _bin_edges(-sp.y_top, sp.y_top, bin_width)
    n = len(batch)

    def hist(x, y, w):
        return np.histogram2d(x, y, bins=(xe, ye), weights=w)[0]

    n_vert = hist(hx, hy, hv)
    n_sites = hist(hx, hy, np.full(hx.shape, n, dtype=float))
    n_loz = n_vert + hist(rx, ry, rv) + hist(lx, ly, lv)
    area = np.array([
        [clipped_area(sp, xe[i], xe[i + 1], ye[j], ye[j + 1]) for j in range(len(ye) - 1)]
        for i in range(len(xe) - 1)
    ])
    return DensityGrid(sp, sigma, xe, ye, n_vert.astype(np.int64), n_sites.astype(np.int64),
                       n_loz.astype(np.int64), area, n)


@dataclass(frozen=True)
class ArcticMask:
    """Each lozenge of a tiling and whether it lies in the arctic (frozen) region."""

    dims: HexDims
    lozenges: tuple[Lozenge, ...]
    arctic: tuple[bool, ...]

    @property
    def n_arctic(self) -> int:
        return sum(self.arctic)


def arctic_region(t: LozengeTiling | HeightField) -> ArcticMask:
    """Lozenges joined to the boundary through edge-sharing same-orientation lozenges."""
    hf = heights_from_tiling(t) if isinstance(t, LozengeTiling) else t
    loz = lozenges(hf)
    by_edge: dict = {}
    for i, l in enumerate(loz):
        for e in l.edges():
            by_edge.setdefault(e, []).append(i)
    frozen = [False] * len(loz)
    stack = []
    for e, owners in by_edge.items():
        if len(owners) == 1 and not frozen[owners[0]]:  # edge on the hexagon boundary
            frozen[owners[0]] = True
            stack.append(owners[0])
    while stack:
        i = stack.pop()
        for e in loz[i].edges():
            for j in by_edge[e]:
                if not frozen[j] and loz[j].orientation == loz[i].orientation:
                    frozen[j] = True
                    stack.append(j)
    return ArcticMask(hf.dims, tuple(loz), tuple(frozen))


def empirical_line_profile(t: LozengeTiling, k: int) -> np.ndarray:
    """Normalized ``A`` at ``t = j/n`` (``j = 0..n``) along line k.

    Each vertical lozenge contributes slope 1 across its unit segment; the
    values are divided by the line length ``n``.
    """
    n = line_length(t.dims, k)
    occ = np.zeros(n)
    if t.verticals[k]:
        occ[np.asarray(t.verticals[k]) - 1] = 1.0
    return np.concatenate([[0.0], np.cumsum(occ)]) / n


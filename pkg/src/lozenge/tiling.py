"""Plane partitions, lozenge tilings, Gelfand patterns and height functions.

Lattice conventions
-------------------
Vertices of the triangular lattice inside the a,b,c hexagon are indexed by
``(k, q)``: ``k = 0..a+c`` is the horizontal line counted from the top and
``q = 0..a+b`` is an axial column index.  Line ``k`` occupies columns
``q_min(k) = a - min(k, a)`` through ``q_max(k) = a + b - max(k - c, 0)``.
The six neighbours of ``(k, q)`` are

* ``(k, q +/- 1)``            horizontal steps,
* ``(k + 1, q)``, ``(k - 1, q)``          down-right / up-left,
* ``(k + 1, q - 1)``, ``(k - 1, q + 1)``  down-left / up-right.

In doubled horizontal units the vertex sits at ``X = 2(q - a) + k``; the
Euclidean point (lozenge side 1, origin at the hexagon centre) is
``x = (X - (2b + c - a)/2)/2``, ``y = ((a + c)/2 - k) * sqrt(3)/2``.

The box point ``(x, y, z)`` of the solid Young diagram projects to
``(k, q) = (c + x - z, a - x + y)`` and the height function is
``h = x + y + z``.  The leftmost vertex ``(a, 0, c)`` therefore has height
``a + c``, and the far corner of the box has height 0.

Height rules along lozenge edges: a step right adds 1, a step up-right or
down-right subtracts 1.  Across the diagonal of a lozenge the difference is
the rule value minus 3 (e.g. ``-2`` across a vertical lozenge).

Lozenge orientations:

* ``VERTICAL`` -- bisected by a horizontal edge; spans box directions x and z;
  ``a*c`` of them.
* ``LEFT``     -- sides parallel to the lower-left hexagon side;
  bisected by a down-left edge; ``b*c`` of them.
* ``RIGHT``    -- sides parallel to the lower-right hexagon side;
  bisected by a down-right edge; ``a*b`` of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .exact import (
    HexDims,
    ValidationError,
    line_length,
    trapezoid_row,
    validate_positions,
    verticals_on_line,
)

SQRT3_2 = math.sqrt(3.0) / 2.0
OUTSIDE = -1  # height-array sentinel for cells outside the hexagon


class Orientation(IntEnum):
    VERTICAL = 0
    LEFT = 1
    RIGHT = 2


# ---------------------------------------------------------------------------
# lattice geometry
# ---------------------------------------------------------------------------

def q_range(dims: HexDims, k: int) -> tuple[int, int]:
    """Inclusive column range of line k."""
    return dims.a - min(k, dims.a), dims.a + dims.b - max(k - dims.c, 0)


def left_height(dims: HexDims, k: int) -> int:
    """Height of the left endpoint of line k (fixed by the boundary)."""
    return dims.c + k if k <= dims.a else 2 * dims.a + dims.c - k


@lru_cache(maxsize=64)
def _mask(dims: HexDims) -> np.ndarray:
    m = np.zeros((dims.a + dims.c + 1, dims.a + dims.b + 1), dtype=bool)
    for k in range(dims.a + dims.c + 1):
        lo, hi = q_range(dims, k)
        m[k, lo:hi + 1] = True
    m.setflags(write=False)
    return m


def hexagon_mask(dims: HexDims) -> np.ndarray:
    """Boolean ``(a+c+1, a+b+1)`` array marking lattice vertices of the hexagon."""
    return _mask(dims)


@lru_cache(maxsize=64)
def _boundary(dims: HexDims) -> np.ndarray:
    m = hexagon_mask(dims)
    bd = np.zeros_like(m)
    kmax = dims.a + dims.c
    for k in range(kmax + 1):
        lo, hi = q_range(dims, k)
        if k in (0, kmax):
            bd[k, lo:hi + 1] = True
        else:
            bd[k, lo] = bd[k, hi] = True
    bd.setflags(write=False)
    return bd


def boundary_mask(dims: HexDims) -> np.ndarray:
    """Vertices on the hexagon boundary (never moved by the dynamics)."""
    return _boundary(dims)


def vertex_xy(dims: HexDims, k, q):
    """Euclidean coordinates (origin at the hexagon centre) of vertex (k, q)."""
    k = np.asarray(k, dtype=float)
    q = np.asarray(q, dtype=float)
    a, b, c = dims.a, dims.b, dims.c
    x = q - a + k / 2.0 - (2 * b + c - a) / 4.0
    y = ((a + c) / 2.0 - k) * SQRT3_2
    return x, y


def box_to_lattice(dims: HexDims, x: int, y: int, z: int) -> tuple[int, int]:
    return dims.c + x - z, dims.a - x + y


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanePartition:
    """Weakly decreasing ``a x b`` array with entries in ``0..c``."""

    dims: HexDims
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        a, b, c = self.dims.as_tuple()
        parts = tuple(tuple(int(v) for v in row) for row in self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) != a or any(len(r) != b for r in parts):
            raise ValidationError(f"partition must be {a}x{b}")
        for x in range(a):
            for y in range(b):
                v = parts[x][y]
                if not 0 <= v <= c:
                    raise ValidationError(f"entry pi[{x}][{y}]={v} outside 0..{c}")
                if x + 1 < a and parts[x + 1][y] > v:
                    raise ValidationError(f"pi[{x + 1}][{y}] > pi[{x}][{y}]")
                if y + 1 < b and parts[x][y + 1] > v:
                    raise ValidationError(f"pi[{x}][{y + 1}] > pi[{x}][{y}]")

    @classmethod
    def empty(cls, dims: HexDims) -> "PlanePartition":
        return cls(dims, tuple((0,) * dims.b for _ in range(dims.a)))

    @classmethod
    def full(cls, dims: HexDims) -> "PlanePartition":
        return cls(dims, tuple((dims.c,) * dims.b for _ in range(dims.a)))


def volume(pp: PlanePartition) -> int:
    """Number of unit cubes in the solid Young diagram."""
    return sum(sum(row) for row in pp.parts)


@dataclass(frozen=True)
class GelfandPattern:
    """Triangular array; row r has one entry fewer than row r-1.

    Entries increase weakly down-right and strictly up-right, i.e.
    ``rows[r][i] <= rows[r+1][i] < rows[r][i+1]``.
    """

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValidationError("empty pattern")
        n = len(rows[0])
        if [len(r) for r in rows] != list(range(n, 0, -1)):
            raise ValidationError("pattern rows must have lengths n, n-1, ..., 1")
        for upper, lower in zip(rows, rows[1:]):
            for i, y in enumerate(lower):
                if not upper[i] <= y < upper[i + 1]:
                    raise ValidationError(f"interlacing fails: {upper} over {lower}")


@dataclass(frozen=True)
class LozengeTiling:
    """A tiling stored by its vertical lozenges, one tuple per line ``k = 0..a+c``."""

    dims: HexDims
    verticals: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        verts = tuple(tuple(int(p) for p in row) for row in self.verticals)
        object.__setattr__(self, "verticals", verts)
        if len(verts) != self.dims.n_lines:
            raise ValidationError(f"need {self.dims.n_lines} lines of verticals, got {len(verts)}")
        for k, row in enumerate(verts):
            validate_positions(self.dims, k, row)
        problems = height_violations(self.dims, _heights_array(self.dims, verts))
        if problems:
            raise ValidationError(f"rows do not interlace: {problems[0]}")

    def to_json(self) -> dict:
        a, b, c = self.dims.as_tuple()
        return {"a": a, "b": b, "c": c, "verticals": [list(r) for r in self.verticals]}

    @classmethod
    def from_json(cls, obj: dict) -> "LozengeTiling":
        try:
            dims = HexDims(obj["a"], obj["b"], obj["c"])
            verts = obj["verticals"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad tiling JSON: {exc}") from exc
        return cls(dims, tuple(tuple(r) for r in verts))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True, eq=False)
class HeightField:
    """Integer heights on the vertices of the hexagon (``OUTSIDE`` elsewhere)."""

    dims: HexDims
    heights: np.ndarray

    def __post_init__(self) -> None:
        h = np.array(self.heights, dtype=np.int64)
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, HeightField)
            and self.dims == other.dims
            and np.array_equal(self.heights, other.heights)
        )

    def __hash__(self) -> int:
        return hash((self.dims, self.heights.tobytes()))

    def key(self) -> bytes:
        return self.heights.tobytes()


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------

def _heights_array(dims: HexDims, verticals: Sequence[Sequence[int]]) -> np.ndarray:
    h = np.full((dims.a + dims.c + 1, dims.a + dims.b + 1), OUTSIDE, dtype=np.int64)
    for k, row in enumerate(verticals):
        lo, hi = q_range(dims, k)
        steps = np.ones(hi - lo, dtype=np.int64)
        if len(row):
            steps[np.asarray(row, dtype=np.int64) - 1] = -2
        h[k, lo] = left_height(dims, k)
        h[k, lo + 1:hi + 1] = left_height(dims, k) + np.cumsum(steps)
    return h


def height_violations(dims: HexDims, h: np.ndarray) -> list[str]:
    """Human-readable list of violated height rules (empty when valid)."""
    m = hexagon_mask(dims)
    bad: list[str] = []
    if h.shape != m.shape:
        return [f"shape {h.shape} != {m.shape}"]
    hmin = min_heights(dims)
    bd = boundary_mask(dims)
    if not np.array_equal(h[bd], hmin[bd]):
        bad.append("boundary values differ from the fixed profile")
    # horizontal, down-right, down-left
    checks = (
        (h[:, 1:] - h[:, :-1], m[:, 1:] & m[:, :-1], (1, -2), "horizontal"),
        (h[1:, :] - h[:-1, :], m[1:, :] & m[:-1, :], (-1, 2), "down-right"),
        (h[1:, :-1] - h[:-1, 1:], m[1:, :-1] & m[:-1, 1:], (1, -2), "down-left"),
    )
    for diff, both, ok, name in checks:
        wrong = both & (diff != ok[0]) & (diff != ok[1])
        if wrong.any():
            k, q = np.argwhere(wrong)[0]
            bad.append(f"{name} edge at ({k},{q}) has difference {diff[k, q]}")
    return bad


def heights_from_partition(pp: PlanePartition) -> HeightField:
    """Height of the visible surface above every lattice vertex."""
    dims = pp.dims
    a, b, c = dims.as_tuple()
    h = np.full((a + c + 1, a + b + 1), OUTSIDE, dtype=np.int64)
    m = hexagon_mask(dims)
    for k, q in zip(*np.nonzero(m)):
        d1, d2 = k - c, q - a  # x - z, y - x
        s = max(0, -d1, -d1 - d2)
        while True:
            x, y, z = s + 1 + d1, s + 1 + d1 + d2, s + 1
            if x > a or y > b or z > c:
                break
            if min(x, y) > 0 and z > pp.parts[x - 1][y - 1]:
                break
            s += 1
        h[k, q] = 3 * s + 2 * d1 + d2
    return HeightField(dims, h)


def partition_from_heights(hf: HeightField) -> PlanePartition:
    dims = hf.dims
    a, b, c = dims.as_tuple()
    h = hf.heights
    parts = []
    for i in range(a):
        row = []
        for j in range(b):
            z = 0
            # vertex (i+1, j+1, z+1) is inside the solid iff the surface height
            # above its projection reaches its own height
            while z < c:
                k, q = box_to_lattice(dims, i + 1, j + 1, z + 1)
                if h[k, q] < i + j + z + 3:
                    break
                z += 1
            row.append(z)
        parts.append(tuple(row))
    return PlanePartition(dims, tuple(parts))


@lru_cache(maxsize=64)
def _extreme(dims: HexDims, full: bool) -> np.ndarray:
    pp = PlanePartition.full(dims) if full else PlanePartition.empty(dims)
    h = heights_from_partition(pp).heights.copy()
    h.setflags(write=False)
    return h


def min_heights(dims: HexDims) -> np.ndarray:
    """Heights of the empty partition (pointwise minimal height function)."""
    return _extreme(dims, False)


def max_heights(dims: HexDims) -> np.ndarray:
    """Heights of the full box (pointwise maximal height function)."""
    return _extreme(dims, True)


def heights_from_tiling(t: LozengeTiling) -> HeightField:
    return HeightField(t.dims, _heights_array(t.dims, t.verticals))


def tiling_from_heights(hf: HeightField) -> LozengeTiling:
    dims = hf.dims
    h = hf.heights
    rows = []
    for k in range(dims.a + dims.c + 1):
        lo, hi = q_range(dims, k)
        d = np.diff(h[k, lo:hi + 1])
        rows.append(tuple(int(p) + 1 for p in np.nonzero(d == -2)[0]))
    return LozengeTiling(dims, tuple(rows))


def line_height_profile(t: LozengeTiling, k: int) -> list[int]:
    """Heights at the ``n_k + 1`` vertices of line k, left to right.

    Starts from the boundary value at the left endpoint; each vertical lozenge
    crossed lowers the height by 2, every other unit step raises it by 1.
    """
    n = line_length(t.dims, k)
    occupied = set(t.verticals[k])
    out = [left_height(t.dims, k)]
    for p in range(1, n + 1):
        out.append(out[-1] + (-2 if p in occupied else 1))
    return out


# ---------------------------------------------------------------------------
# bijections
# ---------------------------------------------------------------------------

def tiling_from_partition(pp: PlanePartition) -> LozengeTiling:
    return tiling_from_heights(heights_from_partition(pp))


def partition_from_tiling(t: LozengeTiling) -> PlanePartition:
    return partition_from_heights(heights_from_tiling(t))


def hexagon_top_row(dims: HexDims) -> tuple[int, ...]:
    a, b, c = dims.as_tuple()
    return tuple(range(1, a + 1)) + tuple(range(a + b + 1, a + b + c + 1))


def pattern_from_tiling(t: LozengeTiling) -> GelfandPattern:
    """Trapezoidal positions of all verticals, augmented row by row."""
    return GelfandPattern(tuple(
        tuple(trapezoid_row(t.dims, k, row)) for k, row in enumerate(t.verticals)
        if k < t.dims.a + t.dims.c
    ))


def tiling_from_pattern(p: GelfandPattern, dims: HexDims) -> LozengeTiling:
    """Strip the augmenting verticals and convert to hexagonal positions."""
    a, b, c = dims.as_tuple()
    if p.rows[0] != hexagon_top_row(dims):
        raise ValidationError(f"top row {p.rows[0]} is not {hexagon_top_row(dims)}")
    verts = []
    for k, row in enumerate(p.rows):
        left, right = max(a - k, 0), max(c - k, 0)
        if row[:left] != tuple(range(1, left + 1)) or row[len(row) - right:] != tuple(
            range(a + b + 1, a + b + c - k + 1)
        ):
            raise ValidationError(f"row {k} has misplaced augmenting entries: {row}")
        verts.append(tuple(x - left for x in row[left:len(row) - right]))
    verts.append(())  # bottom edge of the hexagon carries no verticals
    return LozengeTiling(dims, tuple(verts))


# ---------------------------------------------------------------------------
# lozenges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lozenge:
    orientation: Orientation
    corners: tuple[tuple[int, int], ...]  # four (k, q) vertices, cyclic order

    @property
    def centre(self) -> tuple[float, float]:
        """Midpoint of the bisected edge, in (k, q) units."""
        (k0, q0), (k1, q1) = _diagonal(self)
        return (k0 + k1) / 2.0, (q0 + q1) / 2.0

    def edges(self) -> Iterator[frozenset]:
        cs = self.corners
        for i in range(4):
            yield frozenset((cs[i], cs[(i + 1) % 4]))


def _diagonal(loz: Lozenge):
    cs = loz.corners
    # corners[0] and corners[2] are the endpoints of the short diagonal
    return cs[0], cs[2]


def lozenges(t: LozengeTiling | HeightField) -> list[Lozenge]:
    """All ``ab + bc + ca`` lozenges of the tiling, located by bisected edges."""
    hf = heights_from_tiling(t) if isinstance(t, LozengeTiling) else t
    dims, h = hf.dims, hf.heights
    m = hexagon_mask(dims)
    out: list[Lozenge] = []
    hor = (h[:, 1:] - h[:, :-1] == -2) & m[:, 1:] & m[:, :-1]
    for k, q in np.argwhere(hor):
        out.append(Lozenge(Orientation.VERTICAL, ((k, q), (k - 1, q + 1), (k, q + 1), (k + 1, q))))
    dr = (h[1:, :] - h[:-1, :] == 2) & m[1:, :] & m[:-1, :]
    for k, q in np.argwhere(dr):
        out.append(Lozenge(Orientation.RIGHT, ((k, q), (k, q + 1), (k + 1, q), (k + 1, q - 1))))
    dl = (h[1:, :-1] - h[:-1, 1:] == -2) & m[1:, :-1] & m[:-1, 1:]
    for k, q0 in np.argwhere(dl):
        q = q0 + 1
        out.append(Lozenge(Orientation.LEFT, ((k, q), (k, q - 1), (k + 1, q - 1), (k + 1, q))))
    return [Lozenge(l.orientation, tuple((int(k), int(q)) for k, q in l.corners)) for l in out]


def orientation_counts(t: LozengeTiling) -> tuple[int, int, int]:
    """``(n_vertical, n_left, n_right)``; always ``(ac, bc, ab)``."""
    counts = [0, 0, 0]
    for loz in lozenges(t):
        counts[loz.orientation] += 1
    return counts[0], counts[1], counts[2]

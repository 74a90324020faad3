"""Exact enumeration of boxed plane partitions and line-constrained tilings.

Everything here works in Python integers and :class:`fractions.Fraction`, so
counts are exact no matter how large the hexagon is.

Positions along a horizontal line are *hexagonal positions*: the unit segment
``[p-1, p]`` measured from the left end of line ``k`` has position ``p``
(1-based).  Line ``k`` has ``n_k = b + min(k, a, c, a+c-k)`` such segments and
carries exactly ``min(k, a, c, a+c-k)`` vertical lozenges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

__all__ = [
    "HexDims",
    "ValidationError",
    "CapExceeded",
    "macmahon_count",
    "v_count",
    "v_product",
    "line_length",
    "verticals_on_line",
    "validate_positions",
    "mirror_positions",
    "line_count",
    "enumerate_line_positions",
    "line_distribution",
    "gelfand_enumerate",
    "trapezoid_row",
]


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class CapExceeded(RuntimeError):
    """Raised by brute-force enumerators when the object count is too large."""


@dataclass(frozen=True, order=True)
class HexDims:
    """Side lengths of the a,b,c hexagon (b is the horizontal side)."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValidationError(f"{name} must be an int, got {v!r}")
            if v < 1:
                raise ValidationError(f"{name} must be >= 1, got {v}")

    @classmethod
    def parse(cls, text: str) -> "HexDims":
        """Parse ``"a,b,c"``."""
        try:
            a, b, c = (int(s) for s in text.split(","))
        except ValueError as exc:
            raise ValidationError(f"expected 'a,b,c', got {text!r}") from exc
        return cls(a, b, c)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def n_lines(self) -> int:
        """Number of horizontal lattice lines, ``a + c + 1``."""
        return self.a + self.c + 1


def macmahon_count(dims: HexDims) -> int:
    """Number of plane partitions in an a x b x c box.

    Evaluates the triple product of ``(i+j+k+2)/(i+j+k+1)``.  The product over
    ``k`` telescopes to ``(i+j+c+1)/(i+j+1)``; the remaining double product is
    accumulated as a reduced fraction and must come out integral.
    """
    acc = Fraction(1)
    for i in range(dims.a):
        for j in range(dims.b):
            acc *= Fraction(i + j + dims.c + 1, i + j + 1)
    if acc.denominator != 1:
        raise AssertionError(f"MacMahon product not integral: {acc}")
    return acc.numerator


def _check_strict(xs: Sequence[int]) -> None:
    if any(not isinstance(x, int) for x in xs):
        raise ValidationError(f"row entries must be ints: {list(xs)!r}")
    if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
        raise ValidationError(f"row must be strictly increasing: {list(xs)!r}")


def v_product(xs: Sequence[int]) -> Fraction:
    """``prod_{i<j} (x_j - x_i)/(j - i)`` as a reduced fraction, any integers."""
    acc = Fraction(1)
    for j in range(1, len(xs)):
        num = 1
        for i in range(j):
            num *= xs[j] - xs[i]
        # prod_{i<j} (j - i) = j!
        acc *= Fraction(num, factorial(j))
    return acc


def v_count(row: Sequence[int]) -> int:
    """Number of semi-strict Gelfand patterns with the given top row."""
    row = list(row)
    if not row:
        raise ValidationError("top row must be non-empty")
    _check_strict(row)
    val = v_product(row)
    if val.denominator != 1 or val.numerator <= 0:
        raise AssertionError(f"V{tuple(row)} = {val} is not a positive integer")
    return val.numerator


def _v(xs: Sequence[int]) -> int:
    # V of an empty row is the empty product.
    return v_count(xs) if xs else 1


def verticals_on_line(dims: HexDims, k: int) -> int:
    """``min(k, a, c, a+c-k)``: vertical lozenges bisected by line k."""
    a, c = dims.a, dims.c
    if not 0 <= k <= a + c:
        raise ValidationError(f"line index {k} outside 0..{a + c}")
    return min(k, a, c, a + c - k)


def line_length(dims: HexDims, k: int) -> int:
    """Number of unit segments on line k."""
    return dims.b + verticals_on_line(dims, k)


def validate_positions(dims: HexDims, k: int, positions: Sequence[int]) -> tuple[int, ...]:
    ell = verticals_on_line(dims, k)
    n = line_length(dims, k)
    pos = tuple(positions)
    if len(pos) != ell:
        raise ValidationError(f"line {k} of {dims.as_tuple()} needs {ell} positions, got {len(pos)}")
    if pos:
        _check_strict(pos)
        if pos[0] < 1 or pos[-1] > n:
            raise ValidationError(f"positions {pos} outside 1..{n}")
    return pos


def mirror_positions(positions: Sequence[int], n: int) -> tuple[int, ...]:
    """Left-right reflection of positions on a line with n segments."""
    return tuple(n + 1 - p for p in reversed(positions))


def trapezoid_row(dims: HexDims, k: int, positions: Sequence[int]) -> list[int]:
    """Row k of the Gelfand pattern: hexagonal positions plus augmentation.

    The augmenting verticals sit at trapezoidal positions ``1..a-k`` on the
    left (when k < a) and ``a+b+1..a+b+c-k`` on the right (when k < c).
    """
    a, b, c = dims.a, dims.b, dims.c
    left = max(a - k, 0)
    return (
        list(range(1, left + 1))
        + [left + p for p in positions]
        + list(range(a + b + 1, a + b + c - k + 1))
    )


def _line_count_upper_half(a: int, b: int, c: int, k: int, pos: tuple[int, ...]) -> int:
    # Printed branches, valid for k <= (a+c)/2 and a <= c (or k < min(a, c)).
    if k < min(a, c):
        lower = list(range(1, a - k + 1)) + [a - k + p for p in pos] + list(range(a + b + 1, a + b + c - k + 1))
        return _v(pos) * _v(lower)
    assert a <= k
    upper = list(range(1, k - a + 1)) + [k - a + p for p in pos]
    lower = list(pos) + list(range(a + b + 1, a + b + c - k + 1))
    return _v(upper) * _v(lower)


def line_count(dims: HexDims, k: int, positions: Sequence[int]) -> int:
    """Tilings whose verticals on line k sit exactly at ``positions``."""
    pos = validate_positions(dims, k, positions)
    a, b, c = dims.a, dims.b, dims.c
    n = line_length(dims, k)
    if 2 * k > a + c:
        # 180 degree rotation maps line k to line a+c-k of the same hexagon.
        return line_count(dims, a + c - k, mirror_positions(pos, n))
    if k >= min(a, c) and c < a:
        # Left-right reflection swaps the roles of a and c.
        return _line_count_upper_half(c, b, a, k, mirror_positions(pos, n))
    return _line_count_upper_half(a, b, c, k, pos)


def enumerate_line_positions(dims: HexDims, k: int) -> Iterator[tuple[int, ...]]:
    """All admissible position vectors on line k, lexicographically."""
    ell = verticals_on_line(dims, k)
    return itertools.combinations(range(1, line_length(dims, k) + 1), ell)


def line_distribution(dims: HexDims, k: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law of the vertical positions on line k under the uniform tiling."""
    total = macmahon_count(dims)
    dist = {p: Fraction(line_count(dims, k, p), total) for p in enumerate_line_positions(dims, k)}
    if sum(dist.values()) != 1:
        raise AssertionError("line distribution does not sum to 1")
    return dist


def gelfand_enumerate(row: Sequence[int], cap: int = 100_000) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every semi-strict Gelfand pattern with the given top row.

    Each pattern is a tuple of rows, the top row first.  Refuses (raises
    :class:`CapExceeded`) when the number of patterns exceeds ``cap``.
    """
    top = tuple(row)
    total = v_count(top)
    if total > cap:
        raise CapExceeded(f"{total} patterns with top row {top} exceeds cap {cap}")

    def below(xs: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if len(xs) == 1:
            yield (xs,)
            return
        for ys in itertools.product(*(range(xs[i], xs[i + 1]) for i in range(len(xs) - 1))):
            for rest in below(ys):
                yield (xs,) + rest

    yield from below(top)

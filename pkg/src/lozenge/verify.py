"""Self-checks run by ``lozenge verify``.

Each check returns ``(ok, detail)``.  The quick set finishes in a few
seconds; the full set adds larger enumerations and sampling runs.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from typing import Callable

import numpy as np

from .exact import (
    HexDims,
    enumerate_line_positions,
    gelfand_enumerate,
    line_count,
    macmahon_count,
    mirror_positions,
    v_count,
)
from .functional import JProfile, closed_form_profile, maximize, riemann_check
from .limit_shape import (
    LineParams,
    ShapeParams,
    a_cumulative,
    average_density,
    consistency_density_vs_line,
    hilbert_residual,
    roots,
)
from .sampler import cftp_heights, enumerate_all_tilings
from .tiling import (
    HeightField,
    heights_from_tiling,
    orientation_counts,
    partition_from_tiling,
    pattern_from_tiling,
    tiling_from_heights,
    tiling_from_partition,
    tiling_from_pattern,
)

Check = Callable[[], tuple[bool, str]]


def _counts() -> tuple[bool, str]:
    got = [macmahon_count(HexDims(n, n, n)) for n in (1, 2, 3)]
    return got == [2, 20, 980], f"macmahon(1..3) = {got}"


def _enumeration(limit: int) -> Check:
    def run():
        for a, b, c in itertools.product(range(1, limit + 1), repeat=3):
            d = HexDims(a, b, c)
            n = sum(1 for _ in enumerate_all_tilings(d))
            if n != macmahon_count(d):
                return False, f"{d.as_tuple()}: enumerated {n}"
        return True, f"enumeration matches for sides <= {limit}"
    return run


def _line_sums(limit: int) -> Check:
    def run():
        for a, b, c in itertools.product(range(1, limit + 1), repeat=3):
            d = HexDims(a, b, c)
            total = macmahon_count(d)
            for k in range(a + c + 1):
                s = sum(line_count(d, k, p) for p in enumerate_line_positions(d, k))
                if s != total:
                    return False, f"{d.as_tuple()} line {k}: sum {s} != {total}"
        return True, f"line counts sum to the total for sides <= {limit}"
    return run


def _gelfand() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        row = sorted(rng.choice(np.arange(1, 10), size=n, replace=False).tolist())
        if sum(1 for _ in gelfand_enumerate(row)) != v_count(row):
            return False, f"row {row}"
    return True, "v_count matches pattern enumeration on 20 rows"


def _bijections() -> tuple[bool, str]:
    d = HexDims(2, 2, 2)
    for t in enumerate_all_tilings(d):
        if tiling_from_partition(partition_from_tiling(t)) != t:
            return False, "partition round trip"
        if tiling_from_pattern(pattern_from_tiling(t), d) != t:
            return False, "pattern round trip"
        if tiling_from_heights(heights_from_tiling(t)) != t:
            return False, "height round trip"
        if orientation_counts(t) != (4, 4, 4):
            return False, "orientation counts"
    return True, "round trips and orientation counts on all (2,2,2) tilings"


def _cftp(n_samples: int) -> Check:
    def run():
        d = HexDims(2, 2, 2)
        hs, _ = cftp_heights(d, 2024, n_samples)
        freq = np.array(list(Counter(h.tobytes() for h in hs).values())) / n_samples
        if len(freq) != 20:
            return False, f"saw {len(freq)} of 20 tilings"
        tv = 0.5 * np.abs(freq - 1 / 20).sum()
        bound = 3.0 * math.sqrt(20 / n_samples)  # generous for the sample size
        return tv < bound, f"TV distance {tv:.4f} over {n_samples} samples"
    return run


def _limit_shape() -> tuple[bool, str]:
    sp = ShapeParams(1.0, 1.5, 0.7)
    rng = np.random.default_rng(1)
    pts = []
    while len(pts) < 100:
        x, y = rng.uniform(-1.5, 1.5, size=2)
        if sp.contains(x, y) and abs(x) + abs(y) > 1e-3:
            pts.append((x, y))
    d = consistency_density_vs_line(sp, pts)
    lp = LineParams(0.4, 0.5, 0.25)
    roots(lp)
    a1 = a_cumulative(lp, 1.0)
    r1, r2 = lp.roots
    h = max(abs(hilbert_residual(lp, t)) for t in np.linspace(r1, r2, 7)[1:-1])
    ok = d < 1e-8 and abs(a1 - 0.4) < 1e-7 and h < 1e-3
    return ok, f"density/line gap {d:.1e}, A(1)-lam {a1 - 0.4:.1e}, Hilbert residual {h:.1e}"


def _average_density() -> tuple[bool, str]:
    sp = ShapeParams(2.0, 1.0, 1.0)
    v = average_density(sp)
    return abs(v - 0.4) < 1e-4, f"average density {v:.6f} (expected 0.4)"


def _maximize() -> tuple[bool, str]:
    r = maximize(JProfile(0.0, 0.0), 0.5, 100)
    ts = np.linspace(0, 1, 101)
    err = float(np.max(np.abs(r.A(ts) - closed_form_profile(0.5, 0.0, 0.0, ts))))
    return err < 0.02, f"maximizer vs closed form sup error {err:.4f}"


def _riemann_mirror() -> tuple[bool, str]:
    d = HexDims(6, 6, 6)
    p = (1, 2, 7)
    rc = riemann_check(d, 3, p, mirror_positions(p, 9))
    return abs(rc.lhs) < 1e-10 and abs(rc.rhs) < 1e-10, f"mirror pair lhs {rc.lhs:.1e} rhs {rc.rhs:.1e}"


def _heights_valid() -> tuple[bool, str]:
    d = HexDims(3, 4, 2)
    hs, _ = cftp_heights(d, 5, 50)
    for h in hs:
        tiling_from_heights(HeightField(d, h))  # validates the edge rules
    return True, "50 sampled height functions satisfy the edge rules"


def checks(quick: bool = True) -> list[tuple[str, Check]]:
    out: list[tuple[str, Check]] = [
        ("macmahon counts", _counts),
        ("brute-force enumeration", _enumeration(2 if quick else 3)),
        ("line-count completeness", _line_sums(2 if quick else 3)),
        ("gelfand oracle", _gelfand),
        ("bijections", _bijections),
        ("sampled heights valid", _heights_valid),
        ("cftp uniformity", _cftp(20_000 if quick else 200_000)),
        ("limit shape", _limit_shape),
        ("maximizer", _maximize),
        ("riemann mirror", _riemann_mirror),
    ]
    if not quick:
        out.append(("average density", _average_density))
    return out


def run_checks(quick: bool = True, out=print) -> bool:
    all_ok = True
    for name, fn in checks(quick):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - t0:.1f}s)")
    return all_ok

"""Command-line interface: ``lozenge <subcommand> ...``.

Exit status is 0 on success, 1 when an input fails validation and 2 on
usage errors.  Relative output paths are resolved against ``$LOZENGE_OUT_DIR``
when it is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .exact import (
    CapExceeded,
    HexDims,
    ValidationError,
    line_count,
    line_distribution,
    macmahon_count,
)
from .functional import JProfile, maximize, riemann_check
from .limit_shape import (
    LineParams,
    ShapeParams,
    a_profile,
    aprime,
    classify_region,
    density_grid,
    height_surface,
    hilbert_residual,
    line_params,
)
from .render import tiling_ascii, tiling_svg
from .sampler import SampleBatch, arctic_region, density_map, sample_batch
from .tiling import (
    GelfandPattern,
    LozengeTiling,
    PlanePartition,
    heights_from_tiling,
    partition_from_tiling,
    pattern_from_tiling,
    tiling_from_partition,
    tiling_from_pattern,
)


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _dims(text: str) -> HexDims:
    try:
        return HexDims.parse(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _out_path(path: str) -> str:
    base = os.environ.get("LOZENGE_OUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(_out_path(out), "w") as fh:
            fh.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _read_json(path: str) -> dict:
    """A JSON object, or the first record of a JSONL batch."""
    with open(path) as fh:
        text = fh.read().strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return json.loads(text.splitlines()[0])


def _read_tiling(path: str) -> LozengeTiling:
    return LozengeTiling.from_json(_read_json(path))


def _shape(args) -> ShapeParams:
    return ShapeParams(args.alpha, args.beta, args.gamma)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_count(args) -> int:
    n = macmahon_count(args.dims)
    if args.json:
        print(json.dumps({"dims": list(args.dims.as_tuple()), "count": n}))
    else:
        print(n)
    return 0


def cmd_line_count(args) -> int:
    n = line_count(args.dims, args.k, args.positions)
    if args.json:
        print(json.dumps({"dims": list(args.dims.as_tuple()), "k": args.k,
                          "positions": list(args.positions), "count": n}))
    else:
        print(n)
    return 0


def cmd_line_dist(args) -> int:
    dist = line_distribution(args.dims, args.k)
    total = macmahon_count(args.dims)
    if args.json:
        obj = {
            "dims": list(args.dims.as_tuple()),
            "k": args.k,
            "positions": [list(p) for p in dist],
            "counts": [int(f * total) for f in dist.values()],
            "probabilities": [str(f) for f in dist.values()],
        }
        _emit(json.dumps(obj) + "\n", args.out)
    else:
        rows = [(" ".join(map(str, p)), int(f * total), str(f), _fmt(float(f))) for p, f in dist.items()]
        _emit(_csv(rows, ["positions", "count", "probability", "probability_float"]), args.out)
    return 0


def cmd_convert(args) -> int:
    obj = _read_json(args.input)
    if "verticals" in obj:
        t = LozengeTiling.from_json(obj)
    elif "parts" in obj:
        dims = HexDims(obj["a"], obj["b"], obj["c"])
        t = tiling_from_partition(PlanePartition(dims, tuple(tuple(r) for r in obj["parts"])))
    elif "rows" in obj:
        dims = HexDims(obj["a"], obj["b"], obj["c"])
        t = tiling_from_pattern(GelfandPattern(tuple(tuple(r) for r in obj["rows"])), dims)
    else:
        raise ValidationError("input must hold 'verticals', 'parts' or 'rows'")
    a, b, c = t.dims.as_tuple()
    if args.to == "tiling":
        res = t.to_json()
    elif args.to == "partition":
        res = {"a": a, "b": b, "c": c, "parts": [list(r) for r in partition_from_tiling(t).parts]}
    elif args.to == "pattern":
        res = {"a": a, "b": b, "c": c, "rows": [list(r) for r in pattern_from_tiling(t).rows]}
    else:
        res = {"a": a, "b": b, "c": c, "heights": heights_from_tiling(t).heights.tolist()}
    _emit(json.dumps(res, separators=(",", ":")) + "\n", args.out)
    return 0


def cmd_render(args) -> int:
    t = _read_tiling(args.input)
    text = tiling_ascii(t) if args.ascii else tiling_svg(t, scale=args.scale)
    _emit(text, args.out)
    return 0


def cmd_sample(args) -> int:
    batch = sample_batch(args.dims, args.n, args.seed, args.method, sweeps=args.sweeps, jobs=args.jobs)
    if args.out is None:
        for t in batch.tilings:
            print(t.dumps())
    else:
        batch.write_jsonl(_out_path(args.out))
    return 0


def cmd_density(args) -> int:
    if args.input:
        batch = SampleBatch.read_jsonl(args.input)
    elif args.dims:
        batch = sample_batch(args.dims, args.n, args.seed, "cftp", jobs=args.jobs)
    else:
        raise ValidationError("density needs --in or --dims")
    grid = density_map(batch, bin_width=args.grid, sigma=args.sigma)
    rows = [(_fmt(x), _fmt(y), _fmt(f), n) for x, y, f, n in grid.rows()]
    _emit(_csv(rows, ["bin_x", "bin_y", "freq", "n"]), args.out)
    return 0


def cmd_arctic(args) -> int:
    t = _read_tiling(args.input)
    mask = arctic_region(t)
    _emit(tiling_svg(t, scale=args.scale, arctic=mask, show_ellipse=True), args.out)
    return 0


def cmd_limit(args) -> int:
    sp = _shape(args)
    v = sp.vertices()
    xs = np.arange(np.floor(v[:, 0].min() / args.grid), np.ceil(v[:, 0].max() / args.grid) + 1) * args.grid
    ys = np.arange(np.floor(-sp.y_top / args.grid), np.ceil(sp.y_top / args.grid) + 1) * args.grid
    rows = []
    for y in ys:
        for x in xs:
            reg = classify_region(sp, x, y)
            if reg.name == "OUTSIDE":
                continue
            p = float(density_grid(sp, x, y)) if reg.name != "SINGULAR_POINT" else float("nan")
            rows.append((_fmt(x), _fmt(y), reg.value, _fmt(p)))
    _emit(_csv(rows, ["x", "y", "region", "P"]), args.out)
    return 0


def cmd_shape(args) -> int:
    g = height_surface(_shape(args), args.h)
    rows = [
        (_fmt(g.xs[i]), _fmt(g.ys[j]), _fmt(g.H[j, i]))
        for j in range(len(g.ys)) for i in range(len(g.xs)) if np.isfinite(g.H[j, i])
    ]
    sys.stderr.write(f"right-boundary mismatch {g.right_mismatch:.3g}\n")
    _emit(_csv(rows, ["x", "y", "H"]), args.out)
    return 0


def cmd_line(args) -> int:
    if args.kappa is not None:
        lp = line_params(_shape(args), args.kappa)
    elif args.lam is not None:
        lp = LineParams(args.lam, args.rhol, args.rhor)
    else:
        raise ValidationError("line needs --kappa (with the shape) or --lambda")
    ts = (np.arange(args.points) + 0.5) / args.points
    cum = a_profile(lp, ts)
    rows = []
    for t, c in zip(ts, cum):
        try:
            hr = _fmt(hilbert_residual(lp, float(t)))
        except (RuntimeError, ValueError):
            hr = "nan"
        rows.append((_fmt(t), _fmt(float(aprime(lp, t))), _fmt(c), hr))
    _emit(_csv(rows, ["t", "aprime", "a_cumulative", "hilbert_residual"]), args.out)
    return 0


def cmd_maximize(args) -> int:
    res = maximize(JProfile(args.rhol, args.rhor), args.lam, args.n)
    A = res.A
    slopes = np.concatenate([res.slopes, [np.nan]])
    rows = [(_fmt(t), _fmt(a), _fmt(s)) for t, a, s in zip(A.xs, A.ys, slopes)]
    text = f"# V={res.value:.12g} iterations={res.iterations} converged={res.converged}\n"
    _emit(text + _csv(rows, ["t", "A", "slope"]), args.out)
    return 0


def cmd_riemann(args) -> int:
    rc = riemann_check(args.dims, args.k, args.p1, args.p2)
    print(json.dumps({"lhs": rc.lhs, "rhs": rc.rhs, "gap": rc.gap, "n": rc.n}))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_checks

    return 0 if run_checks(quick=args.quick) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lozenge", description="Lozenge tilings of a,b,c hexagons.")
    p.add_argument("--version", action="version", version=f"lozenge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    def shape_args(sp, required=True):
        sp.add_argument("--alpha", type=float, required=required, default=1.0)
        sp.add_argument("--beta", type=float, required=required, default=1.0)
        sp.add_argument("--gamma", type=float, required=required, default=1.0)

    sp = add("count", cmd_count, "number of tilings (MacMahon's formula)")
    sp.add_argument("--dims", type=_dims, required=True, help="a,b,c")
    sp.add_argument("--json", action="store_true")

    sp = add("line-count", cmd_line_count, "tilings with prescribed verticals on one line")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--k", type=int, required=True, help="line index from the top")
    sp.add_argument("--positions", type=_ints, required=True, help="hexagonal positions, e.g. 1,4")
    sp.add_argument("--json", action="store_true")

    sp = add("line-dist", cmd_line_dist, "exact law of the verticals on one line")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")

    sp = add("convert", cmd_convert, "convert between tiling, partition, pattern and heights")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--to", choices=["tiling", "partition", "pattern", "heights"], required=True)
    sp.add_argument("--out")

    sp = add("render", cmd_render, "draw a tiling as SVG or ASCII")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--ascii", action="store_true")
    sp.add_argument("--scale", type=float, default=20.0)

    sp = add("sample", cmd_sample, "random tilings as JSON lines")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--method", choices=["cftp", "mcmc", "enum"], default="cftp")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sweeps", type=int, default=1000, help="passes for --method mcmc")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.add_argument("--out")

    sp = add("density", cmd_density, "binned vertical-lozenge frequencies as CSV")
    sp.add_argument("--in", dest="input", help="JSONL batch from 'sample'")
    sp.add_argument("--dims", type=_dims, help="sample with CFTP instead of reading --in")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--grid", type=float, default=0.05, help="bin width in normalized units")
    sp.add_argument("--sigma", type=float, help="length scale (default (a+b+c)/3)")
    sp.add_argument("--out")

    sp = add("arctic", cmd_arctic, "SVG of the arctic region with the inscribed ellipse")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--scale", type=float, default=10.0)

    sp = add("limit", cmd_limit, "limiting density on a grid as CSV")
    shape_args(sp)
    sp.add_argument("--grid", type=float, default=0.05)
    sp.add_argument("--out")

    sp = add("shape", cmd_shape, "limiting height surface on a grid as CSV")
    shape_args(sp)
    sp.add_argument("--h", type=float, default=1 / 200, help="grid spacing")
    sp.add_argument("--out")

    sp = add("line", cmd_line, "limiting profile along one line as CSV")
    shape_args(sp, required=False)
    sp.add_argument("--kappa", type=float, help="depth of the line as a fraction of the height")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--rhol", type=float, default=0.0)
    sp.add_argument("--rhor", type=float, default=0.0)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--out")

    sp = add("maximize", cmd_maximize, "numerical maximizer of the functional as CSV")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--rhol", type=float, default=0.0)
    sp.add_argument("--rhor", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--out")

    sp = add("riemann-check", cmd_riemann, "log-count difference against the functional")
    sp.add_argument("--dims", type=_dims, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p1", type=_ints, required=True)
    sp.add_argument("--p2", type=_ints, required=True)

    sp = add("verify", cmd_verify, "run the built-in invariant checks")
    sp.add_argument("--quick", action="store_true")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, CapExceeded, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""SVG and ASCII pictures of tilings."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import __version__
from .exact import line_length
from .limit_shape import ShapeParams, ellipse_E
from .sampler import ArcticMask
from .tiling import LozengeTiling, Orientation, lozenges, vertex_xy

# vertical lozenges are left unshaded; the two tilted orientations get two greys
FILLS = {Orientation.VERTICAL: "#ffffff", Orientation.LEFT: "#b0b0b0", Orientation.RIGHT: "#606060"}
CLASSES = {Orientation.VERTICAL: "vertical", Orientation.LEFT: "left", Orientation.RIGHT: "right"}


def _polygon(points: Sequence[tuple[float, float]], scale: float, attrs: str) -> str:
    pts = " ".join(f"{x * scale:.3f},{-y * scale:.3f}" for x, y in points)
    return f'<polygon points="{pts}" {attrs}/>'


def _header(dims, scale: float) -> list[str]:
    a, b, c = dims.as_tuple()
    w = (a + 2 * b + c) / 2 + 1
    h = (a + c) * math.sqrt(3) / 2 + 1
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-w / 2 * scale:.3f} {-h / 2 * scale:.3f} '
        f'{w * scale:.3f} {h * scale:.3f}" width="{w * scale:.0f}" height="{h * scale:.0f}">',
        f"<!-- lozenge {__version__} -->",
    ]


def ellipse_points(dims, n: int = 256) -> np.ndarray:
    """Points of the inscribed ellipse in lattice coordinates (origin at the centre)."""
    sp = ShapeParams(*map(float, dims.as_tuple()))
    th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    cx, cy = np.cos(th), np.sin(th)
    k0 = ellipse_E(sp, 0.0, 0.0)
    quad = k0 - ellipse_E(sp, cx, cy)  # E(r u) = k0 - r^2 q(u)
    r = np.sqrt(k0 / quad)
    return np.column_stack([r * cx, r * cy])


def tiling_svg(t: LozengeTiling, scale: float = 20.0, arctic: ArcticMask | None = None,
               show_ellipse: bool = False) -> str:
    """One ``<polygon>`` per lozenge with class ``vertical``, ``left`` or ``right``."""
    lines = _header(t.dims, scale)
    frozen = dict(zip(arctic.lozenges, arctic.arctic)) if arctic is not None else {}
    for loz in lozenges(t):
        ks, qs = zip(*loz.corners)
        xs, ys = vertex_xy(t.dims, np.array(ks), np.array(qs))
        fill = FILLS[loz.orientation]
        cls = CLASSES[loz.orientation]
        extra = ""
        if frozen.get(loz):
            cls += " arctic"
            extra = ' fill-opacity="0.55"'
        lines.append(_polygon(list(zip(xs, ys)), scale,
                              f'class="{cls}" fill="{fill}" stroke="#000" stroke-width="0.5"{extra}'))
    if show_ellipse:
        pts = ellipse_points(t.dims)
        path = " ".join(f"{x * scale:.3f},{-y * scale:.3f}" for x, y in pts)
        lines.append(f'<polygon class="ellipse" points="{path}" fill="none" stroke="#d00" stroke-width="1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def tiling_ascii(t: LozengeTiling) -> str:
    """One text row per horizontal line: ``|`` where a vertical lozenge sits, ``.`` elsewhere.

    Rows are indented so that lattice columns line up as on the hexagon.
    """
    a = t.dims.a
    rows = []
    for k, verts in enumerate(t.verticals):
        n = line_length(t.dims, k)
        occ = set(verts)
        indent = abs(a - k)
        rows.append(" " * indent + " ".join("|" if p in occ else "." for p in range(1, n + 1)))
    return "\n".join(rows) + "\n"

"""Serialization of sweep results: CSV, JSON sidecars, PPM and SVG images."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .sweep import HeatmapGrid, SignMap

Grid = Union[HeatmapGrid, SignMap]

# anchor colours of a viridis-like ramp, low -> high
_VIRIDIS = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)
_SIGN_COLOURS = {-1: (0, 0, 255), 0: (255, 255, 255), 1: (255, 0, 0)}
_NAN_COLOUR = (128, 128, 128)


def fmt(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(value), ".17g")


def write_csv(path: Union[str, Path], grid: Grid) -> Path:
    """Header ``x,y,value``; rows ordered by y, then x; LF line endings."""
    path = Path(path)
    xs = grid.spec.x.grid()
    ys = grid.spec.y.grid()
    lines = ["x,y,value"]
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            lines.append(f"{fmt(x)},{fmt(y)},{fmt(grid.cells[iy, ix])}")
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def read_csv(path: Union[str, Path]) -> np.ndarray:
    """Rows of (x, y, value) as a float array."""
    text = Path(path).read_text()
    rows = [line.split(",") for line in text.splitlines()[1:] if line]
    return np.array([[float(c) for c in row] for row in rows])


def write_json(path: Union[str, Path], payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def _viridis(t: float):
    pos = t * (len(_VIRIDIS) - 1)
    i = min(int(pos), len(_VIRIDIS) - 2)
    frac = pos - i
    rgb = _VIRIDIS[i] * (1 - frac) + _VIRIDIS[i + 1] * frac
    return tuple(int(round(c)) for c in rgb)


def cell_colours(grid: Grid) -> np.ndarray:
    """RGB per cell, shape (ny, nx, 3), row 0 = lowest y."""
    ny, nx = grid.cells.shape
    rgb = np.zeros((ny, nx, 3), dtype=np.uint8)
    if isinstance(grid, SignMap):
        for iy in range(ny):
            for ix in range(nx):
                rgb[iy, ix] = _NAN_COLOUR if grid.nan_mask[iy, ix] else _SIGN_COLOURS[int(grid.cells[iy, ix])]
        return rgb
    lo, hi = grid.min, grid.max
    span = hi - lo if hi > lo else 1.0
    for iy in range(ny):
        for ix in range(nx):
            v = grid.cells[iy, ix]
            rgb[iy, ix] = _NAN_COLOUR if math.isnan(v) else _viridis((v - lo) / span)
    return rgb


def write_ppm(path: Union[str, Path], grid: Grid, scale: int = 8) -> Path:
    """Binary P6 image, one ``scale`` x ``scale`` block per cell, y increasing upward."""
    path = Path(path)
    rgb = cell_colours(grid)[::-1]
    img = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    h, w = img.shape[:2]
    path.write_bytes(f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes())
    return path


def write_svg(path: Union[str, Path], grid: Grid, title: str = "", cell: int = 8) -> Path:
    path = Path(path)
    rgb = cell_colours(grid)
    ny, nx = grid.cells.shape
    margin = 48
    w, h = nx * cell, ny * cell
    xs, ys = grid.spec.x.grid(), grid.spec.y.grid()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 2 * margin}" height="{h + 2 * margin}">',
        f'<text x="{margin}" y="{margin / 2}" font-size="12">{title}</text>',
    ]
    for iy in range(ny):
        for ix in range(nx):
            r, g, b = rgb[iy, ix]
            parts.append(
                f'<rect x="{margin + ix * cell}" y="{margin + (ny - 1 - iy) * cell}" '
                f'width="{cell}" height="{cell}" fill="rgb({r},{g},{b})"/>'
            )
    parts.append(
        f'<text x="{margin + w / 2}" y="{h + 1.6 * margin}" font-size="12" text-anchor="middle">'
        f"{grid.spec.x.name} [{xs[0]:g}, {xs[-1]:g}]</text>"
    )
    parts.append(
        f'<text x="{margin / 3}" y="{margin + h / 2}" font-size="12" '
        f'transform="rotate(-90 {margin / 3} {margin + h / 2})" text-anchor="middle">'
        f"{grid.spec.y.name} [{ys[0]:g}, {ys[-1]:g}]</text>"
    )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path

"""Deterministic parallel evaluation of a cell kernel over a 2-D grid.

A kernel is any callable ``kernel(x, y, fixed) -> float``.  Cells are
independent work units; results are written back by grid position, so the
assembled array does not depend on the number of workers or on scheduling.
A kernel that raises leaves NaN in its cell and an entry in ``errors``.
"""
from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidGrid

SCALES = ("linear", "log", "explicit")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"
    values: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.scale not in SCALES:
            raise InvalidGrid(f"axis {self.name!r}: unknown scale {self.scale!r}")
        if self.count < 1:
            raise InvalidGrid(f"axis {self.name!r}: count must be >= 1")
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            if v.size != self.count or np.any(np.diff(v) <= 0) or not np.all(np.isfinite(v)):
                raise InvalidGrid(f"axis {self.name!r}: values must be finite and strictly increasing")
            return
        if self.scale == "explicit":
            raise InvalidGrid(f"axis {self.name!r}: explicit scale needs values")
        if not self.min < self.max:
            raise InvalidGrid(f"axis {self.name!r}: min must be < max")
        if self.scale == "log" and not self.min > 0:
            raise InvalidGrid(f"axis {self.name!r}: log scale needs min > 0")

    @classmethod
    def from_values(cls, name: str, values: Sequence[float]) -> "Axis":
        v = tuple(float(x) for x in values)
        if not v:
            raise InvalidGrid(f"axis {name!r}: empty grid")
        return cls(name, v[0], v[-1], len(v), "explicit", v)

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.count == 1:
            return np.array([float(self.min)])
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def to_dict(self) -> dict:
        d = {"name": self.name, "min": self.min, "max": self.max, "count": self.count, "scale": self.scale}
        if self.values is not None:
            d["values"] = list(self.values)
        return d


@dataclass(frozen=True)
class GridSpec:
    x: Axis
    y: Axis
    fixed_params: Dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        """Cell array shape, (count_y, count_x)."""
        return (self.y.count, self.x.count)


@dataclass
class HeatmapGrid:
    """Real-valued cells indexed ``cells[iy, ix]``."""

    spec: GridSpec
    cells: np.ndarray
    errors: Dict[Tuple[int, int], str] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def min(self) -> float:
        return float(np.nanmin(self.cells)) if np.any(np.isfinite(self.cells)) else math.nan

    @property
    def max(self) -> float:
        return float(np.nanmax(self.cells)) if np.any(np.isfinite(self.cells)) else math.nan


@dataclass
class SignMap:
    """Cells in {-1, 0, +1}; ``nan_mask`` marks cells whose value was NaN."""

    spec: GridSpec
    cells: np.ndarray
    nan_mask: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.cells == 1))

    def positive_counts_by_x(self) -> np.ndarray:
        """Number of +1 cells in every column (one entry per x value)."""
        return np.count_nonzero(self.cells == 1, axis=0)

    def positive_counts_by_y(self) -> np.ndarray:
        return np.count_nonzero(self.cells == 1, axis=1)


def _eval_cell(kernel, fixed, xy):
    x, y = xy
    try:
        return float(kernel(x, y, fixed)), None
    except Exception as exc:  # fault isolation: one bad cell never aborts a sweep
        return math.nan, f"{type(exc).__name__}: {exc}"


class _Progress:
    def __init__(self, total: int, enabled: bool, stream=None):
        self.total = total
        self.enabled = enabled
        self.stream = stream if stream is not None else sys.stderr
        self.next_pct = 5

    def update(self, done: int) -> None:
        if not self.enabled:
            return
        pct = 100 * done // self.total
        if pct >= self.next_pct:
            print(f"sweep: {done}/{self.total} cells ({pct}%)", file=self.stream, flush=True)
            self.next_pct = (pct // 5 + 1) * 5


def run_sweep(
    spec: GridSpec,
    kernel: Callable[[float, float, dict], float],
    workers: int = 1,
    *,
    backend: str = "thread",
    progress: bool = False,
    progress_stream=None,
) -> HeatmapGrid:
    """Evaluate ``kernel`` on every grid cell.

    ``backend`` is ``"thread"`` or ``"process"``; the process pool needs a
    picklable kernel and picklable fixed parameters.
    """
    if workers < 1:
        raise InvalidGrid("workers must be >= 1")
    if backend not in ("thread", "process"):
        raise ValueError(f"unknown backend {backend!r}")
    xs = spec.x.grid()
    ys = spec.y.grid()
    points = [(float(x), float(y)) for y in ys for x in xs]
    total = len(points)
    job = partial(_eval_cell, kernel, spec.fixed_params)
    bar = _Progress(total, progress, progress_stream)

    if workers == 1:
        results = []
        for xy in points:
            results.append(job(xy))
            bar.update(len(results))
    else:
        pool_cls = ThreadPoolExecutor if backend == "thread" else ProcessPoolExecutor
        chunk = max(1, total // (workers * 16))
        results = []
        with pool_cls(max_workers=workers) as pool:
            kwargs = {"chunksize": chunk} if backend == "process" else {}
            for res in pool.map(job, points, **kwargs):
                results.append(res)
                bar.update(len(results))

    nx = xs.size
    cells = np.empty(spec.shape, dtype=float)
    errors = {}
    for k, (value, err) in enumerate(results):
        iy, ix = divmod(k, nx)
        cells[iy, ix] = value
        if err is not None:
            errors[(ix, iy)] = err
    return HeatmapGrid(spec, cells, errors)


def to_sign_map(h: HeatmapGrid, zero_band: float) -> SignMap:
    """Sign of every cell; |v| <= zero_band and NaN both map to 0."""
    if zero_band < 0:
        raise ValueError("zero_band must be >= 0")
    v = h.cells
    nan_mask = np.isnan(v)
    cells = np.zeros(v.shape, dtype=np.int8)
    with np.errstate(invalid="ignore"):
        cells[v > zero_band] = 1
        cells[v < -zero_band] = -1
    meta = dict(h.metadata)
    meta["zero_band"] = zero_band
    meta["nan_cells"] = int(nan_mask.sum())
    return SignMap(h.spec, cells, nan_mask, meta)

import io

import numpy as np
import pytest

from zenonm.errors import InvalidGrid
from zenonm.spectral import QuadratureOptions, SpectralParams, zeno_ratio_kernel
from zenonm.sweep import Axis, GridSpec, HeatmapGrid, run_sweep, to_sign_map


def add(x, y, fixed):
    return x + y


def fragile(x, y, fixed):
    if x == 1.0 and y == 0.0:
        raise ZeroDivisionError("bad cell")
    return x * y


def unit_spec(**fixed):
    return GridSpec(Axis("x", 0.0, 1.0, 2), Axis("y", 0.0, 1.0, 2), fixed)


def test_arithmetic_kernel():
    h = run_sweep(unit_spec(), add)
    assert np.array_equal(h.cells, [[0.0, 1.0], [1.0, 2.0]])
    assert h.errors == {}


def test_fault_isolation():
    h = run_sweep(unit_spec(), fragile)
    assert np.isnan(h.cells[0, 1])
    assert list(h.errors) == [(1, 0)] and "ZeroDivisionError" in h.errors[(1, 0)]
    assert h.cells[1, 1] == 1.0 and h.cells[0, 0] == 0.0


def test_workers_do_not_change_cells():
    spec = GridSpec(
        Axis("tau", 0.02, 5.0, 12, "log"),
        Axis("alpha", 0.05, 1.0, 10, "log"),
        {"spectral": SpectralParams(alpha=0.1), "quadrature": QuadratureOptions()},
    )
    a = run_sweep(spec, zeno_ratio_kernel, workers=1)
    b = run_sweep(spec, zeno_ratio_kernel, workers=8)
    assert a.cells.tobytes() == b.cells.tobytes()


def test_process_backend_matches_threads():
    a = run_sweep(GridSpec(Axis("x", 0, 1, 5), Axis("y", 0, 1, 3)), add, workers=2, backend="process")
    b = run_sweep(GridSpec(Axis("x", 0, 1, 5), Axis("y", 0, 1, 3)), add, workers=2)
    assert np.array_equal(a.cells, b.cells)


def test_progress_lines():
    buf = io.StringIO()
    run_sweep(GridSpec(Axis("x", 0, 1, 10), Axis("y", 0, 1, 10)), add, progress=True, progress_stream=buf)
    lines = buf.getvalue().splitlines()
    assert lines[-1] == "sweep: 100/100 cells (100%)"
    assert len(lines) == 20


def test_sign_conversion():
    spec = GridSpec(Axis.from_values("x", [0, 1, 2]), Axis.from_values("y", [0.0]))
    h = HeatmapGrid(spec, np.array([[-0.3, 0.0, 0.2]]))
    assert to_sign_map(h, 1e-12).cells.tolist() == [[-1, 0, 1]]
    assert to_sign_map(h, 1.0).cells.tolist() == [[0, 0, 0]]


def test_sign_conversion_flags_nan():
    spec = GridSpec(Axis.from_values("x", [0, 1]), Axis.from_values("y", [0.0]))
    s = to_sign_map(HeatmapGrid(spec, np.array([[np.nan, 1.0]])), 0.0)
    assert s.cells.tolist() == [[0, 1]] and s.nan_mask.tolist() == [[True, False]]
    assert s.metadata["nan_cells"] == 1


def test_axis_validation():
    with pytest.raises(InvalidGrid):
        Axis("x", 0.0, 1.0, 5, "log")
    with pytest.raises(InvalidGrid):
        Axis("x", 1.0, 1.0, 5)
    with pytest.raises(InvalidGrid):
        run_sweep(unit_spec(), add, workers=0)


def test_log_axis_endpoints_exact():
    g = Axis("t", 0.02, 5.0, 50, "log").grid()
    assert g[0] == 0.02 and g[-1] == 5.0

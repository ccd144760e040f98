import json

import numpy as np
import pytest

from zenonm.cli import main
from zenonm.config import build_config, parse_overrides
from zenonm.errors import ConfigError
from zenonm.output import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decay_rate_zeno(capsys):
    code, out, _ = run(capsys, "decay-rate", "--tau", "0.1", "--spectral.alpha", "0.25")
    report = json.loads(out)
    assert code == 0 and report["class"] == "Zeno"
    assert set(report) >= {"gamma", "gamma0", "ratio", "class"}
    assert report["ratio"] == pytest.approx(report["gamma"] / report["gamma0"], rel=1e-12)


def test_decay_rate_anti_zeno(capsys):
    code, out, _ = run(capsys, "decay-rate", "--tau=3", "--spectral.alpha=0.1")
    assert code == 0 and json.loads(out)["class"] == "AntiZeno"


def test_missing_tau_exits_2(capsys):
    code, _, err = run(capsys, "decay-rate", "--spectral.alpha", "0.1")
    assert code == 2 and "tau" in err


def test_unknown_field_exits_2(capsys):
    code, _, err = run(capsys, "decay-rate", "--tau", "1", "--spectral.alpah", "0.1")
    assert code == 2 and "alpah" in err


def test_out_of_range_exits_2(capsys):
    code, _, err = run(capsys, "decay-rate", "--tau", "-1", "--spectral.alpha", "0.1")
    assert code == 2


def test_bad_config_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text("{not json")
    assert run(capsys, "zeno-map", "--config", str(bad))[0] == 2


def test_numerical_failure_exits_3(capsys):
    code, _, err = run(
        capsys, "decay-rate", "--tau", "1", "--spectral.alpha", "0.1",
        "--quadrature.max_subdivisions", "1", "--quadrature.rel_tol", "1e-15", "--quadrature.abs_tol", "1e-30",
    )
    assert code == 3 and "ToleranceNotMet" in err


def test_overrides_parse_json_literals():
    assert parse_overrides(["--a.b", "1", "--c=[1,2]", "--d", "text"]) == [("a.b", 1), ("c", [1, 2]), ("d", "text")]
    with pytest.raises(ConfigError):
        parse_overrides(["--dangling"])


def test_config_layering(tmp_path):
    doc = tmp_path / "c.json"
    doc.write_text(json.dumps({"spectral": {"alpha": 0.2}, "grid": {"x": {"count": 7}}}))
    cfg = build_config("nm-map", str(doc), [("spectral.coupling", 0.02)])
    assert cfg.spectral.alpha == 0.2 and cfg.spectral.coupling == 0.02
    assert cfg.grid.x.count == 7 and cfg.grid.x.min == 0.05 and cfg.grid.y.count == 40
    assert cfg.bell.a == pytest.approx(2**-0.5) and cfg.n_measurements == 20


def test_zeno_map_outputs_and_round_trip(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    args = ["--grid.x.count", "12", "--grid.y.count", "6", "--quiet"]
    code, _, _ = run(capsys, "zeno-map", "--out", str(out1), "--format", "csv", "--format", "json",
                     "--format", "ppm", "--format", "svg", *args)
    assert code == 0
    text = (out1 / "zeno_map_sign.csv").read_bytes()
    assert text.startswith(b"x,y,value\n") and b"\r" not in text
    rows = read_csv(out1 / "zeno_map_sign.csv")
    assert len(rows) == 72 and np.all(rows[rows[:, 0] <= 0.5, 2] == -1)
    # row-major over y then x
    assert rows[0, 1] == rows[11, 1] and rows[0, 0] < rows[1, 0]
    side = json.loads((out1 / "zeno_map.json").read_text())
    assert {"config", "positive_count", "code_version", "timings", "failed_cells"} <= set(side)
    ppm = (out1 / "zeno_map.ppm").read_bytes()
    assert ppm.startswith(b"P6\n96 48\n255\n") and len(ppm) == len(b"P6\n96 48\n255\n") + 96 * 48 * 3
    assert "<svg" in (out1 / "zeno_map.svg").read_text()
    code, _, _ = run(capsys, "zeno-map", "--config", str(out1 / "zeno_map.json"), "--out", str(out2), "--quiet")
    assert code == 0
    for name in ("zeno_map.csv", "zeno_map_sign.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_nm_map_partition_and_point(tmp_path, capsys):
    code, out, _ = run(capsys, "nm-map", "--partition", "qr", "--spectral.alpha", "0.1", "--grid.x.count", "5",
                       "--grid.y.count", "5", "--tau1", "0.5", "--tau2", "0.5", "--out", str(tmp_path), "--quiet")
    assert code == 0
    side = json.loads((tmp_path / "nm_map_qr.json").read_text())
    assert side["config"]["partition"] == "qr" and "point_delta" in side


def test_nm_map_needs_alpha(capsys, tmp_path):
    code, _, err = run(capsys, "nm-map", "--out", str(tmp_path))
    assert code == 2 and "spectral.alpha" in err


def test_rc_map_sidecar(tmp_path, capsys):
    code, _, _ = run(capsys, "rc-map", "--tau", "0.1", "--grid.x.count", "6", "--grid.y.count", "4",
                     "--out", str(tmp_path), "--format", "csv", "--format", "json", "--format", "ppm", "--quiet")
    assert code == 0
    side = json.loads((tmp_path / "rc_map.json").read_text())
    assert len(side["positive_counts_by_lambda_c"]) == 4
    assert (tmp_path / "rc_map.ppm").exists()


def test_failed_cells_exit_3(tmp_path, capsys):
    # tau below the degenerate-denominator threshold fails every cell
    code, _, _ = run(capsys, "rc-map", "--tau", "1e-14", "--grid.x.count", "2", "--grid.y.count", "2",
                     "--rc.lambda_c", "1", "--out", str(tmp_path), "--quiet")
    side = json.loads((tmp_path / "rc_map.json").read_text())
    assert code == 3 and len(side["failed_cells"]) == 4


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--seed", "3", "--n_samples", "20")
    assert code == 0 and "9/9 oracle checks passed" in out and "FAIL" not in out

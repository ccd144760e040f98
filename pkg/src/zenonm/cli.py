"""Command-line entry point: ``zenonm <command> [--config F] [--dotted.name VALUE ...]``.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 oracle-check failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .bipartite import BellState, MeasurementModel, PartitionKind, delta_map, delta_measure
from .config import COMMANDS, RunConfig, build_config, parse_overrides
from .errors import ConfigError, InvalidGrid, NumericalError
from .oracles import run_oracle_suite
from .output import write_csv, write_json, write_ppm, write_svg
from .rcsink import SIGN_ZERO_BAND as RC_BAND, RCParams, rc_map
from .spectral import (
    BOUNDARY_BAND,
    QuadratureOptions,
    SpectralParams,
    classify_zeno,
    effective_decay_rate,
    natural_decay_rate,
    zeno_ratio_map,
)
from .bipartite import SIGN_ZERO_BAND as NM_BAND
from .sweep import Axis, to_sign_map

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ORACLE = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="JSON config document or a previous run's sidecar")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", action="append", dest="formats", choices=["csv", "json", "ppm", "svg"])
    common.add_argument("--workers", type=int)
    common.add_argument("--partition", choices=["qq", "rr", "qr"])
    common.add_argument("--seed", type=int)
    common.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    p = argparse.ArgumentParser(
        prog="zenonm",
        allow_abbrev=False,
        description="Zeno/anti-Zeno decay maps and trace-distance non-Markovianity maps.",
        epilog="Any config field can be set with --<dotted.name> VALUE, e.g. --spectral.alpha 0.3.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], allow_abbrev=False)
    return p


def _quadrature(cfg: RunConfig) -> QuadratureOptions:
    return QuadratureOptions(**cfg.quadrature.model_dump())


def _spectral(cfg: RunConfig, alpha: Optional[float] = None) -> SpectralParams:
    d = cfg.spectral.model_dump()
    if alpha is not None:
        d["alpha"] = alpha
    return SpectralParams(**d)


def _axes(cfg: RunConfig):
    g = cfg.grid
    return (
        Axis(g.x.name, g.x.min, g.x.max, g.x.count, g.x.scale).grid(),
        Axis(g.y.name, g.y.min, g.y.max, g.y.count, g.y.scale).grid(),
    )


def cmd_decay_rate(cfg: RunConfig) -> dict:
    p = _spectral(cfg)
    q = _quadrature(cfg)
    cls = classify_zeno(cfg.tau, p, q)
    return {
        "tau": cfg.tau,
        "alpha": p.alpha,
        "coupling": p.coupling,
        "delta_omega": p.delta_omega,
        "gamma": effective_decay_rate(cfg.tau, p, q),
        "gamma0": natural_decay_rate(p),
        "ratio": cls.ratio,
        "class": cls.kind.value,
    }


def _run_map(cfg: RunConfig, progress: bool):
    """(stem, values grid, sign map, extra metadata) for a map command."""
    xs, ys = _axes(cfg)
    q = _quadrature(cfg)
    extra = {}
    if cfg.command == "zeno-map":
        h = zeno_ratio_map(xs, ys, _spectral(cfg, alpha=float(ys[0])), q, cfg.workers, progress)
        return "zeno_map", h, to_sign_map(h, BOUNDARY_BAND), extra
    if cfg.command == "nm-map":
        bell = BellState(cfg.bell.a, cfg.bell.b)
        m = MeasurementModel(_spectral(cfg), cfg.n_measurements)
        part = PartitionKind(cfg.partition)
        h = delta_map(xs, ys, part, bell, m, q, cfg.workers, progress)
        if cfg.tau1 is not None and cfg.tau2 is not None:
            extra["point_delta"] = delta_measure(cfg.tau1, cfg.tau2, part, bell, m, q)
        return f"nm_map_{part.value}", h, to_sign_map(h, NM_BAND), extra
    p = RCParams(cfg.rc.coupling, cfg.rc.lambda_c, BellState(cfg.bell.a, cfg.bell.b))
    h = rc_map(xs, ys, cfg.tau, p, cfg.workers, progress)
    extra["positive_counts_by_lambda_c"] = h.metadata["positive_counts"]
    return "rc_map", h, to_sign_map(h, RC_BAND), extra


def cmd_map(cfg: RunConfig, progress: bool = False) -> tuple:
    """Run a map command and write its outputs; returns (sidecar payload, exit code)."""
    start = time.perf_counter()
    stem, values, signs, extra = _run_map(cfg, progress)
    elapsed = time.perf_counter() - start
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written: List[str] = []
    if "csv" in cfg.formats:
        written.append(str(write_csv(out / f"{stem}.csv", values)))
        written.append(str(write_csv(out / f"{stem}_sign.csv", signs)))
    # sign maps are the primary picture for every command except rc-map
    image = values if cfg.command == "rc-map" else signs
    title = f"{cfg.command} ({values.spec.x.name} vs {values.spec.y.name})"
    if "ppm" in cfg.formats:
        written.append(str(write_ppm(out / f"{stem}.ppm", image)))
    if "svg" in cfg.formats:
        written.append(str(write_svg(out / f"{stem}.svg", image, title)))
    failed = [
        {"x_index": ix, "y_index": iy, "error": msg} for (ix, iy), msg in sorted(values.errors.items())
    ]
    payload = {
        "config": cfg.model_dump(mode="json"),
        "code_version": __version__,
        "positive_count": signs.positive_count,
        "negative_count": int((signs.cells < 0).sum()),
        "timings": {"sweep_seconds": elapsed},
        "failed_cells": failed,
        "outputs": written,
        **extra,
    }
    if "json" in cfg.formats:
        sidecar = out / f"{stem}.json"
        payload["outputs"].append(str(sidecar))
        write_json(sidecar, payload)
    return payload, EXIT_NUMERICAL if failed else EXIT_OK


def cmd_oracle_check(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    results = run_oracle_suite(seed=cfg.seed, n_samples=cfg.n_samples)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}", file=stream)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} oracle checks passed", file=stream)
    return EXIT_ORACLE if n_fail else EXIT_OK


def _overrides_from(ns: argparse.Namespace, extra: Sequence[str]) -> list:
    pairs = parse_overrides(extra)
    for key in ("out", "workers", "partition", "seed", "formats"):
        val = getattr(ns, key)
        if val is not None:
            pairs.append((key, val))
    return pairs


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        ns, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(ns.command, ns.config, _overrides_from(ns, extra))
        if ns.command == "decay-rate":
            print(json.dumps(cmd_decay_rate(cfg), indent=2))
            return EXIT_OK
        if ns.command == "oracle-check":
            return cmd_oracle_check(cfg)
        payload, code = cmd_map(cfg, progress=not ns.quiet)
        summary = {k: payload[k] for k in ("positive_count", "negative_count", "outputs")}
        summary["failed_cells"] = len(payload["failed_cells"])
        print(json.dumps(summary, indent=2))
        if code:
            print(f"error: {len(payload['failed_cells'])} cells failed; see sidecar", file=sys.stderr)
        return code
    except (ConfigError, InvalidGrid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

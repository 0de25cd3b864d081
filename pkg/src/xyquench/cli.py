"""Command-line front end.

Subcommands: point, profile, grid, scan, validate.  Output is CSV or JSON
lines, every float written with 17 significant digits.  Exit codes: 0 on
success, 1 on configuration errors, 2 when some points failed (the output
is still written, plus an ``<out>.errors.jsonl`` sidecar).

Ranges are ``min:max:N``.  An integer N is a point count (``0:3:301``); a
decimal N is a step (``0.25:5:0.25``).

Quadrature is tuned for t <= ~20; beyond that the Brillouin-zone integrands
oscillate too fast for the default subdivision budget.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .correlators import QuadratureSpec
from .errors import XYQuenchError

log = logging.getLogger("xyquench")

WORKERS_ENV = "XYQUENCH_WORKERS"
POINT_COLUMNS = ["a_tilde", "t_tilde", "gamma", "ln", "discord", "deficit", "mi", "error"]
SCAN_COLUMNS = [
    "t_tilde", "a_c", "slope", "revived", "max_ln_after_collapse", "a_revival_peak",
    "a_revival_onset", "predicate_holds", "exceptional_near_qpt", "error",
]
COMMANDS = ("point", "profile", "grid", "scan", "validate")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    gamma: float = 0.5
    a: float | None = None
    t: float | None = None
    a_range: np.ndarray | None = None
    t_range: np.ndarray | None = None
    measures: tuple[str, ...] = ("ln", "discord")
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: Path | None = None
    fmt: str = "csv"
    workers: int = 1
    seedless: bool = True


def parse_range(text: str) -> np.ndarray:
    """``min:max:count`` (integer) or ``min:max:step`` (decimal), endpoints inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} must look like min:max:count_or_step")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"bad range bounds in {text!r}") from None
    last = parts[2].strip()
    if hi < lo:
        raise ConfigError(f"range {text!r} has max < min")
    if last.lstrip("+").isdigit():
        count = int(last)
        if count < 1:
            raise ConfigError(f"range {text!r} needs a positive count")
        return np.linspace(lo, hi, count)
    try:
        step = float(last)
    except ValueError:
        raise ConfigError(f"bad range step in {text!r}") from None
    if step <= 0:
        raise ConfigError(f"range {text!r} needs a positive step")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def parse_measures(text: str) -> tuple[str, ...]:
    ms = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in ms if m not in analysis.MEASURES]
    if bad or not ms:
        raise ConfigError(f"measures must be a subset of {','.join(analysis.MEASURES)}, got {text!r}")
    return ms


def read_config_file(path: str) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="xyquench",
        description="Quantum correlations of two neighbouring spins in a quenched XY chain.",
        epilog="Range syntax: min:max:N, integer N = point count, decimal N = step. "
               "Quadrature defaults are reliable for t <= ~20.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--gamma", type=float, help="anisotropy in (0, 1] (default 0.5)")
    p.add_argument("--a", help="initial field (point/validate) or field range (profile/grid)")
    p.add_argument("--t", help="time (point/validate/profile) or time range (grid/scan)")
    p.add_argument("--measures", help="comma list from ln,discord,deficit,mi (default ln,discord)")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format")
    p.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--base-order", type=int)
    p.add_argument("--max-subdivisions", type=int)
    p.add_argument("--config", help="key=value file; explicit flags take precedence")
    p.add_argument("--seedless", action="store_true", default=None,
                   help="deterministic mode (always on; nothing is randomised)")
    return p


def _merge(ns: argparse.Namespace) -> dict:
    merged = {}
    if ns.config:
        merged.update(read_config_file(ns.config))
    for k, v in vars(ns).items():
        if v is not None and k != "config":
            merged[k] = v
    return merged


def make_config(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    m = _merge(ns)
    cmd = m["command"]
    try:
        gamma = float(m.get("gamma", 0.5))
        quad = QuadratureSpec(
            abs_tol=float(m.get("abs_tol", 1e-10)),
            rel_tol=float(m.get("rel_tol", 1e-10)),
            base_order=int(m.get("base_order", 64)),
            max_subdivisions=int(m.get("max_subdivisions", 512)),
        )
        workers = int(m.get("workers", os.environ.get(WORKERS_ENV, 1)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not 0 < gamma <= 1:
        raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    fmt = m.get("fmt", m.get("format", "json" if cmd in ("point", "validate") else "csv"))
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    cfg = RunConfig(
        command=cmd,
        gamma=gamma,
        measures=parse_measures(str(m.get("measures", "ln,discord"))),
        quadrature=quad,
        output=Path(m["out"]) if m.get("out") else None,
        fmt=fmt,
        workers=workers,
    )

    def need(key):
        if key not in m:
            raise ConfigError(f"{cmd} requires --{key}")
        return str(m[key])

    def scalar(key):
        try:
            return float(need(key))
        except ValueError:
            raise ConfigError(f"--{key} must be a number for {cmd}") from None

    if cmd in ("point", "validate"):
        cfg.a, cfg.t = scalar("a"), scalar("t")
    elif cmd == "profile":
        cfg.t, cfg.a_range = scalar("t"), parse_range(need("a"))
    elif cmd == "grid":
        cfg.a_range, cfg.t_range = parse_range(need("a")), parse_range(need("t"))
    elif cmd == "scan":
        cfg.t_range = parse_range(need("t"))
    if cfg.t is not None and cfg.t < 0 or cfg.t_range is not None and cfg.t_range.min() < 0:
        raise ConfigError("times must be >= 0")
    if cfg.output is not None and not cfg.output.parent.exists():
        raise ConfigError(f"output directory {cfg.output.parent} does not exist")
    return cfg


def fmt_value(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        # round-trips through float("%.17g") exactly
        return float("%.17g" % v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def point_row(p: analysis.FieldProfilePoint) -> dict:
    return {
        "a_tilde": p.a_tilde, "t_tilde": p.t_tilde, "gamma": p.gamma, "ln": p.ln,
        "discord": p.discord, "deficit": p.deficit, "mi": p.mutual_info, "error": p.error,
    }


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt_value(r.get(c)) for c in columns])
    else:
        for r in rows:
            buf.write(json.dumps({c: _json_value(r.get(c)) for c in columns}) + "\n")
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str, errors: list[dict]) -> int:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text)
    if errors:
        side = (cfg.output.with_name(cfg.output.name + ".errors.jsonl") if cfg.output
                else None)
        lines = "".join(json.dumps({k: _json_value(v) for k, v in e.items()}) + "\n" for e in errors)
        if side is not None:
            side.write_text(lines)
        else:
            sys.stderr.write(lines)
        log.error("%d point(s) failed", len(errors))
        return 2
    return 0


def run(cfg: RunConfig) -> int:
    spec = cfg.quadrature
    if cfg.command == "validate":
        try:
            d = analysis.state_diagnostics(cfg.a, cfg.t, cfg.gamma, spec)
        except XYQuenchError as exc:
            return _emit(cfg, "", [{"a_tilde": cfg.a, "t_tilde": cfg.t, "error": str(exc)}])
        row = {"a_tilde": cfg.a, "t_tilde": cfg.t, "gamma": cfg.gamma, **asdict(d)}
        return _emit(cfg, render([row], list(row), cfg.fmt), [])

    if cfg.command == "scan":
        log.info("scanning %d times", len(cfg.t_range))
        recs = analysis.derivative_scan(cfg.t_range, cfg.gamma, spec, workers=cfg.workers)
        rows = [r.as_dict() for r in recs]
        errors = [r for r in rows if r["error"]]
        return _emit(cfg, render(rows, SCAN_COLUMNS, cfg.fmt), errors)

    if cfg.command == "point":
        pts = [analysis.evaluate_point(cfg.a, cfg.t, cfg.gamma, cfg.measures, spec)]
    elif cfg.command == "profile":
        log.info("profile: %d fields at t=%g", len(cfg.a_range), cfg.t)
        pts = analysis.field_profile(cfg.t, cfg.gamma, cfg.a_range, cfg.measures, spec, cfg.workers)
    else:
        grid_pts = len(cfg.a_range) * len(cfg.t_range)
        log.info("grid: %d points on %d worker(s)", grid_pts, cfg.workers)
        pts = analysis.sweep(cfg.a_range, cfg.t_range, cfg.gamma, cfg.measures, spec, cfg.workers)
    rows = [point_row(p) for p in pts]
    errors = [r for r in rows if r["error"]]
    return _emit(cfg, render(rows, POINT_COLUMNS, cfg.fmt), errors)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"xyquench: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse usage errors
        return 1 if exc.code else 0
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

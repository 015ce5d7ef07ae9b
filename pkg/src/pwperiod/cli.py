"""Command line interface.

    pwperiod {classify,table,expand,diverge,simulate,verdict} --config run.json

All analysis parameters live in the JSON config; the flags only override the
output location, format and expansion order. Every artifact carries the
SHA-256 of the effective config and the tool version.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AnalysisError, ConfigInvalid
from .expansion import coupled_expansion
from .potential import PiecewiseSystem, Side, classify_system
from .quadrature import DEFAULT_RHO_GRID, QUAD_ABS_TOL, default_h_max, divergence_probe, period_table
from .series import DEFAULT_ORDER
from .simulate import SimOptions, integrate_return
from .verdict import verdict

SUBCOMMANDS = ("classify", "table", "expand", "diverge", "simulate", "verdict")

DEFAULT_TOLERANCES = {"quadrature_abs": QUAD_ABS_TOL, "ode_rel": 1e-10, "ode_abs": 1e-12, "event": 1e-13}


@dataclass
class AnalysisConfig:
    system: PiecewiseSystem
    raw: dict
    order: int = DEFAULT_ORDER
    energies: dict | None = None
    rho_grid: tuple[float, ...] | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_format: str | None = None
    output_path: str | None = None
    start: float | tuple[float, float] | None = None
    workers: int = 1

    @property
    def sha256(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def energy_grid(self) -> list[float]:
        e = dict(self.energies or {})
        lo = e.get("min", 1e-4)
        hi = e.get("max")
        if hi is None:
            hi = min(0.5, default_h_max(self.system))
        count, scale = e.get("count", 20), e.get("scale", "log")
        if hi <= lo:
            raise ConfigInvalid("energies.max must exceed energies.min", "energies.max")
        if scale == "log":
            return [float(x) for x in np.geomspace(lo, hi, count)]
        return [float(x) for x in np.linspace(lo, hi, count)]


def _positive(value, name: str, integer: bool = False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok or not math.isfinite(value) or value <= 0:
        raise ConfigInvalid("%s must be a positive %s" % (name, "integer" if integer else "number"), name)
    return value


def parse_config(data) -> AnalysisConfig:
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    if "system" not in data:
        raise ConfigInvalid("config is missing 'system'", "system")
    try:
        system = PiecewiseSystem.from_json(data["system"])
    except ConfigInvalid as exc:
        name = exc.field if exc.field == "system" else "system.%s" % exc.field if exc.field else "system"
        raise ConfigInvalid(str(exc), name) from exc
    cfg = AnalysisConfig(system, data)
    cfg.order = _positive(data.get("order", DEFAULT_ORDER), "order", integer=True)

    if "energies" in data:
        e = data["energies"]
        if not isinstance(e, dict):
            raise ConfigInvalid("energies must be an object", "energies")
        for key in ("min", "max"):
            if key in e:
                _positive(e[key], "energies.%s" % key)
        count = e.get("count", 20)
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ConfigInvalid("energies.count must be an integer >= 2", "energies.count")
        if e.get("scale", "log") not in ("log", "linear"):
            raise ConfigInvalid("energies.scale must be 'log' or 'linear'", "energies.scale")
        cfg.energies = e

    if "rho_grid" in data:
        grid = data["rho_grid"]
        if not isinstance(grid, list) or len(grid) < 2:
            raise ConfigInvalid("rho_grid must be a list of at least two values", "rho_grid")
        cfg.rho_grid = tuple(float(_positive(r, "rho_grid")) for r in grid)

    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigInvalid("tolerances must be an object", "tolerances")
    for key, value in tol.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigInvalid("unknown tolerance %r" % key, "tolerances.%s" % key)
        cfg.tolerances[key] = float(_positive(value, "tolerances.%s" % key))

    out = data.get("output", {})
    if not isinstance(out, dict):
        raise ConfigInvalid("output must be an object", "output")
    if out.get("format") not in (None, "csv", "json"):
        raise ConfigInvalid("output.format must be 'csv' or 'json'", "output.format")
    cfg.output_format = out.get("format")
    cfg.output_path = out.get("path")

    if "start" in data:
        s = data["start"]
        if isinstance(s, list) and len(s) == 2 and all(isinstance(v, (int, float)) for v in s):
            cfg.start = (float(s[0]), float(s[1]))
        elif isinstance(s, (int, float)) and not isinstance(s, bool) and s != 0:
            cfg.start = float(s)
        else:
            raise ConfigInvalid("start must be a nonzero number or an [x, y] point", "start")
    cfg.workers = _positive(data.get("workers", 1), "workers", integer=True)
    return cfg


def load_config(path: str) -> AnalysisConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid("cannot read config: %s" % exc, "config") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("config is not valid JSON: %s" % exc, "config") from exc
    return parse_config(data)


# -- subcommands ----------------------------------------------------------------


def _provenance(cfg: AnalysisConfig, sub: str) -> dict:
    return {"tool": "pwperiod", "tool_version": __version__, "config_sha256": cfg.sha256, "subcommand": sub}


def run(cfg: AnalysisConfig, sub: str, fmt: str) -> str:
    """Run one subcommand and return the artifact text."""
    sys_ = cfg.system
    if sub == "classify":
        body = classify_system(sys_).to_json()
    elif sub == "table":
        table = period_table(sys_, cfg.energy_grid(), cfg.tolerances["quadrature_abs"], cfg.workers)
        if fmt == "csv":
            return table.to_csv()
        body = table.to_json()
    elif sub == "expand":
        body = coupled_expansion(sys_, cfg.order).to_json()
    elif sub == "diverge":
        case = classify_system(sys_)
        V = case.flat_potential if case.flat_potential is not None else sys_.v_minus
        body = divergence_probe(V, Side.LEFT, cfg.rho_grid or DEFAULT_RHO_GRID).to_json()
        body["case"] = case.case
    elif sub == "simulate":
        opts = SimOptions(rtol=cfg.tolerances["ode_rel"], atol=cfg.tolerances["ode_abs"],
                          event_tol=cfg.tolerances["event"])
        orbit = integrate_return(sys_, cfg.start if cfg.start is not None else 0.1, opts)
        if fmt == "csv":
            return orbit.trajectory_csv()
        body = orbit.summary()
        body["hamiltonian_drift"] = format(orbit.hamiltonian_drift(), ".17g")
    elif sub == "verdict":
        body = verdict(sys_, cfg.order, cfg.rho_grid).to_json()
    else:  # argparse restricts the choices
        raise ConfigInvalid("unknown subcommand %r" % sub, "subcommand")
    body.update(_provenance(cfg, sub))
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pwperiod", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version="pwperiod " + __version__)
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="JSON analysis config")
    p.add_argument("--out", help="write the artifact here instead of stdout")
    p.add_argument("--order", type=int, help="override the expansion order")
    p.add_argument("--format", choices=("csv", "json"), help="artifact format (table, simulate)")
    return p


def _fail(exc, code: int) -> int:
    sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.order is not None:
            if args.order < 1:
                raise ConfigInvalid("--order must be positive", "order")
            cfg.order = args.order
            cfg.raw = dict(cfg.raw, order=args.order)
        fmt = args.format or cfg.output_format
        if fmt is None:
            fmt = "csv" if args.subcommand == "table" else "json"
        if fmt == "csv" and args.subcommand not in ("table", "simulate"):
            raise ConfigInvalid("csv output is only available for 'table' and 'simulate'", "output.format")
        text = run(cfg, args.subcommand, fmt)
    except ConfigInvalid as exc:
        return _fail(exc, 2)
    except AnalysisError as exc:
        return _fail(exc, 3)
    except ValueError as exc:
        return _fail(ConfigInvalid(str(exc)), 2)

    out = args.out or cfg.output_path
    if out is None:
        sys.stdout.write(text)
        return 0
    Path(out).write_text(text)
    if fmt == "csv":
        # CSV has no room for provenance: keep it next to the table
        meta = dict(_provenance(cfg, args.subcommand), artifact=Path(out).name)
        Path(str(out) + ".meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

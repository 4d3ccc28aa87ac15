"""Batch driver: YAML config in, one CSV/JSON row per sweep value out.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import dispersion as disp
from .engine import (
    Method,
    PressureResult,
    QuadratureSpec,
    pressure_high_temperature,
    pressure_matsubara,
    pressure_zero_temperature,
)
from .errors import CasimirError
from .materials import DielectricModel, FreeElectronTerm, OscillatorTerm, SheetModel
from .modesum import ModeSumSpec, pressure_radiated, pressure_with_evanescent

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "CASIMIR_THREADS"
HEADER = ("d_nm", "t_nm", "T_K", "P_total", "P_e", "P_h", "rel_err", "method", "wall_seconds")
PRESETS = ("casimir", "halfspaces", "finite_plates", "gap_medium", "graphene", "modesum", "stack")
METHODS = tuple(m.value for m in Method if m is not Method.REFLECTION_T0)
SHEET_METHODS = (Method.MODESUM_RADIATED.value, Method.MODESUM_TOTAL.value)
QUAD_KEYS = ("n_theta", "n_chi", "n_subdomains", "theta0", "order")


class ConfigError(CasimirError):
    """Invalid run configuration; the message carries the field path."""


def _req(mapping, key, path):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"{path}.{key}: required field missing")
    return mapping[key]


def _yaml_float(value):
    # YAML 1.1 reads exponents without a sign (1.0e12) as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def _num(value, path, positive=False, nonneg=False):
    value = _yaml_float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or (positive and value <= 0) or (nonneg and value < 0):
        raise ConfigError(f"{path}: value {value} out of range")
    return value


def _material(spec: dict, path: str):
    kind = _req(spec, "kind", path)
    try:
        if kind == "vacuum":
            return DielectricModel.vacuum()
        if kind == "static":
            return DielectricModel.static(_num(_req(spec, "eps0", path), f"{path}.eps0"))
        if kind in ("lorentz", "clausius_mossotti"):
            terms = [
                OscillatorTerm(**{k: _num(v, f"{path}.terms[{i}].{k}") for k, v in t.items()})
                for i, t in enumerate(spec.get("terms", []))
            ]
            free = spec.get("free")
            free = FreeElectronTerm(**{k: _num(v, f"{path}.free.{k}") for k, v in free.items()}) if free else None
            build = DielectricModel.lorentz if kind == "lorentz" else DielectricModel.clausius_mossotti
            return build(terms, free)
        if kind == "sheet":
            args = {k: _num(_yaml_float(v), f"{path}.{k}") for k, v in spec.items() if k != "kind"}
            if "nu" in args:
                if args["nu"] != int(args["nu"]):
                    raise ConfigError(f"{path}.nu: expected an integer")
                args["nu"] = int(args["nu"])
            return SheetModel(**args)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except CasimirError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raise ConfigError(f"{path}.kind: unknown material kind {kind!r}")


def _sweep_values(sweep: dict) -> list[float]:
    axis = _req(sweep, "axis", "sweep")
    if axis not in ("d", "t", "T"):
        raise ConfigError(f"sweep.axis: must be one of d, t, T (got {axis!r})")
    if "values" in sweep:
        raw = sweep["values"]
        if not isinstance(raw, list):
            raise ConfigError("sweep.values: expected a list")
        values = [_num(v, f"sweep.values[{i}]", positive=True) for i, v in enumerate(raw)]
    elif "log" in sweep:
        lg = sweep["log"]
        start = _num(_req(lg, "start", "sweep.log"), "sweep.log.start", positive=True)
        stop = _num(_req(lg, "stop", "sweep.log"), "sweep.log.stop", positive=True)
        num = _req(lg, "num", "sweep.log")
        if not isinstance(num, int) or num < 1:
            raise ConfigError("sweep.log.num: expected a positive integer")
        values = [float(f"{v:.12g}") for v in np.geomspace(start, stop, num)]
    else:
        raise ConfigError("sweep: give either values or log")
    if not values:
        raise ConfigError("sweep.values: empty sweep")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep.values: must be strictly increasing")
    return values


@dataclass
class RunConfig:
    """Validated run description; ``raw`` keeps the parsed mapping for round trips."""

    raw: dict
    materials: dict[str, Any]
    structure: dict
    method: str
    temperature: float
    axis: str
    values: list[float]
    quadrature: QuadratureSpec
    output_path: str | None = None
    output_format: str = "csv"
    timing: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>: expected a mapping")
        mats = raw.get("materials", {}) or {}
        if not isinstance(mats, dict):
            raise ConfigError("materials: expected a mapping")
        materials = {name: _material(spec, f"materials.{name}") for name, spec in mats.items()}
        structure = _req(raw, "structure", "<root>")
        preset = _req(structure, "preset", "structure")
        if preset not in PRESETS:
            raise ConfigError(f"structure.preset: unknown preset {preset!r}")
        method = raw.get("method", "vankampen_t0")
        if method not in METHODS:
            raise ConfigError(f"method: unknown method {method!r}")
        T = _num(raw.get("temperature", 0.0), "temperature", nonneg=True)
        sweep = _req(raw, "sweep", "<root>")
        values = _sweep_values(sweep)
        quad_raw = raw.get("quadrature", {}) or {}
        for key in quad_raw:
            if key not in QUAD_KEYS:
                raise ConfigError(f"quadrature.{key}: unknown field")
        try:
            quad = QuadratureSpec(**{k: (float(v) if k == "theta0" else int(v)) for k, v in quad_raw.items()})
        except (CasimirError, ValueError, TypeError) as exc:
            raise ConfigError(f"quadrature: {exc}") from None
        out = raw.get("output", {}) or {}
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output.format: must be csv or json (got {fmt!r})")
        cfg = cls(raw, materials, structure, method, T, sweep["axis"], values, quad, out.get("path"), fmt, bool(out.get("timing", False)))
        cfg._check_structure()
        return cfg

    def to_dict(self) -> dict:
        return json.loads(json.dumps(self.raw))

    def _lookup(self, key, kinds, required=True):
        name = self.structure.get(key)
        if name is None:
            if required:
                raise ConfigError(f"structure.{key}: required for preset {self.structure['preset']!r}")
            return None
        if name not in self.materials:
            raise ConfigError(f"structure.{key}: no material named {name!r}")
        mat = self.materials[name]
        if not isinstance(mat, kinds):
            raise ConfigError(f"structure.{key}: material {name!r} has the wrong kind")
        return mat

    def _check_structure(self):
        preset = self.structure["preset"]
        for key in ("d", "t"):
            if self.structure.get(key) is not None:
                self.structure[key] = _num(self.structure[key], f"structure.{key}", positive=(key == "d"), nonneg=True)
        geom = {"d": self.structure.get("d"), "t": self.structure.get("t"), "T": self.temperature}
        if self.axis != "d" and geom["d"] is None:
            raise ConfigError("structure.d: required unless sweeping d")
        if preset in ("finite_plates", "gap_medium") and self.axis != "t" and geom["t"] is None:
            raise ConfigError("structure.t: required for plate presets unless sweeping t")
        if preset in ("halfspaces", "finite_plates", "gap_medium"):
            self._lookup("material", DielectricModel)
        if preset == "gap_medium":
            self._lookup("gap_material", DielectricModel)
        if preset in ("graphene", "modesum"):
            self._lookup("sheet", SheetModel)
        if preset == "stack":
            self._stack_layers(1.0)
        if self.method in SHEET_METHODS and preset not in ("graphene", "modesum"):
            raise ConfigError(f"method: {self.method} needs a graphene or modesum preset")
        if self.method in ("matsubara", "high_t") and self.axis != "T" and self.temperature <= 0:
            raise ConfigError("temperature: must be > 0 for finite-temperature methods")

    def _stack_layers(self, d):
        st = _req(self.structure, "stack", "structure")
        sides = {}
        for side in ("left", "right"):
            layers = []
            for i, lay in enumerate(st.get(side, []) or []):
                path = f"structure.stack.{side}[{i}]"
                model = self.materials.get(_req(lay, "material", path))
                if not isinstance(model, DielectricModel):
                    raise ConfigError(f"{path}.material: unknown dielectric {lay['material']!r}")
                sheet = None
                if lay.get("sheet") is not None:
                    sheet = self.materials.get(lay["sheet"])
                    if not isinstance(sheet, SheetModel):
                        raise ConfigError(f"{path}.sheet: unknown sheet {lay['sheet']!r}")
                thick = lay.get("thickness")
                thick = None if thick is None else _num(thick, f"{path}.thickness", nonneg=True)
                layers.append(disp.Layer(model, thick, sheet))
            sides[side] = tuple(layers)
        gap = self.materials.get(st.get("gap")) if st.get("gap") else disp.VACUUM
        try:
            return disp.StackSpec(d, gap, sides["left"], sides["right"])
        except CasimirError as exc:
            raise ConfigError(f"structure.stack: {exc}") from None


@dataclass
class OutputRow:
    d_nm: float
    t_nm: float
    T_K: float
    P_total: float
    P_e: float
    P_h: float
    rel_err: float
    method: str
    wall_seconds: float
    error: str | None = field(default=None, compare=False)

    @property
    def failed(self) -> bool:
        return self.error is not None


def _pair_for(cfg: RunConfig, d: float, t: float | None, T: float):
    preset = cfg.structure["preset"]
    if preset == "casimir":
        return disp.pair_casimir(d)
    if preset == "halfspaces":
        return disp.pair_halfspaces(cfg._lookup("material", DielectricModel), d)
    if preset == "finite_plates":
        return disp.pair_finite_plates(cfg._lookup("material", DielectricModel), t, d)
    if preset == "gap_medium":
        return disp.pair_gap_medium(
            cfg._lookup("material", DielectricModel), cfg._lookup("gap_material", DielectricModel), t, d
        )
    if preset in ("graphene", "modesum"):
        return disp.pair_graphene_sheets(_sheet_at(cfg, T), d)
    return disp.pair_from_stack(cfg._stack_layers(d))


def _sheet_at(cfg: RunConfig, T: float) -> SheetModel:
    sheet = cfg._lookup("sheet", SheetModel)
    if T == sheet.T:
        return sheet
    return SheetModel(sheet.mu_c, sheet.omega_c0, sheet.k_p, sheet.nu, T)


def _compute(cfg: RunConfig, d: float, t: float | None, T: float) -> PressureResult:
    method = cfg.method
    if method in SHEET_METHODS:
        spec = ModeSumSpec(_sheet_at(cfg, T), d, T, cfg.quadrature)
        if method == Method.MODESUM_RADIATED.value:
            return pressure_radiated(spec)
        return pressure_with_evanescent(spec).as_pressure()
    pair = _pair_for(cfg, d, t, T)
    if method == Method.MATSUBARA.value:
        return pressure_matsubara(pair, d, T, cfg.quadrature)
    if method == Method.HIGH_T.value:
        return pressure_high_temperature(pair, d, T, cfg.quadrature)
    return pressure_zero_temperature(pair, d, cfg.quadrature)


def _row(cfg: RunConfig, value: float) -> OutputRow:
    geom = {"d": cfg.structure.get("d"), "t": cfg.structure.get("t"), "T": cfg.temperature}
    geom[cfg.axis] = value
    d, t, T = float(geom["d"]), geom["t"], float(geom["T"])
    t_out = float(t) if t is not None else math.nan
    start = time.perf_counter()
    try:
        res = _compute(cfg, d, None if t is None else float(t), T)
    except CasimirError as exc:
        return OutputRow(d, t_out, T, math.nan, math.nan, math.nan, math.nan, cfg.method, 0.0, str(exc))
    wall = time.perf_counter() - start if cfg.timing else 0.0
    P = res.P
    rel = res.err_estimate / abs(P) if P != 0 else 0.0
    return OutputRow(d, t_out, T, P, res.P_e, res.P_h, rel, cfg.method, wall)


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}: expected an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(cfg: RunConfig, threads: int | None = None) -> list[OutputRow]:
    """One row per sweep value, in sweep order whatever the completion order."""
    threads = threads or default_threads()
    if threads == 1:
        return [_row(cfg, v) for v in cfg.values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: _row(cfg, v), cfg.values))


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.8e}"


def _canonical(x: float):
    return None if math.isnan(x) else float(_fmt(x))


def render(rows: list[OutputRow], fmt: str) -> str:
    if not rows:
        raise ConfigError("nothing to emit: no rows")
    if fmt == "csv":
        lines = [",".join(HEADER)]
        for r in rows:
            vals = asdict(r)
            lines.append(",".join(vals[h] if h == "method" else _fmt(vals[h]) for h in HEADER))
        return "\n".join(lines) + "\n"
    objs = []
    for r in rows:
        vals = asdict(r)
        objs.append({h: (vals[h] if h == "method" else _canonical(vals[h])) for h in HEADER})
    return json.dumps(objs, indent=2) + "\n"


def emit(rows: list[OutputRow], fmt: str, path: str | None) -> None:
    text = render(rows, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def parse_rows(text: str, fmt: str) -> list[dict]:
    """Read emitted output back into dicts of floats (method kept as str)."""
    if fmt == "json":
        return [{k: (math.nan if v is None else v) for k, v in o.items()} for o in json.loads(text)]
    lines = text.strip("\n").split("\n")
    head = lines[0].split(",")
    return [{h: (v if h == "method" else float(v)) for h, v in zip(head, ln.split(","))} for ln in lines[1:]]


def load_config(source: str) -> RunConfig:
    """Load a YAML file, or a shipped preset given as ``preset:<name>``."""
    if source.startswith("preset:"):
        name = source.split(":", 1)[1]
        try:
            text = resources.files("casimir_layers.presets").joinpath(f"{name}.yaml").read_text()
        except FileNotFoundError:
            raise ConfigError(f"--config: no shipped preset named {name!r}") from None
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"<root>: YAML parse error: {exc}") from None
    return RunConfig.from_dict(raw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="casimir-layers", description="Casimir-Lifshitz pressure sweeps.")
    p.add_argument("--config", required=True, help="YAML config path, or preset:<name> for a shipped preset")
    p.add_argument("--out", help="output file (default: config output.path, else stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--method", choices=METHODS, help="override the configured method")
    p.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or CPU count)")
    p.add_argument("--timing", action="store_true", help="record wall_seconds (output is then not byte-stable)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.method:
            raw = dict(cfg.raw, method=args.method)
            cfg = RunConfig.from_dict(raw)
        if args.timing:
            cfg.timing = True
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads: must be >= 1")
        threads = args.threads or default_threads()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    rows = run_sweep(cfg, threads)
    try:
        emit(rows, args.format or cfg.output_format, args.out or cfg.output_path)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"numerical failure at {cfg.axis}={getattr(r, cfg.axis + ('_nm' if cfg.axis in 'dt' else '_K'))}: {r.error}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

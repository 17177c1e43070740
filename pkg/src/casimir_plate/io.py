"""Config parsing and deterministic result emission (CSV / JSON)."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .atoms import DEFAULT_POLE_GUARD, AtomSpec, StaticAtom
from .errors import CasimirPlateError, InvalidConfig, InvalidGrid
from .geometry import PlateGeometry
from .quadrature import QuadratureConfig

CONFIG_DIR_ENV = "CASIMIR_PLATE_CONFIG_DIR"
SCHEMA_VERSION = 1


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("casimir_plate").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(data, name: str, source: str = "<data>") -> None:
    try:
        jsonschema.validate(data, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidConfig(f"{source}: {where}: {exc.message}") from None


def resolve_path(path, base_dir: Optional[Path] = None) -> Path:
    """Locate a referenced file: as given, next to the referencing file, then
    in the directory named by $CASIMIR_PLATE_CONFIG_DIR."""
    p = Path(path)
    candidates = [p]
    if not p.is_absolute():
        if base_dir is not None:
            candidates.append(Path(base_dir) / p)
        env = os.environ.get(CONFIG_DIR_ENV)
        if env:
            candidates.append(Path(env) / p)
    for c in candidates:
        if c.is_file():
            return c
    raise InvalidConfig(f"file not found: {path}")


def read_json(path):
    path = resolve_path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_point(text: str) -> tuple[float, float, float]:
    """'x,y,z' -> (x, y, z)."""
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise InvalidConfig(f"cannot parse point {text!r}; expected x,y,z") from None
    if len(parts) != 3:
        raise InvalidConfig(f"point {text!r} needs exactly three components")
    return tuple(parts)


def parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InvalidConfig(f"cannot parse number list {text!r}") from None


def expand_axis(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(v) for v in spec]
    num = int(spec["num"])
    if spec.get("spacing", "linear") == "log":
        if spec["start"] <= 0 or spec["stop"] <= 0:
            raise InvalidGrid("log-spaced axis needs positive start and stop")
        return [float(v) for v in np.geomspace(spec["start"], spec["stop"], num)]
    return [float(v) for v in np.linspace(spec["start"], spec["stop"], num)]


@dataclass
class ScanConfig:
    geometries: list = field(default_factory=list)
    atom_a: object = field(default_factory=StaticAtom)
    atom_b: object = field(default_factory=StaticAtom)
    methods: tuple[str, ...] = ("far",)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    k: tuple[float, ...] = ()
    axes: Optional[dict] = None
    static: bool = False
    output: Optional[str] = None
    format: str = "csv"


def geometry_or_error(r_a, r_b):
    try:
        return PlateGeometry(r_a, r_b)
    except CasimirPlateError as exc:
        return exc


def load_grid(path, pole_guard: float = DEFAULT_POLE_GUARD) -> ScanConfig:
    """Parse a grid file into a ScanConfig.

    Axis grids expand in lexicographic (z_a, z_b, rho) order, atom A on the
    z axis and atom B displaced along x; explicit ``points`` follow. Invalid
    geometries are kept as exception objects so reports can flag them.
    """
    path = resolve_path(path)
    data = read_json(path)
    validate(data, "grid", source=str(path))
    base = path.parent
    cfg = ScanConfig()
    axes_given = [name for name in ("z_a", "z_b", "rho") if name in data]
    if axes_given and len(axes_given) != 3:
        raise InvalidGrid(f"{path}: z_a, z_b and rho must be given together")
    if axes_given:
        cfg.axes = {name: expand_axis(data[name]) for name in ("z_a", "z_b", "rho")}
        for za, zb, rho in itertools.product(cfg.axes["z_a"], cfg.axes["z_b"], cfg.axes["rho"]):
            cfg.geometries.append(geometry_or_error((0.0, 0.0, za), (rho, 0.0, zb)))
    for pt in data.get("points", []):
        cfg.geometries.append(geometry_or_error(pt["atom_a"], pt["atom_b"]))
    if "k" in data:
        cfg.k = tuple(expand_axis(data["k"]))
    for side in ("a", "b"):
        key = f"atoms_{side}"
        if key in data:
            atom_path = resolve_path(data[key], base)
            atom_data = read_json(atom_path)
            validate(atom_data, "atom", source=str(atom_path))
            setattr(cfg, f"atom_{side}", AtomSpec.from_dict(atom_data, pole_guard=pole_guard))
    if "methods" in data:
        cfg.methods = tuple(data["methods"])
    if "quadrature" in data:
        try:
            cfg.quad = QuadratureConfig().with_overrides(**data["quadrature"])
        except TypeError as exc:
            raise InvalidConfig(f"{path}: quadrature: {exc}") from None
    cfg.static = bool(data.get("static", False))
    cfg.output = data.get("output")
    cfg.format = data.get("format", "csv")
    return cfg


# --------------------------------------------------------------------------
# emission


def format_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def render_table(rows: list[dict], columns: list[str], fmt: str, kind: str, metadata: Optional[dict] = None) -> str:
    """Serialize rows deterministically; missing cells are empty / null."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "columns": list(columns),
            "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
        }
        if metadata:
            doc["metadata"] = metadata
        validate(doc, "result", source="result")
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    raise InvalidConfig(f"unknown output format {fmt!r}")


def write_table(rows, columns, path, fmt: str, kind: str, metadata: Optional[dict] = None) -> str:
    text = render_table(rows, columns, fmt, kind, metadata)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text


def read_result(path) -> dict:
    """Load and schema-check a JSON result file."""
    data = read_json(path)
    validate(data, "result", source=str(path))
    return data


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

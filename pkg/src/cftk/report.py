"""Run configuration (INI files plus environment) and machine-readable reports."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

__all__ = ["RunConfig", "Report", "load_config", "SCHEMA_PATH", "load_schema", "jsonable"]

SCHEMA_PATH = Path(__file__).with_name("schemas") / "report.schema.json"
STATUSES = ("pass", "fail", "indeterminate")


@dataclass
class RunConfig:
    virasoro_cutoff: int = 8
    fermion_cutoff: str = "3"
    ode_tol: float = 1e-10
    fourier_log2: int = 9
    trotter_ns: tuple = (8, 16, 32, 64)
    seed: int = 0
    format: str = "json"
    grid_width: int = 0          # 0 selects the width from the cutoff

    def __post_init__(self):
        if self.ode_tol <= 0:
            raise ValueError("ode_tol must be > 0")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if any(int(n) < 1 for n in self.trotter_ns):
            raise ValueError("Trotter N values must be >= 1")
        self.trotter_ns = tuple(int(n) for n in self.trotter_ns)

    def to_json(self) -> dict:
        d = asdict(self)
        d["trotter_ns"] = list(self.trotter_ns)
        return d


def _coerce(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    t = kinds[name]
    if name == "trotter_ns":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if t in ("int", int):
        return int(raw)
    if t in ("float", float):
        return float(raw)
    return raw.strip()


def load_config(path=None, seed: int | None = None, env=None) -> RunConfig:
    """Defaults, then the [cftk] section of an INI file, then CFTK_SEED, then ``seed``."""
    env = os.environ if env is None else env
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        if parser.has_section("cftk"):
            known = {f.name for f in fields(RunConfig)}
            for key, raw in parser.items("cftk"):
                if key not in known:
                    raise ValueError(f"unknown config key {key!r}")
                values[key] = _coerce(key, raw)
    if env.get("CFTK_SEED"):
        values["seed"] = int(env["CFTK_SEED"])
    if seed is not None:
        values["seed"] = seed
    return RunConfig(**values)


def jsonable(x):
    """Convert reports' payloads into plain JSON values (complex -> [re, im])."""
    from fractions import Fraction

    import numpy as np

    from .exact import ExactScalar, fmt_fraction

    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return v
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return fmt_fraction(x)
    if isinstance(x, ExactScalar):
        return x.to_json()
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if x is None or isinstance(x, str):
        return x
    return str(x)


@dataclass
class Report:
    check: str
    params: dict
    status: str
    metrics: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "pass" else 1

    def to_json(self) -> dict:
        return jsonable({"check": self.check, "params": self.params, "status": self.status,
                         "metrics": self.metrics, "provenance": self.provenance,
                         "tolerances": self.tolerances})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Flattened ``key,value`` rows for the report (nested keys joined by dots)."""
        rows = []

        def walk(prefix, v):
            if isinstance(v, dict):
                for k in sorted(v):
                    walk(f"{prefix}.{k}" if prefix else k, v[k])
            else:
                rows.append((prefix, json.dumps(v, sort_keys=True) if isinstance(v, list) else v))

        walk("", self.to_json())
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.dumps()


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))

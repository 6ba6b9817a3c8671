"""
Experiment configuration (JSON) and deterministic report writers.

A configuration looks like::

    {
      "curve": {"kind": "segment", "L": 1.0},
      "alpha_list": [-0.4, -0.55, -0.7],
      "j_max": 2
    }

Every other key has a default (see :data:`DEFAULTS`); unknown keys are
rejected with a JSON-path diagnostic.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .curves import CurveError, CurveSpec

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "DEFAULTS",
    "parse_config",
    "load_config",
    "dump_config",
    "format_value",
    "write_csv",
    "write_gnuplot",
    "write_json",
    "write_report",
    "Table",
]


class ConfigError(ValueError):
    """Invalid configuration; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


DEFAULTS = {
    "alpha_list": [-0.4, -0.55, -0.7],
    "j_max": 1,
    "k": 10,
    "n": 4096,
    "n_q": 4096,
    "tol": 1e-8,
    "resolutions": [0.5, 0.75],
    "eps_frac": 0.05,
    "d_list": [],
    "count_refine": False,
    "samples": 257,
    "out": "out",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run configuration.

    ``n`` is the 1D grid size, ``n_q`` the largest admissible Nystrom
    rule (the rule itself is sized from the decay length ``1/kappa``),
    ``k`` the number of 1D eigenvalues, ``d_list`` the prolongation
    lengths for the extended/rescaled 1D spectra and ``samples`` the
    number of points in the curve diagnostics.
    """

    curve: CurveSpec
    alpha_list: tuple = tuple(DEFAULTS["alpha_list"])
    j_max: int = 1
    k: int = 10
    n: int = 4096
    n_q: int = 4096
    tol: float = 1e-8
    resolutions: tuple = tuple(DEFAULTS["resolutions"])
    eps_frac: float = 0.05
    d_list: tuple = ()
    count_refine: bool = False
    samples: int = 257
    out: str = "out"

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["curve"] = self.curve.to_dict()
        for key in ("alpha_list", "resolutions", "d_list"):
            d[key] = list(d[key])
        return d


def _json_error(text: str, exc: json.JSONDecodeError) -> ConfigError:
    return ConfigError(f"line {exc.lineno} column {exc.colno}", f"malformed JSON ({exc.msg})")


def _number(path, value, *, integer=False, positive=True, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(value).__name__}")
    if integer and (not float(value).is_integer()):
        raise ConfigError(path, f"expected an integer, got {value}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    if positive and (value < 0 or (value == 0 and not allow_zero)):
        raise ConfigError(path, f"must be positive, got {value}")
    return int(value) if integer else float(value)


def _number_list(path, value, **kw):
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list")
    return tuple(_number(f"{path}[{i}]", v, **kw) for i, v in enumerate(value))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON configuration document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _json_error(text, exc) from None
    if not isinstance(raw, dict):
        raise ConfigError("$", "top level must be an object")
    unknown = sorted(set(raw) - set(DEFAULTS) - {"curve"})
    if unknown:
        raise ConfigError(f"$.{unknown[0]}", f"unknown key {unknown[0]!r}")
    if "curve" not in raw:
        raise ConfigError("$.curve", "missing required key")
    if not isinstance(raw["curve"], dict):
        raise ConfigError("$.curve", "expected an object")
    cur = raw["curve"]
    bad = sorted(set(cur) - {"kind", "L", "params", "d0"})
    if bad:
        raise ConfigError(f"$.curve.{bad[0]}", f"unknown key {bad[0]!r}")
    if "L" in cur:
        _number("$.curve.L", cur["L"])
    if "d0" in cur:
        _number("$.curve.d0", cur["d0"], allow_zero=True)
    if "params" in cur and not isinstance(cur["params"], dict):
        raise ConfigError("$.curve.params", "expected an object")
    try:
        spec = CurveSpec.from_dict(cur)
    except CurveError as exc:
        raise ConfigError("$.curve", str(exc)) from None

    v = {**DEFAULTS, **raw}
    alphas = _number_list("$.alpha_list", v["alpha_list"], positive=False)
    if not alphas:
        raise ConfigError("$.alpha_list", "must not be empty")
    for i in range(1, len(alphas)):
        if alphas[i] >= alphas[i - 1]:
            raise ConfigError(f"$.alpha_list[{i}]", "alpha_list must be strictly decreasing")
    res = _number_list("$.resolutions", v["resolutions"])
    if len(res) != 2:
        raise ConfigError("$.resolutions", "expected two panels-per-decay factors")
    if not isinstance(v["count_refine"], bool):
        raise ConfigError("$.count_refine", "expected true or false")
    if not isinstance(v["out"], str) or not v["out"]:
        raise ConfigError("$.out", "expected a non-empty path string")
    n = _number("$.n", v["n"], integer=True)
    if n < 8:
        raise ConfigError("$.n", "1D grid needs at least 8 interior nodes")
    k = _number("$.k", v["k"], integer=True)
    if k > n:
        raise ConfigError("$.k", f"k={k} exceeds the grid size n={n}")
    d_list = _number_list("$.d_list", v["d_list"])
    for i, d in enumerate(d_list):
        if d > spec.d0:
            raise ConfigError(f"$.d_list[{i}]", f"d={d} exceeds the curve extension margin d0={spec.d0}")
    return ExperimentConfig(
        curve=spec,
        alpha_list=alphas,
        j_max=_number("$.j_max", v["j_max"], integer=True),
        k=k,
        n=n,
        n_q=_number("$.n_q", v["n_q"], integer=True),
        tol=_number("$.tol", v["tol"]),
        resolutions=res,
        eps_frac=_number("$.eps_frac", v["eps_frac"], allow_zero=True),
        d_list=d_list,
        count_refine=v["count_refine"],
        samples=max(2, _number("$.samples", v["samples"], integer=True)),
        out=v["out"],
    )


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read configuration ({exc.strerror})") from None
    except UnicodeDecodeError:
        raise ConfigError(str(path), "configuration is not valid UTF-8") from None
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# writers
# --------------------------------------------------------------------------

def format_value(v) -> str:
    """17 significant digits for floats (doubles round-trip exactly)."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.17g}"
    if hasattr(v, "dtype") and v.dtype.kind == "f":
        return f"{float(v):.17g}"
    return str(v)


def _ensure_parent(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path.parent}: {exc.strerror}") from None
    if path.parent.exists() and not os.access(path.parent, os.W_OK):
        raise OSError(f"output directory {path.parent} is not writable")
    return path


def write_csv(path, header, rows) -> Path:
    path = _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path


def write_gnuplot(path, header, rows) -> Path:
    """Whitespace table with a ``#`` header; non-numeric cells become ``-``."""
    path = _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                s = format_value(v)
                cells.append(s.replace(" ", "_") if s else "-")
            fh.write(" ".join(cells) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


def write_json(path, data) -> Path:
    path = _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_report(report, out_dir, stem: str = "report", formats=("csv", "json")) -> list:
    """Write a report object to ``out_dir/stem.{csv,dat,json}``.

    ``report`` provides ``table() -> (header, rows)`` and optionally
    ``summary() -> dict``. Returns the written paths.
    """
    header, rows = report.table()
    out = Path(out_dir)
    paths = []
    for fmt in formats:
        if fmt == "csv":
            paths.append(write_csv(out / f"{stem}.csv", header, rows))
        elif fmt in ("gnuplot", "dat"):
            paths.append(write_gnuplot(out / f"{stem}.dat", header, rows))
        elif fmt == "json":
            summary = report.summary() if hasattr(report, "summary") else {}
            paths.append(write_json(out / f"{stem}.json", summary))
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    return paths


@dataclass
class Table:
    """Minimal report: a header, rows and an optional summary."""

    header: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def table(self):
        return list(self.header), list(self.rows)

    def summary(self):
        return dict(self.meta)

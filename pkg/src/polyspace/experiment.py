"""Experiment configuration files and result records.

Config files are flat ``key = value`` text, UTF-8, with ``#`` comments::

    experiment = clt_tau
    model = uniform:0,1
    n_grid = 100, 200, 400
    n_samples = 5000
    seed = 7
    output = results/clt
    tol.ks_max = 0.05

Recognised keys are the fields of :class:`ExperimentConfig`; tolerances are
given as ``tol.<name>`` and override the experiment's defaults.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigInvalid, IOFailure, PolyspaceError
from .stochastic import DEFAULT_CHUNK, RandomModel

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "clt_tau",
    "ldp_tau",
    "high_dim_betti_planar",
    "high_dim_betti_spatial",
    "mean_poincare",
    "higher_moments",
    "bivariate_independence",
)

REGIMES = ("SUB", "SUPER", "CRITICAL")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: RandomModel = RandomModel("uniform", (0, 1))
    n_grid: tuple = ()
    n_samples: int = 1000
    seed: int = 0
    p: float | None = None
    alpha: float | None = None
    epsilon: float | None = None
    t: float | None = None
    nu: int | None = None
    kind: str = "planar"
    regime: str | None = None
    method: str = "mc"
    max_samples: int = 1 << 24
    chunk_size: int = DEFAULT_CHUNK
    threads: int = 1
    output: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment id {self.experiment!r}")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid:
            raise ConfigInvalid("n_grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigInvalid("n_grid must be strictly increasing")
        if grid[0] < 3:
            raise ConfigInvalid("every n must be at least 3")
        if self.n_samples < 100:
            raise ConfigInvalid(f"n_samples must be at least 100, got {self.n_samples}")
        if self.kind not in ("planar", "spatial"):
            raise ConfigInvalid(f"kind must be planar or spatial, got {self.kind!r}")
        if self.method not in ("mc", "exact"):
            raise ConfigInvalid(f"method must be mc or exact, got {self.method!r}")
        if self.regime is not None and self.regime not in REGIMES:
            raise ConfigInvalid(f"regime must be one of {REGIMES}")
        if self.chunk_size < 1 or self.threads < 1:
            raise ConfigInvalid("chunk_size and threads must be positive")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "tolerances", dict(self.tolerances))

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def snapshot(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "model":
                value = value.spec()
            elif f.name == "n_grid":
                value = list(value)
            elif f.name == "tolerances":
                value = dict(sorted(value.items()))
            out[f.name] = value
        return out

    @classmethod
    def from_snapshot(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        data["model"] = RandomModel.parse(data["model"])
        data["n_grid"] = tuple(data["n_grid"])
        return cls(**data)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


_INT_KEYS = {"n_samples", "seed", "nu", "max_samples", "chunk_size", "threads"}
_FLOAT_KEYS = {"p", "alpha", "epsilon", "t"}
_STR_KEYS = {"experiment", "kind", "regime", "method", "output"}


def parse_config_text(text: str) -> ExperimentConfig:
    values: dict = {}
    tolerances: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigInvalid(f"line {lineno}: expected key = value")
        key, value = key.strip(), value.strip()
        try:
            if key.startswith("tol."):
                tolerances[key[4:]] = float(value)
            elif key == "model":
                values["model"] = RandomModel.parse(value)
            elif key == "n_grid":
                values["n_grid"] = tuple(int(x) for x in value.replace(",", " ").split())
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _STR_KEYS:
                values[key] = value.upper() if key == "regime" else value
            else:
                raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
        except (ValueError, PolyspaceError) as exc:
            if isinstance(exc, ConfigInvalid):
                raise
            raise ConfigInvalid(f"line {lineno}: bad value for {key}: {exc}") from None
    if "experiment" not in values:
        raise ConfigInvalid("missing required key 'experiment'")
    return ExperimentConfig(tolerances=tolerances, **values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    relation: str
    threshold: float
    passed: bool

    @classmethod
    def evaluate(cls, name, value, relation, threshold) -> "Check":
        value = float(value)
        ops = {
            "<": lambda a, b: a < b,
            "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b,
            ">=": lambda a, b: a >= b,
        }
        ok = not math.isnan(value) and ops[relation](value, float(threshold))
        return cls(name, value, relation, float(threshold), bool(ok))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_row(self, n, statistic, value, std_error=None):
        self.rows.append({
            "n": int(n),
            "statistic": statistic,
            "value": float(value),
            "std_error": None if std_error is None else float(std_error),
        })

    def add_diagnostic(self, name, value):
        self.diagnostics.append({"name": name, "value": value})

    def check(self, name, value, relation, threshold) -> Check:
        c = Check.evaluate(name, value, relation, threshold)
        self.checks.append(c)
        return c

    def value(self, n, statistic):
        for row in self.rows:
            if row["n"] == n and row["statistic"] == statistic:
                return row["value"]
        raise KeyError((n, statistic))

    def series(self, statistic):
        return [row["value"] for row in self.rows if row["statistic"] == statistic]

    def diagnostic(self, name):
        for d in self.diagnostics:
            if d["name"] == name:
                return d["value"]
        raise KeyError(name)

    def payload(self) -> dict:
        """JSON payload without the wall-clock time (deterministic for a config)."""
        return {
            "schema_version": SCHEMA_VERSION,
            "invocation": {"command": "verify", "config": self.config.snapshot()},
            "seed": self.config.seed,
            "results": [dict(r) for r in self.rows],
            "diagnostics": [dict(d) for d in self.diagnostics],
            "checks": [c.__dict__.copy() for c in self.checks],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        data = self.payload()
        data["wall_clock"] = self.wall_clock
        return json.dumps(data, indent=2, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentResult":
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ConfigInvalid(f"unsupported schema_version {data.get('schema_version')}")
        config = ExperimentConfig.from_snapshot(data["invocation"]["config"])
        return cls(
            config=config,
            rows=[dict(r) for r in data["results"]],
            diagnostics=[dict(d) for d in data["diagnostics"]],
            checks=[Check(**c) for c in data["checks"]],
            wall_clock=data.get("wall_clock", 0.0),
        )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "statistic", "value", "std_error"])
            for r in self.rows:
                writer.writerow([r["n"], r["statistic"], repr(r["value"]),
                                 "" if r["std_error"] is None else repr(r["std_error"])])

    def write(self, output) -> tuple[Path, Path]:
        """Write ``<output>.json`` and ``<output>.csv``; returns both paths."""
        base = Path(output)
        json_path = base.with_name(base.name + ".json")
        csv_path = base.with_name(base.name + ".csv")
        try:
            base.parent.mkdir(parents=True, exist_ok=True)
            json_path.write_text(self.to_json(), encoding="utf-8")
            self.write_csv(csv_path)
        except OSError as exc:
            raise IOFailure(f"cannot write results to {base}: {exc}") from None
        return json_path, csv_path

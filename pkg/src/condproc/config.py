"""Experiment configuration and reports."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .errors import ConfigError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ARTIFACT_VERSION = "condproc-0.1.0"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str = "ctmc-verify"
    alpha: float = 1.0
    beta: float = 2.0
    mu: float = 1.0
    gamma: float = -1.0
    logistic_mu: float = 0.3
    logistic_kappa: float = 0.1
    logistic_sigma: float = 1.0
    logistic_a: float = 1.0
    lambdas: tuple = ()
    n_paths: int = 100_000
    dt: float = 1e-3
    epsilon: float = 0.02
    epsilon_cond: float = 0.05
    escape_delta: float = 1e-4
    local_time: str = "bridge"
    dx: float = 0.01
    master_seed: int = 20240917
    out_dir: str = "results"
    quick: bool = False

    def __post_init__(self):
        for name in ("alpha", "beta", "mu", "logistic_mu", "logistic_kappa", "logistic_sigma", "logistic_a",
                     "dt", "epsilon", "epsilon_cond", "dx"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"must be a positive number, got {v!r}", name)
        if not self.alpha < self.beta:
            raise ConfigError("need alpha < beta", "alpha")
        if not self.gamma < 0:
            raise ConfigError("transient OU needs gamma < 0", "gamma")
        if not 0 < self.escape_delta < 1:
            raise ConfigError("must lie in (0, 1)", "escape_delta")
        if self.local_time not in ("band", "bridge"):
            raise ConfigError("must be 'band' or 'bridge'", "local_time")
        if not (isinstance(self.n_paths, int) and self.n_paths > 0):
            raise ConfigError("must be a positive integer", "n_paths")
        if not (isinstance(self.master_seed, int) and 0 <= self.master_seed < 2**64):
            raise ConfigError("must be an unsigned 64-bit integer", "master_seed")
        lam = tuple(float(x) for x in self.lambdas)
        if any(not x > 0 for x in lam):
            raise ConfigError("rates must be positive", "lambdas")
        if any(b >= a for a, b in zip(lam, lam[1:])):
            raise ConfigError("ladder must be strictly decreasing", "lambdas")
        object.__setattr__(self, "lambdas", lam)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def echo(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        return d


def load_config(path) -> dict:
    """Flat key/value TOML file -> dict of validated field overrides."""
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(str(exc), "config") from None
    known = {f.name: f for f in fields(ExperimentConfig)}
    out = {}
    for key, val in raw.items():
        if key not in known:
            raise ConfigError("unknown key", key)
        if isinstance(val, dict):
            raise ConfigError("nested tables are not supported", key)
        if key == "lambdas":
            val = tuple(val) if isinstance(val, list) else (val,)
        out[key] = val
    return out


@dataclass
class Row:
    name: str
    value: float
    stderr: float | None = None
    tolerance: str = ""
    passed: bool | None = None
    criterion: int | None = None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "stderr": self.stderr,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "criterion": self.criterion,
        }


@dataclass
class Report:
    experiment_id: str
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    version: str = ARTIFACT_VERSION

    def add(self, name, value, *, stderr=None, tolerance="", passed=None, criterion=None) -> Row:
        value = float(value) if not isinstance(value, (bool, str)) else value
        row = Row(name, value, stderr, tolerance, None if passed is None else bool(passed), criterion)
        self.rows.append(row)
        return row

    def criterion_rows(self, k: int) -> list:
        return [r for r in self.rows if r.criterion == k]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_json(self) -> str:
        doc = {
            "experiment_id": self.experiment_id,
            "version": self.version,
            "config": self.config.echo(),
            "passed": self.passed,
            "rows": [r.as_dict() for r in self.rows],
        }
        return json.dumps(doc, indent=2)

    def to_csv(self) -> str:
        lines = ["experiment_id,statistic,value,stderr,tolerance,pass,criterion"]
        for r in self.rows:
            lines.append(",".join([
                self.experiment_id, r.name, repr(r.value), "" if r.stderr is None else repr(r.stderr),
                f'"{r.tolerance}"', "" if r.passed is None else str(r.passed).lower(),
                "" if r.criterion is None else str(r.criterion),
            ]))
        return "\n".join(lines) + "\n"

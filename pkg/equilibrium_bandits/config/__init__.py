# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Experiment configuration. A config file is TOML with three kinds of sections:

    [run]                  horizon, seeds, output settings
    [environment]          name = "<environment>" plus its parameters
    [algorithm.<label>]    parameters of one algorithm; the label is its kind
                           unless the section sets kind = "<kind>"

Every environment and algorithm describes its parameters in a JSON field schema
stored next to its module. Unknown keys, wrong types and missing required values
are rejected with a ConfigError naming the section and key.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Tuple

from equilibrium_bandits.bandits.uecb.uecb import scheduled_length
from equilibrium_bandits.core.exceptions import ConfigError, EquilibriumBanditError

# --- Schema registry ---
PACKAGE_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

RUN_SCHEMA = "config/run.json"

ENVIRONMENT_SCHEMAS: Dict[str, str] = {
    "linear_contraction": "environments/linear_contraction/linear_contraction.json",
    "sis": "environments/sis/sis.json",
    "game": "environments/game/game.json",
    "ucb_breaker": "environments/synthetic/ucb_breaker.json",
    "lower_bound_pair": "environments/synthetic/lower_bound_pair.json",
}

ALGORITHM_SCHEMAS: Dict[str, str] = {
    "uecb": "bandits/uecb/uecb.json",
    "naive": "bandits/naive/naive.json",
    "ucb": "bandits/ucb/ucb.json",
    "exp3": "bandits/exp3/exp3.json",
    "rexp3": "bandits/exp3/rexp3.json",
}

# Algorithms that play an arm for a whole block before looking at another.
EPOCH_ALGORITHMS = ("uecb", "naive")

FIELD_TYPES = ("Int", "Float", "Data", "Check", "Select", "Table")


@dataclass(frozen=True)
class FieldSpec:
    fieldname: str
    fieldtype: str
    default: Any = None
    options: Tuple[str, ...] = ()
    non_negative: bool = False
    required: bool = False
    description: str = ""


@dataclass(frozen=True)
class Schema:
    name: str
    fields: Tuple[FieldSpec, ...]

    def field(self, fieldname: str) -> Optional[FieldSpec]:
        for spec in self.fields:
            if spec.fieldname == fieldname:
                return spec
        return None

    @property
    def fieldnames(self) -> Tuple[str, ...]:
        return tuple(spec.fieldname for spec in self.fields)


@lru_cache(maxsize=None)
def load_schema(relative_path: str) -> Schema:
    """Read a JSON field schema; defaults are stored as text and parsed by field type."""
    path = os.path.join(PACKAGE_ROOT, relative_path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read schema {path}: {exc}") from exc

    by_name = {entry["fieldname"]: entry for entry in doc.get("fields", [])}
    specs = []
    for fieldname in doc.get("field_order", list(by_name)):
        entry = by_name[fieldname]
        fieldtype = entry["fieldtype"]
        if fieldtype not in FIELD_TYPES:
            raise ConfigError(f"schema {path}: field {fieldname} has unsupported type {fieldtype}")
        options = tuple(entry.get("options", "").split("\n")) if entry.get("options") else ()
        spec = FieldSpec(
            fieldname=fieldname,
            fieldtype=fieldtype,
            options=options,
            non_negative=bool(entry.get("non_negative", 0)),
            required=bool(entry.get("reqd", 0)),
            description=entry.get("description", ""),
        )
        if "default" in entry:
            spec = dataclasses.replace(spec, default=_parse_default(spec, entry["default"]))
        specs.append(spec)
    return Schema(name=doc.get("name", os.path.basename(path)), fields=tuple(specs))


def _parse_default(spec: FieldSpec, text: str) -> Any:
    if spec.fieldtype == "Int":
        return int(text)
    if spec.fieldtype == "Float":
        return float(text)
    if spec.fieldtype == "Check":
        return bool(int(text))
    if spec.fieldtype == "Table":
        return json.loads(text)
    return text


# --- Value coercion ---

def coerce_value(spec: FieldSpec, value: Any, where: str) -> Any:
    """Check one config value against its field spec and return it in canonical form."""
    label = f"[{where}] {spec.fieldname}"
    if spec.fieldtype == "Int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{label} must be an integer, got {value!r}")
        result: Any = int(value)
    elif spec.fieldtype == "Float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{label} must be a number, got {value!r}")
        result = float(value)
    elif spec.fieldtype == "Check":
        if not isinstance(value, bool):
            raise ConfigError(f"{label} must be true or false, got {value!r}")
        result = value
    elif spec.fieldtype == "Select":
        if value not in spec.options:
            raise ConfigError(f"{label} must be one of {list(spec.options)}, got {value!r}")
        result = value
    elif spec.fieldtype == "Table":
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{label} must be a non-empty list of numbers, got {value!r}")
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"{label} must only hold numbers, got {value!r}")
        result = [float(v) for v in value]
    else:
        if not isinstance(value, str):
            raise ConfigError(f"{label} must be a string, got {value!r}")
        result = value

    if spec.non_negative:
        values = result if isinstance(result, list) else [result]
        if any(isinstance(v, (int, float)) and not isinstance(v, bool) and v < 0 for v in values):
            raise ConfigError(f"{label} must not be negative, got {value!r}")
    return result


def resolve_section(schema: Schema, values: Mapping[str, Any], where: str) -> Dict[str, Any]:
    """Every schema field, taken from `values` or its default (None when it has neither)."""
    unknown = sorted(set(values) - set(schema.fieldnames))
    if unknown:
        raise ConfigError(f"[{where}] unknown key(s): {', '.join(unknown)} (allowed: {', '.join(schema.fieldnames)})")
    resolved: Dict[str, Any] = {}
    for spec in schema.fields:
        if spec.fieldname in values:
            resolved[spec.fieldname] = coerce_value(spec, values[spec.fieldname], where)
        elif spec.required:
            raise ConfigError(f"[{where}] {spec.fieldname} is required")
        else:
            resolved[spec.fieldname] = spec.default
    return resolved


# --- Experiment config ---

@dataclass(frozen=True)
class EnvironmentSpec:
    name: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class AlgorithmSpec:
    label: str
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    environment: EnvironmentSpec
    algorithms: Tuple[AlgorithmSpec, ...]
    horizon: int
    num_seeds: int = 20
    master_seed: int = 0
    output_dir: str = "results"
    record_stride: Optional[int] = None
    workers: int = 1
    random_initial_state: bool = False
    save_curves: bool = False
    source: Optional[str] = None

    @property
    def stride(self) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, self.horizon // 2000)

    def with_overrides(
        self,
        horizon: Optional[int] = None,
        num_seeds: Optional[int] = None,
        output_dir: Optional[str] = None,
        workers: Optional[int] = None,
    ) -> "ExperimentConfig":
        changes: Dict[str, Any] = {}
        if horizon is not None:
            changes["horizon"] = horizon
        if num_seeds is not None:
            changes["num_seeds"] = num_seeds
        if output_dir is not None:
            changes["output_dir"] = output_dir
        if workers is not None:
            changes["workers"] = workers
        return dataclasses.replace(self, **changes)

    def validate(self, action_count: Optional[int] = None) -> "ExperimentConfig":
        """Cross-field checks; the horizon check needs K and runs only when it is given."""
        if self.horizon < 1:
            raise ConfigError(f"[run] horizon must be >= 1, got {self.horizon}")
        if self.num_seeds < 1:
            raise ConfigError(f"[run] num_seeds must be >= 1, got {self.num_seeds}")
        if self.record_stride is not None and self.record_stride < 1:
            raise ConfigError(f"[run] record_stride must be >= 1, got {self.record_stride}")
        if self.workers < 1:
            raise ConfigError(f"[run] workers must be >= 1, got {self.workers}")
        labels = [algo.label for algo in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate algorithm labels: {labels}")

        if action_count is not None:
            for algo in self.algorithms:
                if algo.kind not in EPOCH_ALGORITHMS:
                    continue
                try:
                    if algo.kind == "uecb":
                        shortest = scheduled_length(0, algo.params["rho1"], algo.params["rho2"])
                    else:
                        shortest = algo.params["t_try"]
                except EquilibriumBanditError as exc:
                    raise ConfigError(f"[algorithm.{algo.label}] {exc}") from exc
                if self.horizon < action_count * shortest:
                    raise ConfigError(
                        f"[algorithm.{algo.label}] horizon {self.horizon} is shorter than one block per arm "
                        f"({action_count} x {shortest})"
                    )
        return self

    def resolved(self) -> Dict[str, Any]:
        """Plain-data view of the full config, defaults included."""
        return {
            "run": {
                "horizon": self.horizon,
                "num_seeds": self.num_seeds,
                "master_seed": self.master_seed,
                "output_dir": self.output_dir,
                "record_stride": self.stride,
                "workers": self.workers,
                "random_initial_state": self.random_initial_state,
                "save_curves": self.save_curves,
            },
            "environment": {"name": self.environment.name, **self.environment.params},
            "algorithm": {algo.label: {"kind": algo.kind, **algo.params} for algo in self.algorithms},
        }

    def config_hash(self) -> str:
        """sha256 of the resolved config, ignoring settings that cannot change any result."""
        content = self.resolved()
        content["run"] = {k: v for k, v in content["run"].items() if k not in ("output_dir", "workers")}
        return hashlib.sha256(json.dumps(content, sort_keys=True).encode("utf-8")).hexdigest()


def parse_config(data: Mapping[str, Any], source: Optional[str] = None) -> ExperimentConfig:
    unknown = sorted(set(data) - {"run", "environment", "algorithm"})
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if "run" not in data:
        raise ConfigError("missing [run] section")
    if "environment" not in data:
        raise ConfigError("missing [environment] section")

    run = resolve_section(load_schema(RUN_SCHEMA), data["run"], "run")

    env_values = dict(data["environment"])
    env_name = env_values.pop("name", None)
    if env_name not in ENVIRONMENT_SCHEMAS:
        raise ConfigError(f"[environment] name must be one of {sorted(ENVIRONMENT_SCHEMAS)}, got {env_name!r}")
    environment = EnvironmentSpec(env_name, resolve_section(load_schema(ENVIRONMENT_SCHEMAS[env_name]), env_values, "environment"))

    algorithms: List[AlgorithmSpec] = []
    for label, values in data.get("algorithm", {}).items():
        where = f"algorithm.{label}"
        if not isinstance(values, Mapping):
            raise ConfigError(f"[{where}] must be a table")
        values = dict(values)
        kind = values.pop("kind", label)
        if kind not in ALGORITHM_SCHEMAS:
            raise ConfigError(f"[{where}] kind must be one of {sorted(ALGORITHM_SCHEMAS)}, got {kind!r}")
        algorithms.append(AlgorithmSpec(label, kind, resolve_section(load_schema(ALGORITHM_SCHEMAS[kind]), values, where)))

    return ExperimentConfig(
        environment=environment,
        algorithms=tuple(algorithms),
        source=source,
        **run,
    ).validate()


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path} is not valid TOML: {exc}") from exc
    return parse_config(data, source=path)

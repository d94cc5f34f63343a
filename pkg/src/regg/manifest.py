"""Run manifests and experiment configuration.

Every file-producing command writes a JSON manifest next to its outputs
holding the fully resolved parameters (including the seed and every default
that applied), the tool version, and content hashes of the outputs.
Re-running the recorded argv reproduces the data files byte-identically.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from configparser import ConfigParser
from dataclasses import dataclass, field

from . import __version__
from .errors import InvalidParametersError

__all__ = ["RunManifest", "ExperimentConfig", "CONFIG_SCHEMA"]

MANIFEST_VERSION = 1


@dataclass
class RunManifest:
    """Complete reproduction record of one run."""

    command: str
    argv: list[str]
    params: dict
    outputs: dict[str, str] = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    tool_version: str = __version__
    manifest_version: int = MANIFEST_VERSION
    timestamp: str = ""

    def stamp(self) -> None:
        self.timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()

    def add_output(self, path: str) -> None:
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        self.outputs[path] = digest

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "argv": self.argv,
            "params": self.params,
            "outputs": self.outputs,
            "results": self.results,
            "tool_version": self.tool_version,
            "manifest_version": self.manifest_version,
            "timestamp": self.timestamp,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def save(self, path: str) -> None:
        if not self.timestamp:
            self.stamp()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("manifest_version") != MANIFEST_VERSION:
            raise InvalidParametersError(
                f"{path}: unsupported manifest version "
                f"{payload.get('manifest_version')}")
        return cls(
            command=payload["command"],
            argv=list(payload["argv"]),
            params=payload["params"],
            outputs=payload.get("outputs", {}),
            results=payload.get("results", {}),
            tool_version=payload.get("tool_version", "unknown"),
            timestamp=payload.get("timestamp", ""),
        )


# Every design-decision knob, by module section.  Values are (type, default).
CONFIG_SCHEMA: dict[str, dict[str, tuple[type, object]]] = {
    "graph_models": {
        "uniform_method": (str, "auto"),
        "rejection_budget": (int, 100000),
        "chain_burn_in_factor": (int, 10),
    },
    "spectral_core": {
        "offdiag_pairs": (int, 10000),
        "exhaustive_n": (int, 300),
        "eta_domain_constant": (float, 100.0),
    },
    "law_harness": {
        "acceptance_constant": (float, 10.0),
    },
    "eigen_observables": {
        "interval_cap": (float, 3.0),
    },
    "stability_concentration": {
        "moment_constant": (float, 16.0),
    },
    "cli_runner": {
        "workers": (int, 1),
    },
}


class ExperimentConfig:
    """Flat key = value configuration with one section per module.

    Unknown sections or keys are rejected; command-line flags override file
    values via `override`.
    """

    def __init__(self, values: dict[str, dict[str, object]] | None = None):
        self.values = {s: {k: d for k, (_, d) in keys.items()}
                       for s, keys in CONFIG_SCHEMA.items()}
        for section, keys in (values or {}).items():
            for key, val in keys.items():
                self.override(section, key, val)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        parser = ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        cfg = cls()
        for section in parser.sections():
            if section not in CONFIG_SCHEMA:
                raise InvalidParametersError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                cfg.override(section, key, raw)
        return cfg

    def override(self, section: str, key: str, value) -> None:
        if section not in CONFIG_SCHEMA or key not in CONFIG_SCHEMA[section]:
            raise InvalidParametersError(f"unknown config key {section}.{key}")
        typ, _ = CONFIG_SCHEMA[section][key]
        try:
            self.values[section][key] = typ(value)
        except (TypeError, ValueError) as exc:
            raise InvalidParametersError(
                f"bad value for {section}.{key}: {value!r}") from exc

    def get(self, section: str, key: str):
        if section not in self.values or key not in self.values[section]:
            raise InvalidParametersError(f"unknown config key {section}.{key}")
        return self.values[section][key]

    def as_dict(self) -> dict:
        return {s: dict(keys) for s, keys in self.values.items()}

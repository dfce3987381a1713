"""Run configuration: JSON in, schema-checked, exact alpha."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .edge_process import EdgeDynamics
from .graphs import LabeledGraph, resolve_graph
from .scaling import ScalingRegime, format_fraction, parse_alpha
from .simulator import SimConfig


class ConfigError(ValueError):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("dynerg").joinpath("schemas", name).read_text())


@dataclass(frozen=True)
class RunConfig:
    N: int
    motifs: tuple[str, ...]
    grid: tuple[float, ...]
    lambda_on: float
    lambda_off: float
    alpha: Fraction
    horizon: float
    replications: int = 1000
    seed: int = 0
    recount_every: int | None = None
    output_dir: str = "out"
    report_format: str = "json"
    thresholds: dict = field(default_factory=lambda: {"z": 5.0})

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        try:
            jsonschema.validate(data, load_schema("config.schema.json"))
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid config at {where}: {exc.message}") from None
        dyn = data["dynamics"]
        try:
            alpha = parse_alpha(dyn["alpha"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid alpha {dyn['alpha']!r}: {exc}") from None
        cfg = cls(
            N=data["N"],
            motifs=tuple(data["motifs"]),
            grid=tuple(float(t) for t in data["grid"]),
            lambda_on=float(dyn["lambda_on"]),
            lambda_off=float(dyn["lambda_off"]),
            alpha=alpha,
            horizon=float(dyn["horizon"]),
            replications=data.get("replications", 1000),
            seed=data.get("seed", 0),
            recount_every=data.get("recount_every"),
            output_dir=data.get("output_dir", "out"),
            report_format=data.get("report_format", "json"),
            thresholds={"z": 5.0, **data.get("thresholds", {})},
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "motifs": list(self.motifs),
            "grid": list(self.grid),
            "dynamics": {
                "lambda_on": self.lambda_on,
                "lambda_off": self.lambda_off,
                "alpha": format_fraction(self.alpha),
                "horizon": self.horizon,
            },
            "replications": self.replications,
            "seed": self.seed,
            "recount_every": self.recount_every,
            "output_dir": self.output_dir,
            "report_format": self.report_format,
            "thresholds": dict(self.thresholds),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def validate(self) -> None:
        try:
            self.to_sim_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def regime(self) -> ScalingRegime:
        return ScalingRegime.power_law(self.alpha)

    @property
    def dynamics(self) -> EdgeDynamics:
        return EdgeDynamics(self.lambda_on, self.lambda_off, self.regime, self.horizon)

    def motif_graphs(self) -> tuple[LabeledGraph, ...]:
        return tuple(resolve_graph(m) for m in self.motifs)

    def to_sim_config(self) -> SimConfig:
        return SimConfig(
            N=self.N,
            motifs=self.motif_graphs(),
            grid=self.grid,
            dynamics=self.dynamics,
            replications=self.replications,
            seed=self.seed,
            recount_every=self.recount_every,
        )

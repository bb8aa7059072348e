"""Experiment configuration shared by the CLI subcommands."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from .finite_field import field_from_spec, FieldCtx


@dataclass
class ExperimentConfig:
    q: str = "5^1"
    d: int = 2
    k: int = 1
    kind: str = "mt"  # full | mt | product | family
    gamma: str = "full"  # full | random:<m> | hyperplane | <path to gamma file>
    intercepts: str = "zero"  # zero | random | mt
    seed: Optional[int] = 0
    iters: int = 50_000
    tol: float = 1e-3
    bound: str = "tight"
    out: Optional[str] = None
    format: str = "json"

    @property
    def ctx(self) -> FieldCtx:
        return field_from_spec(self.q)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.q = _normalise_q(cfg.q)
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def merged(self, overrides: dict) -> "ExperimentConfig":
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None and k in data})
        return ExperimentConfig.from_dict(data)


def _normalise_q(q) -> str:
    ctx = field_from_spec(str(q))
    return ctx.spec

"""Experiment configuration: a JSON-serializable bundle of run parameters."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .model import SpikedModel, SpikeSpec


@dataclass
class ExperimentConfig:
    """Parameters of a simulation/report run.

    ``spikes`` is a list of [alpha, multiplicity] pairs.  Round-trips
    losslessly through :meth:`to_json` / :meth:`from_json`.
    """

    p: int = 1000
    n: int = 2000
    spikes: list = field(default_factory=list)
    distribution: str = "gaussian"
    trials: int = 5
    seed: int = 0
    out: str | None = None
    format: str = "table"
    threads: int = 1
    points: int = 512
    hist_bins: int = 60
    nonzero_only: bool = False

    def __post_init__(self):
        self.spikes = [[float(a), int(k)] for a, k in self.spikes]

    def model(self) -> SpikedModel:
        return SpikedModel(
            spikes=tuple(SpikeSpec(a, k) for a, k in self.spikes), p=self.p, n=self.n
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

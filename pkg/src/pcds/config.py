"""JSON configuration: topology, radio, traffic, frame and experiment sections."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .model import DistanceRateMap, InterferenceMode, RadioParams
from .sim import FrameConfig, Scheme
from .traffic import TrafficConfig, TrafficMode


class ConfigError(ValueError):
    pass


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TopologySection(_Section):
    source: Literal["random", "file"] = "random"
    n_ues: int = Field(10, ge=1)
    side_m: float = Field(10.0, gt=0)
    file: Optional[str] = None

    @model_validator(mode="after")
    def _file_given(self):
        if self.source == "file" and not self.file:
            raise ValueError("topology.file is required when source is 'file'")
        return self


class RadioSection(_Section):
    tx_power_mw: float = Field(500.0, gt=0)
    k0: Optional[float] = Field(None, gt=0)
    path_loss_exp: float = Field(2.17, gt=0)
    mui_factor: float = Field(0.01, ge=0)
    noise_psd_mw_per_hz: float = Field(10 ** (-174 / 10), gt=0)
    bandwidth_hz: float = Field(2.16e9, gt=0)
    sinr_thresholds: dict[int, float] = {1: 4.0, 2: 16.0, 3: 36.0}
    bands: Literal["link-mix", "equal"] = "link-mix"
    rate_thresholds_m: Optional[list[float]] = None
    rates: list[int] = [3, 2, 1]

    @field_validator("sinr_thresholds")
    @classmethod
    def _monotone(cls, v):
        gammas = [v[r] for r in sorted(v)]
        if any(b < a for a, b in zip(gammas, gammas[1:])):
            raise ValueError("thresholds must be nondecreasing in rate")
        return v

    def params(self) -> RadioParams:
        kw = self.model_dump(exclude={"bands", "rate_thresholds_m", "rates", "k0"})
        if self.k0 is not None:
            kw["k0"] = self.k0
        return RadioParams(**kw)

    def distance_map(self, side: float) -> DistanceRateMap:
        if self.rate_thresholds_m is not None:
            return DistanceRateMap(tuple(self.rate_thresholds_m), tuple(self.rates))
        if self.bands == "equal":
            return DistanceRateMap.equal_bands(side, self.rates)
        return DistanceRateMap.default(side) if self.rates == [3, 2, 1] else DistanceRateMap.from_link_mix(
            [1 / len(self.rates)] * (len(self.rates) - 1), side, self.rates)


class TrafficSection(_Section):
    mode: TrafficMode = TrafficMode.POISSON
    packet_size_bits: float = Field(8000.0, gt=0)
    rate_ref_bps: float = Field(2e9, gt=0)
    lam: float = Field(25_000.0, gt=0)
    lam1: float = Field(100_000.0, gt=0)
    lam2: float = Field(10_000.0, gt=0)
    p1: float = Field(0.5, ge=0, le=1)
    p2: float = Field(0.5, ge=0, le=1)

    @model_validator(mode="after")
    def _mixture(self):
        if abs(self.p1 + self.p2 - 1) > 1e-9:
            raise ValueError("p1 + p2 must equal 1")
        return self

    def config(self, n_ues: int, seed: int = 0) -> TrafficConfig:
        return TrafficConfig(n_ues=n_ues, seed=seed, **self.model_dump())


class FrameSection(_Section):
    slot_us: float = Field(5.0, gt=0)
    t_d_slots: int = Field(1, ge=0)
    t_push_slots: int = Field(1, ge=0)
    t_sch_slots: int = Field(2, ge=0)
    delay_threshold_slots: float = Field(25_000, ge=0)
    horizon_slots: int = Field(100_000, gt=0)

    def config(self, **kw) -> FrameConfig:
        return FrameConfig(**self.model_dump(), **kw)


class ExperimentSection(_Section):
    schemes: list[Scheme] = Field(default_factory=lambda: [Scheme.SBTS, Scheme.FDMAC_H, Scheme.PCDS], min_length=1)
    loads: list[float] = Field(default_factory=lambda: [0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5], min_length=1)
    h_max: list[int] = Field(default_factory=lambda: [4], min_length=1)
    replications: int = Field(20, ge=1)
    base_seed: int = 1
    interference: InterferenceMode = InterferenceMode.OFF
    out: str = "results.csv"
    summary: Optional[str] = None
    workers: int = Field(1, ge=1)

    @field_validator("loads")
    @classmethod
    def _positive_loads(cls, v):
        if any(x <= 0 for x in v):
            raise ValueError("loads must be positive")
        return v

    @field_validator("h_max")
    @classmethod
    def _positive_hops(cls, v):
        if any(h < 1 for h in v):
            raise ValueError("h_max values must be >= 1")
        return v


class Config(_Section):
    topology: TopologySection = TopologySection()
    radio: RadioSection = RadioSection()
    traffic: TrafficSection = TrafficSection()
    frame: FrameSection = FrameSection()
    experiment: ExperimentSection = ExperimentSection()


def parse_config(data: dict) -> Config:
    try:
        return Config.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid config: {problems}") from None


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(data)

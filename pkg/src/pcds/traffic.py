"""Packet arrival processes (Poisson and hyper-exponential IPP) and offered-load accounting."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

SLOT_S = 5e-6


class TrafficMode(str, Enum):
    POISSON = "poisson"
    IPP = "ipp"


@dataclass(frozen=True)
class TrafficConfig:
    mode: TrafficMode = TrafficMode.POISSON
    packet_size_bits: float = 8000.0
    rate_ref_bps: float = 2e9
    n_ues: int = 10
    lam: float = 25_000.0       # packets/s, Poisson
    lam1: float = 100_000.0     # packets/s, IPP phase 1
    lam2: float = 10_000.0      # packets/s, IPP phase 2
    p1: float = 0.5
    p2: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", TrafficMode(self.mode))
        if self.packet_size_bits <= 0 or self.rate_ref_bps <= 0:
            raise ValueError("packet size and reference rate must be positive")
        if self.n_ues < 1:
            raise ValueError("n_ues must be >= 1")
        if min(self.lam, self.lam1, self.lam2) <= 0:
            raise ValueError("arrival rates must be positive")
        if self.p1 < 0 or self.p2 < 0 or not np.isclose(self.p1 + self.p2, 1.0):
            raise ValueError("p1 and p2 must be nonnegative and sum to 1")

    @property
    def mean_interarrival_s(self) -> float:
        if self.mode is TrafficMode.POISSON:
            return 1.0 / self.lam
        return self.p1 / self.lam1 + self.p2 / self.lam2


def traffic_load(cfg: TrafficConfig) -> float:
    """Offered load: packet bits times UE count per reference-rate second."""
    if cfg.mode is TrafficMode.POISSON:
        return cfg.lam * cfg.packet_size_bits * cfg.n_ues / cfg.rate_ref_bps
    return cfg.packet_size_bits * cfg.n_ues / (cfg.mean_interarrival_s * cfg.rate_ref_bps)


def with_load(cfg: TrafficConfig, load: float) -> TrafficConfig:
    """Rescale arrival rates so ``traffic_load`` equals ``load``; IPP keeps lam1/lam2 and p1, p2."""
    if load <= 0:
        raise ValueError("load must be positive")
    mean = cfg.packet_size_bits * cfg.n_ues / (load * cfg.rate_ref_bps)
    if cfg.mode is TrafficMode.POISSON:
        return replace(cfg, lam=1.0 / mean)
    ratio = cfg.lam1 / cfg.lam2
    lam2 = (cfg.p1 / ratio + cfg.p2) / mean
    return replace(cfg, lam1=ratio * lam2, lam2=lam2)


def _sample(rng: np.random.Generator, draw, mean_slots: float, horizon_slots: float) -> np.ndarray:
    chunks, t = [], 0.0
    size = max(16, int(1.2 * horizon_slots / mean_slots) + 16)
    while t <= horizon_slots:
        gaps = draw(rng, size)
        times = t + np.cumsum(gaps)
        chunks.append(times)
        t = times[-1]
    out = np.concatenate(chunks)
    return out[out <= horizon_slots]


def poisson_arrivals(cfg: TrafficConfig, horizon_slots: float, seed: int | None = None,
                     slot_s: float = SLOT_S) -> np.ndarray:
    """Arrival times in slot units over ``[0, horizon_slots]``, sorted."""
    if horizon_slots <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    scale = 1.0 / (cfg.lam * slot_s)
    return _sample(rng, lambda r, n: r.exponential(scale, n), scale, horizon_slots)


def ipp_arrivals(cfg: TrafficConfig, horizon_slots: float, seed: int | None = None,
                 slot_s: float = SLOT_S) -> np.ndarray:
    """Arrivals whose gaps are exponential(lam1) with probability p1, else exponential(lam2)."""
    if horizon_slots <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    s1, s2 = 1.0 / (cfg.lam1 * slot_s), 1.0 / (cfg.lam2 * slot_s)

    def draw(r, n):
        phase1 = r.random(n) < cfg.p1
        return r.exponential(1.0, n) * np.where(phase1, s1, s2)

    return _sample(rng, draw, cfg.mean_interarrival_s / slot_s, horizon_slots)


def arrivals(cfg: TrafficConfig, horizon_slots: float, seed: int | None = None,
             slot_s: float = SLOT_S) -> np.ndarray:
    gen = poisson_arrivals if cfg.mode is TrafficMode.POISSON else ipp_arrivals
    return gen(cfg, horizon_slots, seed, slot_s)


def write_trace(times: np.ndarray, path) -> None:
    np.savetxt(path, times, fmt="%.9f")

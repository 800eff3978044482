"""Geometry, link budget, interference and SINR feasibility for a directional 60 GHz cell."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

Gain = float | Callable[[int, int], float]

# 60 GHz carrier, free-space constant (wavelength / 4 pi)^2
_WAVELENGTH_M = 299_792_458.0 / 60e9
DEFAULT_K0 = (_WAVELENGTH_M / (4 * math.pi)) ** 2


class AdjacencyError(ValueError):
    """Two links sharing a node were asked to transmit concurrently."""

    def __init__(self, first: "Link", second: "Link"):
        super().__init__(f"links {first} and {second} share a node and cannot be concurrent")
        self.pair = (first, second)


class InterferenceMode(str, Enum):
    OFF = "off"
    SINR = "sinr"


@dataclass(frozen=True, order=True)
class Link:
    tx: int
    rx: int

    def __post_init__(self):
        if self.tx == self.rx:
            raise ValueError(f"link endpoints must differ, got {self.tx}->{self.rx}")

    def adjacent(self, other: "Link") -> bool:
        return bool({self.tx, self.rx} & {other.tx, other.rx})

    def __str__(self) -> str:
        return f"{self.tx}->{self.rx}"


@dataclass(frozen=True)
class Topology:
    """Node positions in meters; exactly one node is the AP.

    Node ids are the row indices of ``positions``.
    """

    positions: np.ndarray
    ap: int
    area: tuple[float, float] = (10.0, 10.0)
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array")
        if pos.shape[0] < 2:
            raise ValueError("a cell needs at least the AP and one UE")
        if not 0 <= self.ap < pos.shape[0]:
            raise ValueError(f"AP id {self.ap} out of range 0..{pos.shape[0] - 1}")
        w, h = self.area
        if np.any(pos < 0) or np.any(pos[:, 0] > w) or np.any(pos[:, 1] > h):
            raise ValueError(f"node positions must lie inside the {w} m x {h} m area")
        if self.labels is not None and len(self.labels) != pos.shape[0]:
            raise ValueError("labels must name every node")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def random(cls, n_ues: int, rng: np.random.Generator, side: float = 10.0) -> "Topology":
        """UEs uniform in a square, AP in the center; the AP takes the last id."""
        ues = rng.uniform(0.0, side, size=(n_ues, 2))
        pos = np.vstack([ues, [[side / 2, side / 2]]])
        return cls(pos, ap=n_ues, area=(side, side))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def ues(self) -> list[int]:
        return [i for i in range(self.n) if i != self.ap]

    def distance(self, i: int, j: int) -> float:
        return float(np.hypot(*(self.positions[i] - self.positions[j])))

    def distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def to_dict(self) -> dict:
        nodes = []
        for i, (x, y) in enumerate(self.positions.tolist()):
            node = {"id": i, "x": x, "y": y, "is_ap": i == self.ap}
            if self.labels:
                node["label"] = self.labels[i]
            nodes.append(node)
        return {"area": list(self.area), "nodes": nodes}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Topology":
        nodes = sorted(data["nodes"], key=lambda nd: nd["id"])
        if [nd["id"] for nd in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be unique and dense 0..n-1")
        aps = [nd["id"] for nd in nodes if nd.get("is_ap")]
        if len(aps) != 1:
            raise ValueError(f"exactly one node must be the AP, found {len(aps)}")
        labels = None
        if all("label" in nd for nd in nodes):
            labels = tuple(nd["label"] for nd in nodes)
        area = tuple(data.get("area", (10.0, 10.0)))
        return cls(np.array([[nd["x"], nd["y"]] for nd in nodes]), ap=aps[0], area=area, labels=labels)


@dataclass(frozen=True)
class RadioParams:
    tx_power_mw: float = 500.0
    k0: float = DEFAULT_K0
    path_loss_exp: float = 2.17
    mui_factor: float = 0.01
    noise_psd_mw_per_hz: float = 10 ** (-174 / 10)
    bandwidth_hz: float = 2.16e9
    sinr_thresholds: Mapping[int, float] = field(default_factory=lambda: {1: 4.0, 2: 16.0, 3: 36.0})
    tx_gain: Gain = 1.0
    rx_gain: Gain = 1.0

    def __post_init__(self):
        for name in ("tx_power_mw", "k0", "path_loss_exp", "noise_psd_mw_per_hz", "bandwidth_hz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.mui_factor < 0:
            raise ValueError("mui_factor must be >= 0")
        rates = sorted(self.sinr_thresholds)
        gammas = [self.sinr_thresholds[r] for r in rates]
        if any(g <= 0 for g in gammas):
            raise ValueError("SINR thresholds must be positive")
        if any(b < a for a, b in zip(gammas, gammas[1:])):
            raise ValueError("SINR thresholds must be nondecreasing in rate")
        for name in ("tx_gain", "rx_gain"):
            g = getattr(self, name)
            if not callable(g) and not g > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def noise_mw(self) -> float:
        return self.noise_psd_mw_per_hz * self.bandwidth_hz

    def gains(self, tx: int, rx: int) -> float:
        gt = self.tx_gain(tx, rx) if callable(self.tx_gain) else self.tx_gain
        gr = self.rx_gain(tx, rx) if callable(self.rx_gain) else self.rx_gain
        return gt * gr

    def gamma(self, rate: int) -> float:
        try:
            return self.sinr_thresholds[rate]
        except KeyError:
            raise ValueError(f"no SINR threshold configured for rate {rate}") from None


@dataclass(frozen=True)
class RateMatrix:
    """Directed per-link rates in packets per slot; ``c[i, j]`` is link i->j."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("rate matrix must be square")
        if np.any(c < 0):
            raise ValueError("rates must be nonnegative")
        if np.any(np.diag(c) != 0):
            raise ValueError("rate matrix diagonal must be zero")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def __getitem__(self, link: Link | tuple[int, int]) -> int:
        if isinstance(link, Link):
            return int(self.c[link.tx, link.rx])
        return int(self.c[link])

    def to_list(self) -> list[list[int]]:
        return self.c.tolist()


@dataclass(frozen=True)
class DistanceRateMap:
    """Distance bands to rates: ``l < thresholds[0]`` gets ``rates[0]`` and so on;
    beyond the last threshold gets ``rates[-1]``."""

    thresholds: tuple[float, ...]
    rates: tuple[int, ...]

    def __post_init__(self):
        if len(self.rates) != len(self.thresholds) + 1:
            raise ValueError("need exactly one more rate than thresholds")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("distance thresholds must be strictly increasing")
        if any(b >= a for a, b in zip(self.rates, self.rates[1:])):
            raise ValueError("rates must be strictly decreasing with distance")
        if self.rates[-1] < 1:
            raise ValueError("every band needs a positive rate")

    @classmethod
    def equal_bands(cls, side: float = 10.0, rates: Sequence[int] = (3, 2, 1)) -> "DistanceRateMap":
        diag = math.hypot(side, side)
        k = len(rates)
        return cls(tuple(diag * i / k for i in range(1, k)), tuple(rates))

    @classmethod
    def from_link_mix(cls, fractions: Sequence[float], side: float = 10.0,
                      rates: Sequence[int] = (3, 2, 1)) -> "DistanceRateMap":
        """Bands holding the given shares of node pairs when nodes are uniform in a square.

        ``fractions`` lists the share of pairs for every rate but the last (slowest).
        """
        if len(fractions) != len(rates) - 1:
            raise ValueError("give one fraction per rate except the slowest")
        cum = np.cumsum(fractions)
        if np.any(np.asarray(fractions) <= 0) or cum[-1] >= _square_distance_cdf(1.0):
            raise ValueError("fractions must be positive and leave room for the slowest band")
        thresholds = tuple(side * brentq(lambda s, q=q: _square_distance_cdf(s) - q, 0.0, 1.0) for q in cum)
        return cls(thresholds, tuple(rates))

    @classmethod
    def default(cls, side: float = 10.0) -> "DistanceRateMap":
        """Bands reproducing the rate mix of the six-UE example cell (6/42 top rate, 8/42 middle)."""
        return cls.from_link_mix(DEFAULT_LINK_MIX, side)

    def rate(self, distance: float) -> int:
        for t, r in zip(self.thresholds, self.rates):
            if distance < t:
                return r
        return self.rates[-1]


def _square_distance_cdf(s: float) -> float:
    """P(distance <= s) for two uniform points in the unit square, valid for s <= 1."""
    return s**4 / 2 - 8 * s**3 / 3 + math.pi * s * s


# share of top-rate and middle-rate links among all ordered pairs of the example matrix
DEFAULT_LINK_MIX = (6 / 42, 8 / 42)


def received_power(params: RadioParams, link: Link, topo: Topology) -> float:
    """Received power in mW at ``link.rx`` from ``link.tx`` under the LOS path-loss model."""
    return _power(params, link.tx, link.rx, topo)


def _power(params: RadioParams, tx: int, rx: int, topo: Topology) -> float:
    dist = topo.distance(tx, rx)
    if dist <= 0:
        raise ValueError(f"nodes {tx} and {rx} are co-located; path loss is undefined")
    return params.k0 * params.gains(tx, rx) * dist ** (-params.path_loss_exp) * params.tx_power_mw


def interference_power(params: RadioParams, victim: Link, concurrent: Iterable[Link], topo: Topology) -> float:
    """Multi-user interference in mW seen by ``victim.rx`` from the transmitters of ``concurrent``."""
    total = 0.0
    for other in concurrent:
        if victim.adjacent(other):
            raise AdjacencyError(victim, other)
        total += _power(params, other.tx, victim.rx, topo)
    return params.mui_factor * total


def sinr(params: RadioParams, link: Link, concurrent: Iterable[Link], topo: Topology) -> float:
    signal = received_power(params, link, topo)
    return signal / (params.noise_mw + interference_power(params, link, concurrent, topo))


def is_matching(links: Sequence[Link]) -> bool:
    seen: set[int] = set()
    for link in links:
        if link.tx in seen or link.rx in seen:
            return False
        seen.add(link.tx)
        seen.add(link.rx)
    return True


def pairing_feasible(
    params: RadioParams | None,
    pairing: Sequence[Link],
    rates: RateMatrix,
    topo: Topology | None,
    mode: InterferenceMode | str = InterferenceMode.OFF,
) -> bool:
    """True when the links form a matching and, in SINR mode, every link meets its threshold."""
    pairing = list(pairing)
    if not is_matching(pairing):
        return False
    if InterferenceMode(mode) is InterferenceMode.OFF:
        return True
    if params is None or topo is None:
        raise ValueError("SINR feasibility needs radio parameters and a topology")
    for i, link in enumerate(pairing):
        others = pairing[:i] + pairing[i + 1:]
        if sinr(params, link, others, topo) < params.gamma(rates[link]):
            return False
    return True


Feasibility = Callable[[Sequence[Link]], bool]


def make_feasibility(
    mode: InterferenceMode | str,
    params: RadioParams | None = None,
    rates: RateMatrix | None = None,
    topo: Topology | None = None,
) -> Feasibility:
    """Close over the cell so schedulers can test candidate pairings with one argument."""
    mode = InterferenceMode(mode)
    if mode is InterferenceMode.OFF:
        return is_matching
    if params is None or rates is None or topo is None:
        raise ValueError("SINR mode needs radio parameters, rates and a topology")

    def feasible(links: Sequence[Link]) -> bool:
        return pairing_feasible(params, links, rates, topo, mode)

    return feasible


def rate_matrix_from_topology(topo: Topology, dist_rate_map: DistanceRateMap | None = None) -> RateMatrix:
    if dist_rate_map is None:
        dist_rate_map = DistanceRateMap.default(max(topo.area))
    dist = topo.distances()
    c = np.zeros((topo.n, topo.n), dtype=np.int64)
    for i in range(topo.n):
        for j in range(topo.n):
            if i != j:
                c[i, j] = dist_rate_map.rate(dist[i, j])
    return RateMatrix(c)

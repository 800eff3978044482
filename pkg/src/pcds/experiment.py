"""Sweep orchestration: replications fanned out to a worker pool, rows merged into one CSV."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .config import Config, FrameSection, RadioSection, TrafficSection
from .model import InterferenceMode, Topology, rate_matrix_from_topology
from .sim import Scheme, SimLog, run_simulation
from .traffic import TrafficMode, arrivals as make_arrivals, with_load

log = logging.getLogger(__name__)

COLUMNS = ("scheme", "traffic", "load", "h_max", "seed", "avg_delay", "throughput", "d2d_ratio", "discarded", "error")
METRICS = ("avg_delay", "throughput", "d2d_ratio", "discarded")


@dataclass(frozen=True)
class ExperimentSpec:
    schemes: tuple[Scheme, ...]
    loads: tuple[float, ...]
    traffic_mode: TrafficMode
    h_max: tuple[int, ...]
    replications: int = 20
    base_seed: int = 1
    out: str | None = None
    topology_source: str = "random"
    n_ues: int = 10
    side_m: float = 10.0
    topology_file: str | None = None
    interference: InterferenceMode = InterferenceMode.OFF
    radio: RadioSection = field(default_factory=RadioSection)
    traffic: TrafficSection = field(default_factory=TrafficSection)
    frame: FrameSection = field(default_factory=FrameSection)

    def __post_init__(self):
        if not self.schemes or not self.loads or not self.h_max:
            raise ValueError("schemes, loads and h_max must be nonempty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        object.__setattr__(self, "traffic_mode", TrafficMode(self.traffic_mode))
        object.__setattr__(self, "interference", InterferenceMode(self.interference))

    @classmethod
    def from_config(cls, cfg: Config, **overrides) -> "ExperimentSpec":
        exp, topo = cfg.experiment, cfg.topology
        spec = cls(
            schemes=tuple(exp.schemes),
            loads=tuple(exp.loads),
            traffic_mode=cfg.traffic.mode,
            h_max=tuple(exp.h_max),
            replications=exp.replications,
            base_seed=exp.base_seed,
            out=exp.out,
            topology_source=topo.source,
            n_ues=topo.n_ues,
            side_m=topo.side_m,
            topology_file=topo.file,
            interference=exp.interference,
            radio=cfg.radio,
            traffic=cfg.traffic,
            frame=cfg.frame,
        )
        return replace(spec, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.replications)]


def _seed_int(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def replication_topology(spec: ExperimentSpec, seed: int) -> Topology:
    if spec.topology_source == "file":
        return Topology.from_dict(json.loads(Path(spec.topology_file).read_text()))
    rng = np.random.default_rng(_seed_int(seed, 0))
    return Topology.random(spec.n_ues, rng, spec.side_m)


def _run_cell(spec: ExperimentSpec, seed: int, load: float, event_dir: str | None = None) -> list[dict]:
    """Every (scheme, h_max) combination for one replication and load.

    All schemes see the same topology and arrival trace. The arrival seed does not
    depend on load, so loads differ only by a time rescaling of the same draws.
    """
    topo = replication_topology(spec, seed)
    rates = rate_matrix_from_topology(topo, spec.radio.distance_map(max(topo.area)))
    radio = spec.radio.params()
    tcfg = with_load(replace(spec.traffic.config(n_ues=len(topo.ues)), mode=spec.traffic_mode), load)
    slot_s = spec.frame.slot_us * 1e-6
    trace = make_arrivals(tcfg, spec.frame.horizon_slots, seed=_seed_int(seed, 1), slot_s=slot_s)

    rows = []
    for h_max in spec.h_max:
        for scheme in spec.schemes:
            row = {"scheme": scheme.value, "traffic": spec.traffic_mode.value, "load": load,
                   "h_max": h_max, "seed": seed, "error": ""}
            try:
                fcfg = spec.frame.config(scheme=scheme, h_max=h_max, interference=spec.interference, seed=seed)
                ev = None
                if event_dir is not None:
                    ev = SimLog(topo.ap, len(topo.ues), fcfg.horizon_slots, fcfg.delay_threshold_slots)
                m = run_simulation(topo, rates, tcfg, fcfg, radio=radio, arrivals=trace, log=ev)
                row.update(m.as_row())
                if ev is not None:
                    ev.write(Path(event_dir) / f"events_{scheme.value}_load{load:g}_h{h_max}_seed{seed}.csv")
            except Exception as exc:  # isolate the failing cell, keep the sweep going
                log.error("cell %s load=%s h_max=%s seed=%s failed: %s", scheme.value, load, h_max, seed, exc)
                row.update({k: "" for k in METRICS}, error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
    return rows


def run_experiment(spec: ExperimentSpec, workers: int = 1, event_dir: str | None = None) -> list[dict]:
    """Rows ordered by (load, seed, h_max, scheme) regardless of worker completion order."""
    if event_dir is not None:
        Path(event_dir).mkdir(parents=True, exist_ok=True)
    cells = [(seed, load) for load in spec.loads for seed in spec.seeds]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell, spec, seed, load, event_dir) for seed, load in cells]
            results = [f.result() for f in futures]
    else:
        results = [_run_cell(spec, seed, load, event_dir) for seed, load in cells]
    return [row for rows in results for row in rows]


def write_csv(rows: Iterable[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def ci_half_width(values: Sequence[float], level: float = 0.95) -> float:
    """Student-t half-width of the mean; 0 for fewer than two samples."""
    n = len(values)
    if n < 2:
        return 0.0
    sd = float(np.std(values, ddof=1))
    return float(stats.t.ppf(0.5 + level / 2, n - 1)) * sd / math.sqrt(n)


def summarize(rows: Iterable[dict]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        if row.get("error"):
            continue
        groups.setdefault((row["scheme"], row["traffic"], row["load"], row["h_max"]), []).append(row)
    out = []
    for (scheme, traffic, load, h_max), members in groups.items():
        entry = {"scheme": scheme, "traffic": traffic, "load": load, "h_max": h_max, "n": len(members)}
        for metric in METRICS:
            vals = [float(r[metric]) for r in members]
            entry[metric] = {"mean": float(np.mean(vals)), "ci95": ci_half_width(vals)}
        out.append(entry)
    return out


def write_summary(rows: Iterable[dict], path) -> None:
    Path(path).write_text(json.dumps(summarize(rows), indent=2) + "\n")

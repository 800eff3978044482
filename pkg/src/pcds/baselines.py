"""Comparison schedulers: serial broadcasting (SBTS) and frontier edge coloring (FDMAC-H)."""

from __future__ import annotations

import logging

from .model import Feasibility, Link, RateMatrix, Topology, is_matching
from .paths import OpCounter, PathSet
from .scheduling import Pairing, Schedule, hop_weight

log = logging.getLogger(__name__)


def sbts_schedule(rates: RateMatrix, topo: Topology | int, d: int) -> Schedule:
    """AP serves every UE directly, one at a time, in UE id order."""
    ap = topo.ap if isinstance(topo, Topology) else topo
    pairings = [
        Pairing((Link(ap, u),), hop_weight(d, rates[ap, u]))
        for u in range(rates.n)
        if u != ap
    ]
    return Schedule(tuple(pairings))


def sbts_paths(rates: RateMatrix, topo: Topology | int) -> PathSet:
    """The one-hop star that SBTS implicitly uses."""
    ap = topo.ap if isinstance(topo, Topology) else topo
    return PathSet(ap, tuple((ap, u) for u in range(rates.n) if u != ap))


def fdmach_schedule(
    paths: PathSet,
    rates: RateMatrix,
    d: int,
    feasibility: Feasibility | None = None,
    counter: OpCounter | None = None,
) -> Schedule:
    """Color the frontier of first unscheduled hops, heaviest first, one pairing per pass."""
    feasibility = feasibility or is_matching
    cap = rates.n // 2
    hops = [paths.hops(p) for p in range(len(paths.paths))]
    weights = [[hop_weight(d, rates[link]) for link in h] for h in hops]
    nxt = [0] * len(hops)
    remaining = sum(len(h) for h in hops)

    pairings: list[Pairing] = []
    while remaining:
        frontier = sorted(
            (p for p in range(len(hops)) if nxt[p] < len(hops[p])),
            key=lambda p: (-weights[p][nxt[p]], p),
        )
        if counter:
            counter.tick(len(frontier))
        links: list[Link] = []
        used: set[int] = set()
        admitted: list[int] = []
        for p in frontier:
            if len(links) >= cap:
                break
            link = hops[p][nxt[p]]
            if link.tx in used or link.rx in used:
                continue
            trial = links + [link]
            if counter:
                counter.tick(len(trial))
            ok = feasibility(trial)
            if not ok and not links:
                log.warning("link %s misses its SINR threshold even alone; scheduling it by itself", link)
                ok = True
            if ok:
                links = trial
                used.update((link.tx, link.rx))
                admitted.append(p)
        delta = max(weights[p][nxt[p]] for p in admitted)
        for p in admitted:
            nxt[p] += 1
        remaining -= len(admitted)
        pairings.append(Pairing(tuple(links), delta))
    return Schedule(tuple(pairings))

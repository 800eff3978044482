"""Concurrent transmission scheduling of path hops into pairings, plus schedule validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .model import Feasibility, Link, RateMatrix, is_matching
from .paths import OpCounter, PathSet

log = logging.getLogger(__name__)


def hop_weight(d: int, c: int) -> int:
    """Slots needed to push ``d`` packets over a link carrying ``c`` packets per slot."""
    if c < 1:
        raise ValueError(f"link rate must be >= 1 packet/slot, got {c}")
    if d < 0:
        raise ValueError("demand must be nonnegative")
    return -(-d // c)


@dataclass(frozen=True)
class Pairing:
    links: tuple[Link, ...]
    slots: int

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset(n for link in self.links for n in (link.tx, link.rx))

    def to_dict(self) -> dict:
        return {"links": [[l.tx, l.rx] for l in self.links], "slots": self.slots}


@dataclass(frozen=True)
class Schedule:
    pairings: tuple[Pairing, ...]

    @property
    def total_slots(self) -> int:
        return sum(p.slots for p in self.pairings)

    def to_dict(self) -> dict:
        return {"total_slots": self.total_slots, "pairings": [p.to_dict() for p in self.pairings]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Schedule":
        pairings = tuple(
            Pairing(tuple(Link(int(tx), int(rx)) for tx, rx in p["links"]), int(p["slots"]))
            for p in data["pairings"]
        )
        return cls(pairings)


def _weights(paths: PathSet, rates: RateMatrix, d: int) -> list[list[int]]:
    return [[hop_weight(d, rates[link]) for link in paths.hops(p)] for p in range(len(paths.paths))]


def schedule(
    paths: PathSet,
    rates: RateMatrix,
    d: int,
    feasibility: Feasibility | None = None,
    counter: OpCounter | None = None,
) -> Schedule:
    """Greedily pack path hops into pairings, longest remaining path first.

    Within a pairing each unvisited path is visited once: among the paths with
    the most unscheduled hops, the one whose next hop is heaviest is tried
    first. A hop joins the pairing when it touches none of the pairing's nodes
    and the pairing stays feasible; otherwise it waits for a later pairing.
    A pairing closes at floor(n/2) links or when every path has been visited.
    """
    feasibility = feasibility or is_matching
    cap = rates.n // 2
    hops = [paths.hops(p) for p in range(len(paths.paths))]
    weights = _weights(paths, rates, d)
    nxt = [0] * len(hops)
    active = [p for p in range(len(hops)) if hops[p]]
    remaining = sum(len(h) for h in hops)

    pairings: list[Pairing] = []
    while remaining:
        if counter:
            counter.tick()
        links: list[Link] = []
        used: set[int] = set()
        delta = 0
        unvisited = list(active)
        while unvisited and len(links) < cap:
            if counter:
                counter.tick(2 * len(unvisited))
            most = max(len(hops[p]) - nxt[p] for p in unvisited)
            # heaviest next hop, then lowest path index
            p = min(
                (q for q in unvisited if len(hops[q]) - nxt[q] == most),
                key=lambda q: (-weights[q][nxt[q]], q),
            )
            link = hops[p][nxt[p]]
            if link.tx not in used and link.rx not in used:
                trial = links + [link]
                if counter:
                    counter.tick(len(trial))
                ok = feasibility(trial)
                if not ok and not links:
                    # rates come from SNR measurement, so a lone link is taken as supportable
                    log.warning("link %s misses its SINR threshold even alone; scheduling it by itself", link)
                    ok = True
                if ok:
                    links = trial
                    used.update((link.tx, link.rx))
                    delta = max(delta, weights[p][nxt[p]])
                    remaining -= 1
                    nxt[p] += 1
                    if nxt[p] == len(hops[p]):
                        active.remove(p)
            unvisited.remove(p)
        pairings.append(Pairing(tuple(links), delta))
    return Schedule(tuple(pairings))


@dataclass
class ValidationReport:
    """Per-family outcome of checking a schedule against the download constraints."""

    coverage: list[str] = field(default_factory=list)
    completion: list[str] = field(default_factory=list)
    precedence: list[str] = field(default_factory=list)
    matching: list[str] = field(default_factory=list)
    concurrency: list[str] = field(default_factory=list)

    FAMILIES = ("coverage", "completion", "precedence", "matching", "concurrency")

    @property
    def ok(self) -> bool:
        return not any(getattr(self, f) for f in self.FAMILIES)

    def passed(self, family: str) -> bool:
        return not getattr(self, family)

    def summary(self) -> dict[str, bool]:
        return {f: self.passed(f) for f in self.FAMILIES}


def validate_schedule(
    sched: Schedule,
    paths: PathSet,
    d: int,
    rates: RateMatrix,
    feasibility: Feasibility | None = None,
) -> ValidationReport:
    """Check a schedule against the path set; violations are collected, never raised.

    ``concurrency`` is only checked when a feasibility closure is given.
    """
    report = ValidationReport()
    wanted = set(paths.links())
    where: dict[Link, list[int]] = {}
    for k, pairing in enumerate(sched.pairings):
        for link in pairing.links:
            where.setdefault(link, []).append(k)
            if link not in wanted:
                report.coverage.append(f"pairing {k}: link {link} is not a path hop")
        if not is_matching(pairing.links):
            report.matching.append(f"pairing {k}: links {[str(l) for l in pairing.links]} share a node")
        if feasibility is not None and pairing.links and not feasibility(pairing.links):
            report.concurrency.append(f"pairing {k}: some link misses its SINR threshold")
        for link in pairing.links:
            c = rates[link]
            if c < 1 or pairing.slots * c < d:
                report.completion.append(
                    f"pairing {k}: link {link} moves {pairing.slots * c} < {d} packets in {pairing.slots} slots"
                )
    for link in sorted(wanted):
        ks = where.get(link, [])
        if len(ks) != 1:
            report.coverage.append(f"link {link} scheduled {len(ks)} times")
    src = paths.source_of
    for u, s in sorted(src.items()):
        if s == paths.ap:
            continue
        upstream = where.get(Link(src[s], s), [])
        down = where.get(Link(s, u), [])
        if upstream and down and not min(upstream) < min(down):
            report.precedence.append(
                f"UE {u} downloads from {s} in pairing {min(down)} before {s} finishes (pairing {min(upstream)})"
            )
    return report

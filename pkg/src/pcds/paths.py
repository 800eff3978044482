"""Rate-greedy selection of AP-rooted multi-hop downloading paths."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import Link, RateMatrix, Topology

log = logging.getLogger(__name__)


class OpCounter:
    """Counts elementary steps (candidate comparisons and loop bodies)."""

    def __init__(self):
        self.count = 0

    def tick(self, k: int = 1) -> None:
        self.count += k


@dataclass(frozen=True)
class PathSet:
    """Downloading paths; each path starts at the AP and every UE is received exactly once."""

    ap: int
    paths: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for path in self.paths:
            if len(path) < 2 or path[0] != self.ap:
                raise ValueError(f"path {path} must start at the AP and have at least one hop")
            for node in path[1:]:
                if node == self.ap or node in seen:
                    raise ValueError(f"node {node} appears more than once as a receiver")
                seen.add(node)

    @property
    def receivers(self) -> list[int]:
        return sorted(u for path in self.paths for u in path[1:])

    @property
    def source_of(self) -> dict[int, int]:
        return {path[h + 1]: path[h] for path in self.paths for h in range(len(path) - 1)}

    @property
    def hop_counts(self) -> list[int]:
        return [len(path) - 1 for path in self.paths]

    @property
    def last_nodes(self) -> list[int]:
        return [path[-1] for path in self.paths]

    def hops(self, p: int) -> list[Link]:
        path = self.paths[p]
        return [Link(path[h], path[h + 1]) for h in range(len(path) - 1)]

    def links(self) -> list[Link]:
        return [link for p in range(len(self.paths)) for link in self.hops(p)]

    def to_dict(self) -> dict:
        return {"ap": self.ap, "paths": [list(p) for p in self.paths]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PathSet":
        return cls(int(data["ap"]), tuple(tuple(int(u) for u in p) for p in data["paths"]))


def max_hops_bound(n_ues: int) -> int:
    """Longest path the greedy selection can build for ``n_ues`` UEs.

    Smallest h with h(h+1)/2 >= n_ues, i.e. ceil((sqrt(1 + 8 n) - 1) / 2).
    """
    if n_ues < 1:
        raise ValueError("need at least one UE")
    h = (math.isqrt(1 + 8 * n_ues) - 1) // 2
    return h if h * (h + 1) // 2 >= n_ues else h + 1


def _argmax(candidates: Iterable[int], score, counter: OpCounter | None) -> int | None:
    # strict '>' keeps the first (lowest id) of equal scores; candidates arrive sorted
    best, best_score = None, None
    for v in candidates:
        if counter:
            counter.tick()
        s = score(v)
        if best is None or s > best_score:
            best, best_score = v, s
    return best


def select_paths(
    rates: RateMatrix,
    ap: int | Topology,
    h_max: int,
    counter: OpCounter | None = None,
) -> PathSet:
    """Build downloading paths from the AP so every UE gets a source with a high rate.

    Alternates between growing paths outward from already-covered nodes (while
    fewer than half the UEs are covered) and letting each remaining UE pick the
    best-rate eligible tail or the AP. A UE serves as a source at most once and
    no path exceeds ``h_max`` hops. Ties go to the lowest node id.
    """
    if isinstance(ap, Topology):
        ap = ap.ap
    if h_max < 1:
        raise ValueError("h_max must be at least 1")
    c = rates.c
    ues = [u for u in range(rates.n) if u != ap]
    if not ues:
        raise ValueError("topology has no UEs")
    bound = max_hops_bound(len(ues))
    if h_max > bound:
        log.warning("h_max=%d exceeds the structural bound %d for %d UEs; clamping", h_max, bound, len(ues))
        h_max = bound

    covered: list[int] = []          # UEs whose source is chosen
    pending = set(ues)               # UEs still without a source
    has_source = {u: False for u in ues}
    is_source = {u: False for u in ues}
    is_source[ap] = False            # the AP may serve any number of UEs
    paths: list[list[int]] = []
    path_by_tail: dict[int, int] = {}

    def extend(p: int, v: int) -> None:
        tail = paths[p][-1]
        del path_by_tail[tail]
        paths[p].append(v)
        path_by_tail[v] = p

    while pending:
        if counter:
            counter.tick()
        added: list[int] = []
        if len(covered) < len(pending):
            u = _argmax(sorted(pending), lambda v: c[ap, v], counter)
            paths.append([ap, u])
            path_by_tail[u] = len(paths) - 1
            has_source[u] = True
            added.append(u)
            for u in sorted(covered):
                if counter:
                    counter.tick()
                p = path_by_tail.get(u)
                if p is None:
                    continue
                if not is_source[u] and len(paths[p]) - 1 < h_max:
                    cands = [v for v in sorted(pending) if not has_source[v]]
                    v = _argmax(cands, lambda v, u=u: c[u, v], counter)
                    if v is None:
                        continue
                    extend(p, v)
                    has_source[v] = True
                    is_source[u] = True
                    added.append(v)
        else:
            tails = [path[-1] for path in paths if len(path) - 1 < h_max and not is_source[path[-1]]]
            if counter:
                counter.tick(len(paths))
            relays = sorted(tails + [ap])
            for u in sorted(pending):
                cands = [v for v in relays if not is_source[v]]
                v = _argmax(cands, lambda v, u=u: c[v, u], counter)
                if v == ap:
                    paths.append([ap, u])
                    path_by_tail[u] = len(paths) - 1
                else:
                    extend(path_by_tail[v], u)
                    is_source[v] = True
                has_source[u] = True
                added.append(u)
        covered.extend(added)
        pending.difference_update(added)

    return PathSet(ap, tuple(tuple(p) for p in paths))

"""Exact minimum-slot scheduling over fixed paths by depth-first branch and bound.

A search state is the progress pointer of every path. Each branch schedules one
pairing: a nonempty, feasible matching drawn from the current frontier (first
unscheduled hop of each path). Costs of a state's subtree do not depend on how the
state was reached, so solved states are memoized; pruning inside a state only uses
that state's own incumbent, which keeps memoized values exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from ..model import Feasibility, RateMatrix, is_matching
from ..paths import PathSet
from ..scheduling import Pairing, Schedule, hop_weight, schedule as greedy_schedule

DEFAULT_MAX_UES = 8


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class ExactSolution:
    schedule: Schedule
    objective: int
    proven: bool
    nodes: int = 0

    def to_dict(self) -> dict:
        return {"objective": self.objective, "proven_optimal": self.proven, "nodes": self.nodes,
                **self.schedule.to_dict()}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def solve_exact(
    paths: PathSet,
    rates: RateMatrix,
    d: int,
    feasibility: Feasibility | None = None,
    budget: int = 200_000,
    max_ues: int = DEFAULT_MAX_UES,
) -> ExactSolution:
    """Provably minimal total slots, or the best known schedule if ``budget`` nodes run out."""
    n_ues = len(paths.receivers)
    if n_ues > max_ues:
        raise ValueError(f"{n_ues} UEs exceeds the exact-solver cap of {max_ues}")
    feasibility = feasibility or is_matching
    hops = [paths.hops(p) for p in range(len(paths.paths))]
    weights = [[hop_weight(d, rates[l]) for l in h] for h in hops]
    P = len(hops)

    def lower_bound(state: Sequence[int]) -> int:
        node_work: dict[int, int] = {}
        best = 0
        for p in range(P):
            rest = 0
            for h in range(state[p], len(hops[p])):
                w = weights[p][h]
                rest += w
                for node in (hops[p][h].tx, hops[p][h].rx):
                    node_work[node] = node_work.get(node, 0) + w
            best = max(best, rest)
        return max(best, max(node_work.values(), default=0))

    def moves(state: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
        """Feasible frontier matchings that cannot be grown by a hop no heavier than their slot count.

        Adding such a hop never lengthens this pairing and only relieves later ones,
        so non-maximal sets are dominated.
        """
        frontier = [p for p in range(P) if state[p] < len(hops[p])]
        frontier.sort(key=lambda p: (-weights[p][state[p]], p))
        found: list[tuple[int, tuple[int, ...]]] = []

        def grow(i: int, chosen: list[int], used: set[int]):
            if i == len(frontier):
                if not chosen:
                    return
                delta = max(weights[p][state[p]] for p in chosen)
                links = [hops[p][state[p]] for p in chosen]
                for q in frontier:
                    if q in chosen or weights[q][state[q]] > delta:
                        continue
                    link = hops[q][state[q]]
                    if link.tx not in used and link.rx not in used and feasibility(links + [link]):
                        return
                found.append((delta, tuple(chosen)))
                return
            p = frontier[i]
            link = hops[p][state[p]]
            if link.tx not in used and link.rx not in used:
                links = [hops[q][state[q]] for q in chosen] + [link]
                if feasibility(links):
                    grow(i + 1, chosen + [p], used | {link.tx, link.rx})
            grow(i + 1, chosen, used)

        grow(0, [], set())
        found.sort(key=lambda m: (m[0] - len(m[1]), m[1]))
        return found

    memo: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
    expanded = 0

    def search(state: tuple[int, ...]) -> int:
        nonlocal expanded
        if all(state[p] == len(hops[p]) for p in range(P)):
            return 0
        hit = memo.get(state)
        if hit is not None:
            return hit[0]
        expanded += 1
        if expanded > budget:
            raise BudgetExhausted
        best, best_move = None, None
        for delta, chosen in moves(state):
            child = list(state)
            for p in chosen:
                child[p] += 1
            child = tuple(child)
            if best is not None and delta + lower_bound(child) >= best:
                continue
            cost = delta + search(child)
            if best is None or cost < best:
                best, best_move = cost, chosen
                if best == lower_bound(state):
                    break
        if best is None:
            raise ValueError("no feasible pairing exists from this state; a lone link misses its SINR threshold")
        memo[state] = (best, best_move)
        return best

    start = tuple(0 for _ in range(P))
    try:
        total = search(start)
    except BudgetExhausted:
        fallback = greedy_schedule(paths, rates, d, feasibility)
        return ExactSolution(fallback, fallback.total_slots, proven=False, nodes=expanded)

    pairings = []
    state = start
    while state in memo:
        _, chosen = memo[state]
        links = tuple(hops[p][state[p]] for p in chosen)
        pairings.append(Pairing(links, max(weights[p][state[p]] for p in chosen)))
        state = tuple(s + (p in chosen) for p, s in enumerate(state))
    sched = Schedule(tuple(pairings))
    assert sched.total_slots == total
    return ExactSolution(sched, total, proven=True, nodes=expanded)

"""Shared helpers: random cells and independent optimum oracles."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from pcds.fixtures import EXAMPLE_6UE_PATHS, example_6ue_rates
from pcds.model import Topology, is_matching, rate_matrix_from_topology
from pcds.paths import select_paths
from pcds.scheduling import hop_weight


@pytest.fixture
def rates6():
    return example_6ue_rates()


@pytest.fixture
def paths6():
    return EXAMPLE_6UE_PATHS


def random_cell(rng: np.random.Generator, n_ues: int = 6, h_max: int | None = None, side: float = 10.0):
    """Uniform cell with the default distance map; paths from the greedy selection."""
    topo = Topology.random(n_ues, rng, side)
    rates = rate_matrix_from_topology(topo)
    h = h_max if h_max is not None else int(rng.integers(1, 5))
    return topo, rates, select_paths(rates, topo, h)


def dp_optimum(paths, rates, d, feasibility=is_matching) -> int:
    """Minimum total slots by dynamic programming over every nonempty feasible frontier subset.

    No dominance rule and no bound: each pairing is any subset of first unscheduled hops.
    """
    hops = [paths.hops(p) for p in range(len(paths.paths))]
    w = [[hop_weight(d, rates[l]) for l in h] for h in hops]

    @lru_cache(maxsize=None)
    def best(state):
        frontier = [p for p, s in enumerate(state) if s < len(hops[p])]
        if not frontier:
            return 0
        out = None
        for r in range(1, len(frontier) + 1):
            for chosen in itertools.combinations(frontier, r):
                links = [hops[p][state[p]] for p in chosen]
                if not feasibility(links):
                    continue
                child = tuple(s + (p in chosen) for p, s in enumerate(state))
                cost = max(w[p][state[p]] for p in chosen) + best(child)
                if out is None or cost < out:
                    out = cost
        if out is None:
            raise ValueError("dead end: no feasible pairing")
        return out

    return best(tuple(0 for _ in hops))


def scipy_solve(inst, relax: bool = False):
    """Solve a MilpInstance with scipy's HiGHS interface; returns (status, objective)."""
    names = sorted(inst.variables)
    idx = {n: i for i, n in enumerate(names)}
    c = np.zeros(len(names))
    for n, v in inst.objective.items():
        c[idx[n]] = float(v)
    lo = np.array([float(inst.variables[n].lb) for n in names])
    hi = np.array([np.inf if inst.variables[n].ub is None else float(inst.variables[n].ub) for n in names])
    integrality = np.array([0 if relax or inst.variables[n].kind == "continuous" else 1 for n in names])
    A = np.zeros((len(inst.constraints), len(names)))
    lb = np.full(len(inst.constraints), -np.inf)
    ub = np.full(len(inst.constraints), np.inf)
    for r, con in enumerate(inst.constraints):
        for n, v in con.coeffs:
            A[r, idx[n]] += float(v)
        if con.sense in (">=", "="):
            lb[r] = float(con.rhs)
        if con.sense in ("<=", "="):
            ub[r] = float(con.rhs)
    res = milp(c, constraints=LinearConstraint(A, lb, ub), bounds=Bounds(lo, hi), integrality=integrality)
    return res.status, (res.fun if res.status == 0 else None)


# one summary line per acceptance criterion, printed after the run
_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[name] = ("PASS" if report.outcome == "passed" else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        status, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{status} {name}" + (f": {detail}" if detail else ""))

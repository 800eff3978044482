"""Mixed integer formulation of minimum-slot scheduling over fixed downloading paths.

The bilinear demand term delta^k * a^k and the pairwise products a^k_u * a^k_v of the
SINR rows are replaced by substitution variables (``xi`` and ``omega``) tied down by
bound-factor product inequalities, which makes the model linear.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..model import InterferenceMode, Link, RadioParams, RateMatrix, Topology, _power, received_power
from ..paths import PathSet
from ..scheduling import Schedule, hop_weight

log = logging.getLogger(__name__)

Number = int | float | Fraction


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "continuous" | "integer" | "binary"
    lb: Number = 0
    ub: Number | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[str, Number], ...]
    sense: str  # ">=", "<=", "="
    rhs: Number

    def activity(self, values: Mapping[str, Number]) -> Number:
        return sum(c * values[v] for v, c in self.coeffs)

    def satisfied(self, values: Mapping[str, Number], tol: float = 0.0) -> bool:
        lhs = self.activity(values)
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class MilpInstance:
    variables: dict[str, Variable]
    constraints: list[Constraint]
    objective: dict[str, Number]
    K: int = 0
    t_bar: int = 0
    ues: tuple[int, ...] = ()
    source_of: dict[int, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def family(self, prefix: str) -> list[Constraint]:
        return [c for c in self.constraints if c.name.split("_", 1)[0] == prefix]

    def violations(self, values: Mapping[str, Number], tol: float = 0.0) -> list[str]:
        """Names of constraints or bounds broken by ``values``."""
        bad = []
        for var in self.variables.values():
            x = values[var.name]
            if x < var.lb - tol or (var.ub is not None and x > var.ub + tol):
                bad.append(f"bound:{var.name}")
            if var.kind in ("binary", "integer") and x != int(x):
                bad.append(f"integrality:{var.name}")
        bad.extend(c.name for c in self.constraints if not c.satisfied(values, tol))
        return bad

    def objective_value(self, values: Mapping[str, Number]) -> Number:
        return sum(c * values[v] for v, c in self.objective.items())


def delta_name(k: int) -> str:
    return f"delta_{k}"


def a_name(k: int, s: int, u: int) -> str:
    return f"a_{k}_{s}_{u}"


def xi_name(k: int, s: int, u: int) -> str:
    return f"xi_{k}_{s}_{u}"


def omega_name(k: int, u: int, v: int) -> str:
    return f"omega_{k}_{u}_{v}"


def default_K(paths: PathSet) -> int:
    return max(paths.hop_counts) + len(paths.receivers)


def build_milp(
    paths: PathSet,
    rates: RateMatrix,
    d: int,
    params: RadioParams | None = None,
    K: int | None = None,
    interference: InterferenceMode | str = InterferenceMode.OFF,
    topo: Topology | None = None,
) -> MilpInstance:
    """Assemble the linearized model for ``K`` pairings.

    Families (constraint name prefixes): ``once`` each UE downloads in exactly one
    pairing; ``demand`` slots times rate covers ``d``; ``prec`` a UE's source is served
    in an earlier pairing (cumulative form); ``adj`` adjacent links never share a
    pairing; ``rltxi``/``rltom`` bound-factor products; ``sinr`` linearized SINR rows,
    scaled by the noise power, only when interference is on.

    Pairing slot counts are declared integer.
    """
    interference = InterferenceMode(interference)
    K = default_K(paths) if K is None else K
    src = paths.source_of
    ues = tuple(sorted(src))
    weights = {u: hop_weight(d, rates[src[u], u]) for u in ues}
    t_bar = max(weights.values(), default=0)
    inst = MilpInstance({}, [], {}, K=K, t_bar=t_bar, ues=ues, source_of=dict(src))
    if K < max(paths.hop_counts):
        msg = f"K={K} is below the longest path ({max(paths.hop_counts)} hops); precedence makes the model infeasible"
        log.warning(msg)
        inst.warnings.append(msg)

    def var(name, kind, lb=0, ub=None):
        inst.variables[name] = Variable(name, kind, lb, ub)

    def row(name, coeffs, sense, rhs):
        inst.constraints.append(Constraint(name, tuple(coeffs), sense, rhs))

    ks = range(1, K + 1)
    for k in ks:
        var(delta_name(k), "integer", 0, t_bar)
        inst.objective[delta_name(k)] = 1
        for u in ues:
            var(a_name(k, src[u], u), "binary", 0, 1)
            var(xi_name(k, src[u], u), "continuous", 0, None)
        for u in ues:
            for v in ues:
                if u != v:
                    var(omega_name(k, u, v), "continuous", 0, None)

    for u in ues:
        s = src[u]
        row(f"once_u{u}", [(a_name(k, s, u), 1) for k in ks], "=", 1)
        if d > 0:
            row(f"demand_u{u}", [(xi_name(k, s, u), rates[s, u]) for k in ks], ">=", d)
        if s != paths.ap:
            for kk in ks:
                coeffs = [(a_name(k, src[s], s), 1) for k in range(1, kk + 1)]
                coeffs += [(a_name(k, s, u), -1) for k in range(1, kk + 1)]
                row(f"prec_u{u}_k{kk}", coeffs, ">=", 0)

    adjacent = [
        (u, v) for i, u in enumerate(ues) for v in ues[i + 1:]
        if Link(src[u], u).adjacent(Link(src[v], v))
    ]
    for k in ks:
        for u, v in adjacent:
            row(f"adj_k{k}_u{u}_v{v}", [(a_name(k, src[u], u), 1), (a_name(k, src[v], v), 1)], "<=", 1)

    for k in ks:
        dk = delta_name(k)
        for u in ues:
            a, xi = a_name(k, src[u], u), xi_name(k, src[u], u)
            row(f"rltxi_k{k}_u{u}_1", [(xi, 1)], ">=", 0)
            row(f"rltxi_k{k}_u{u}_2", [(dk, 1), (xi, -1)], ">=", 0)
            row(f"rltxi_k{k}_u{u}_3", [(a, t_bar), (xi, -1)], ">=", 0)
            row(f"rltxi_k{k}_u{u}_4", [(dk, -1), (a, -t_bar), (xi, 1)], ">=", -t_bar)
        for u in ues:
            for v in ues:
                if u == v:
                    continue
                au, av, om = a_name(k, src[u], u), a_name(k, src[v], v), omega_name(k, u, v)
                row(f"rltom_k{k}_u{u}_v{v}_1", [(om, 1)], ">=", 0)
                row(f"rltom_k{k}_u{u}_v{v}_2", [(au, 1), (om, -1)], ">=", 0)
                row(f"rltom_k{k}_u{u}_v{v}_3", [(av, 1), (om, -1)], ">=", 0)
                row(f"rltom_k{k}_u{u}_v{v}_4", [(au, -1), (av, -1), (om, 1)], ">=", -1)

    if interference is InterferenceMode.SINR:
        if params is None or topo is None:
            raise ValueError("SINR rows need radio parameters and a topology")
        noise = params.noise_mw
        for u in ues:
            s = src[u]
            gamma = params.gamma(rates[s, u])
            snr = received_power(params, Link(s, u), topo) / noise
            interferers = [v for v in ues if v != u and not Link(s, u).adjacent(Link(src[v], v))]
            for k in ks:
                coeffs = [(a_name(k, s, u), snr - gamma)]
                coeffs += [
                    (omega_name(k, u, v), -gamma * params.mui_factor * _power(params, src[v], u, topo) / noise)
                    for v in interferers
                ]
                row(f"sinr_k{k}_u{u}", coeffs, ">=", 0)
    return inst


def solution_values(inst: MilpInstance, sched: Schedule) -> dict[str, int]:
    """Integer point of the model that encodes ``sched``; substitution variables are the exact products."""
    if len(sched.pairings) > inst.K:
        raise ValueError(f"schedule has {len(sched.pairings)} pairings but the model only {inst.K}")
    src = inst.source_of
    values: dict[str, int] = {name: 0 for name in inst.variables}
    for k in range(1, inst.K + 1):
        pairing = sched.pairings[k - 1] if k <= len(sched.pairings) else None
        delta = pairing.slots if pairing else 0
        members = {link.rx for link in pairing.links} if pairing else set()
        values[delta_name(k)] = delta
        for u in inst.ues:
            a = int(u in members)
            values[a_name(k, src[u], u)] = a
            values[xi_name(k, src[u], u)] = delta * a
        for u in inst.ues:
            for v in inst.ues:
                if u != v:
                    values[omega_name(k, u, v)] = int(u in members) * int(v in members)
    return values


def rlt_implied_range(inst: MilpInstance, values: Mapping[str, Number], name: str) -> tuple[Number, Number]:
    """Interval a substitution variable may take given the other variables of its bound-factor rows.

    At integral ``a`` the interval collapses to the single product value.
    """
    lo, hi = Fraction(-10**18), Fraction(10**18)
    prefix = "rltxi_" if name.startswith("xi_") else "rltom_"
    for con in inst.constraints:
        if not con.name.startswith(prefix):
            continue
        coeffs = dict(con.coeffs)
        if name not in coeffs:
            continue
        c = Fraction(coeffs[name])
        rest = sum(Fraction(cv) * Fraction(values[v]) for v, cv in con.coeffs if v != name)
        # c * x + rest >= rhs
        bound = (Fraction(con.rhs) - rest) / c
        if c > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    return lo, hi

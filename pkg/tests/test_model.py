import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcds.model import (
    DEFAULT_K0,
    AdjacencyError,
    DistanceRateMap,
    InterferenceMode,
    Link,
    RadioParams,
    RateMatrix,
    Topology,
    interference_power,
    make_feasibility,
    pairing_feasible,
    rate_matrix_from_topology,
    received_power,
    sinr,
)

UNIT = RadioParams(tx_power_mw=1.0, k0=1.0, path_loss_exp=2.0, mui_factor=1.0)


def line_topology(*xs, side=10.0):
    pos = [[x, 0.0] for x in xs]
    return Topology(np.array(pos), ap=0, area=(side, side))


def test_received_power_unit_factors():
    topo = line_topology(0.0, 1.0, 2.0)
    assert received_power(UNIT, Link(0, 1), topo) == pytest.approx(1.0)
    assert received_power(UNIT, Link(0, 2), topo) == pytest.approx(0.25)


def test_received_power_default_params_by_hand():
    topo = line_topology(0.0, 5.0)
    wavelength = 299_792_458.0 / 60e9
    k0 = (wavelength / (4 * math.pi)) ** 2
    expected = k0 * 1.0 * 1.0 * 5.0 ** -2.17 * 500.0
    assert DEFAULT_K0 == pytest.approx(k0)
    assert received_power(RadioParams(), Link(0, 1), topo) == pytest.approx(expected, rel=1e-12)


def test_received_power_colocated_raises():
    topo = line_topology(1.0, 1.0)
    with pytest.raises(ValueError, match="co-located"):
        received_power(UNIT, Link(0, 1), topo)


def test_gain_callables_are_per_direction():
    topo = line_topology(0.0, 1.0)
    params = RadioParams(tx_power_mw=1, k0=1, path_loss_exp=2, tx_gain=lambda t, r: 2.0 if t == 0 else 1.0)
    assert received_power(params, Link(0, 1), topo) == pytest.approx(2.0)
    assert received_power(params, Link(1, 0), topo) == pytest.approx(1.0)


def test_interference_examples():
    # victim 3->0 receives at x=0; interferers transmit from x=1 and x=2
    topo = Topology(np.array([[0, 0], [1, 0], [2, 0], [0, 5], [5, 5], [6, 5]], float), ap=3)
    victim = Link(3, 0)
    assert interference_power(UNIT, victim, [], topo) == 0.0
    two = [Link(1, 4), Link(2, 5)]
    assert interference_power(UNIT, victim, two, topo) == pytest.approx(1.25)
    no_mui = RadioParams(tx_power_mw=1, k0=1, path_loss_exp=2, mui_factor=0.0)
    assert interference_power(no_mui, victim, two, topo) == 0.0


def test_interference_adjacent_raises_with_pair():
    topo = line_topology(0.0, 1.0, 2.0)
    with pytest.raises(AdjacencyError) as err:
        interference_power(UNIT, Link(0, 1), [Link(1, 2)], topo)
    assert err.value.pair == (Link(0, 1), Link(1, 2))


def test_sinr_noise_only_and_zero_mui():
    topo = Topology(np.array([[0, 0], [1, 0], [4, 4], [5, 4]], float), ap=0)
    p = RadioParams()
    alone = sinr(p, Link(0, 1), [], topo)
    assert alone == pytest.approx(received_power(p, Link(0, 1), topo) / p.noise_mw)
    quiet = RadioParams(mui_factor=0.0)
    assert sinr(quiet, Link(0, 1), [Link(2, 3)], topo) == pytest.approx(sinr(quiet, Link(0, 1), [], topo))


def test_sinr_three_links_term_by_term():
    rng = np.random.default_rng(3)
    topo = Topology(rng.uniform(0, 10, (6, 2)), ap=0)
    p = RadioParams(mui_factor=0.2)
    links = [Link(0, 1), Link(2, 3), Link(4, 5)]

    def pw(t, r):
        return p.k0 * p.tx_power_mw * topo.distance(t, r) ** -p.path_loss_exp

    for i, link in enumerate(links):
        others = links[:i] + links[i + 1:]
        expected = pw(link.tx, link.rx) / (p.noise_psd_mw_per_hz * p.bandwidth_hz
                                           + p.mui_factor * sum(pw(o.tx, link.rx) for o in others))
        assert sinr(p, link, others, topo) == pytest.approx(expected, rel=1e-12)


def test_pairing_feasible_examples():
    rng = np.random.default_rng(11)
    topo = Topology(rng.uniform(0, 10, (6, 2)), ap=0)
    rates = RateMatrix(np.where(np.eye(6, dtype=bool), 0, 1))
    p = RadioParams(sinr_thresholds={1: 4.0})
    assert not pairing_feasible(p, [Link(0, 1), Link(1, 2)], rates, topo, "sinr")
    assert not pairing_feasible(p, [Link(0, 1), Link(2, 1)], rates, topo, "off")
    single = [Link(0, 1)]
    assert pairing_feasible(p, single, rates, topo, "sinr") == (sinr(p, single[0], [], topo) >= 4.0)
    links = [Link(0, 1), Link(2, 3), Link(4, 5)]
    manual = all(sinr(p, l, [o for o in links if o != l], topo) >= p.gamma(rates[l]) for l in links)
    assert pairing_feasible(p, links, rates, topo, InterferenceMode.SINR) == manual


def test_sinr_mode_needs_geometry():
    rates = RateMatrix([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        pairing_feasible(None, [Link(0, 1)], rates, None, "sinr")
    with pytest.raises(ValueError):
        make_feasibility("sinr")


def test_rate_matrix_bands():
    topo = Topology(np.array([[0, 0], [1, 0], [3, 0], [9, 0]], float), ap=0)
    dmap = DistanceRateMap((2.0, 5.0), (3, 2, 1))
    r = rate_matrix_from_topology(topo, dmap)
    assert [r[i, i] for i in range(4)] == [0, 0, 0, 0]
    assert r[0, 1] == 3 and r[0, 2] == 2 and r[0, 3] == 1


def test_rate_matrix_eleven_nodes_matches_bands():
    topo = Topology.random(10, np.random.default_rng(5))
    dmap = DistanceRateMap.default()
    r = rate_matrix_from_topology(topo, dmap)
    lo, hi = dmap.thresholds
    for i in range(topo.n):
        for j in range(topo.n):
            if i == j:
                continue
            dist = math.dist(topo.positions[i], topo.positions[j])
            assert r[i, j] == (3 if dist < lo else 2 if dist < hi else 1)
    assert set(r.c[~np.eye(topo.n, dtype=bool)].tolist()) <= {1, 2, 3}


def test_default_map_reproduces_link_mix():
    dmap = DistanceRateMap.default()
    rng = np.random.default_rng(0)
    a, b = rng.uniform(0, 10, (200_000, 2)), rng.uniform(0, 10, (200_000, 2))
    dist = np.hypot(*(a - b).T)
    assert np.mean(dist < dmap.thresholds[0]) == pytest.approx(6 / 42, abs=0.005)
    assert np.mean((dist >= dmap.thresholds[0]) & (dist < dmap.thresholds[1])) == pytest.approx(8 / 42, abs=0.005)


def test_equal_bands_split_the_diagonal():
    dmap = DistanceRateMap.equal_bands(10.0)
    diag = math.hypot(10, 10)
    assert dmap.thresholds == pytest.approx((diag / 3, 2 * diag / 3))


@pytest.mark.parametrize("kw", [
    {"tx_power_mw": 0}, {"k0": -1}, {"mui_factor": -0.1}, {"bandwidth_hz": 0},
    {"sinr_thresholds": {1: 16.0, 2: 4.0}},
])
def test_radio_params_invariants(kw):
    with pytest.raises(ValueError):
        RadioParams(**kw)


@pytest.mark.parametrize("bad", [
    dict(thresholds=(5.0, 2.0), rates=(3, 2, 1)),
    dict(thresholds=(2.0, 5.0), rates=(1, 2, 3)),
    dict(thresholds=(2.0,), rates=(3, 2, 1)),
])
def test_distance_map_invariants(bad):
    with pytest.raises(ValueError):
        DistanceRateMap(**bad)


def test_rate_matrix_invariants():
    with pytest.raises(ValueError):
        RateMatrix([[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        RateMatrix([[0, -1], [1, 0]])
    with pytest.raises(ValueError):
        Link(2, 2)


def test_topology_invariants_and_roundtrip():
    topo = Topology.random(4, np.random.default_rng(1))
    assert topo.ap == 4 and topo.positions[4].tolist() == [5.0, 5.0]
    again = Topology.from_dict(topo.to_dict())
    assert np.array_equal(again.positions, topo.positions) and again.ap == topo.ap
    with pytest.raises(ValueError):
        Topology(np.array([[0, 0], [11, 0]], float), ap=0)
    with pytest.raises(ValueError):
        Topology(np.array([[0, 0]], float), ap=0)
    data = topo.to_dict()
    data["nodes"][0]["is_ap"] = True
    with pytest.raises(ValueError, match="exactly one"):
        Topology.from_dict(data)


coords = st.floats(0.1, 9.9, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 5.0), st.floats(0.01, 4.0))
def test_received_power_decreases_with_distance(l, extra):
    topo = line_topology(0.0, l, l + extra)
    p = RadioParams()
    assert received_power(p, Link(0, 2), topo) < received_power(p, Link(0, 1), topo)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=8, max_size=8, unique=True), st.floats(0, 1))
def test_interference_additive_and_sinr_monotone(points, rho):
    topo = Topology(np.array(points), ap=0)
    if min(topo.distance(i, j) for i in range(8) for j in range(i + 1, 8)) < 1e-6:
        return
    p = RadioParams(mui_factor=rho)
    victim = Link(0, 1)
    s1, s2 = [Link(2, 3), Link(4, 5)], [Link(6, 7)]
    total = interference_power(p, victim, s1 + s2, topo)
    assert total == pytest.approx(interference_power(p, victim, s1, topo) + interference_power(p, victim, s2, topo))
    assert sinr(p, victim, s1 + s2, topo) <= sinr(p, victim, s1, topo) + 1e-15


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=8, max_size=8, unique=True),
       st.sampled_from([0.01, 0.3, 1.0]))
def test_feasibility_antitone(points, rho):
    topo = Topology(np.array(points), ap=0)
    if min(topo.distance(i, j) for i in range(8) for j in range(i + 1, 8)) < 1e-6:
        return
    rates = rate_matrix_from_topology(topo)
    p = RadioParams(mui_factor=rho, path_loss_exp=3.0)
    links = [Link(0, 1), Link(2, 3), Link(4, 5), Link(6, 7)]
    for k in range(1, 4):
        if not pairing_feasible(p, links[:k], rates, topo, "sinr"):
            assert not pairing_feasible(p, links[:k + 1], rates, topo, "sinr")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=6, max_size=6, unique=True),
       st.lists(st.tuples(coords, coords), min_size=6, max_size=6, unique=True))
def test_mode_off_ignores_positions(a, b):
    rates = RateMatrix(np.where(np.eye(6, dtype=bool), 0, 2))
    ta, tb = Topology(np.array(a), ap=0), Topology(np.array(b), ap=0)
    for links in ([Link(0, 1), Link(2, 3)], [Link(0, 1), Link(1, 2)], [Link(0, 1), Link(2, 3), Link(4, 5)]):
        assert pairing_feasible(None, links, rates, ta, "off") == pairing_feasible(RadioParams(), links, rates, tb, "off")

import csv
import json

import numpy as np
import pytest

import pcds.experiment as experiment
from pcds.config import Config, ConfigError, load_config, parse_config
from pcds.experiment import COLUMNS, ExperimentSpec, ci_half_width, run_experiment, summarize, write_csv
from pcds.model import DistanceRateMap, Topology
from pcds.sim import Scheme


def small_spec(**kw):
    cfg = parse_config({
        "frame": {"horizon_slots": 10_000, "delay_threshold_slots": 2_000},
        "experiment": {"replications": 2, "loads": [3.0], "h_max": [4]},
    })
    return ExperimentSpec.from_config(cfg, **kw)


def test_default_config_matches_library_defaults():
    cfg = Config()
    assert cfg.radio.params().path_loss_exp == 2.17
    assert cfg.radio.distance_map(10.0) == DistanceRateMap.default(10.0)
    assert cfg.radio.model_copy(update={"bands": "equal"}).distance_map(10.0) == DistanceRateMap.equal_bands(10.0)
    assert cfg.frame.config().overhead_slots == 4
    assert cfg.traffic.config(n_ues=10).lam == 25_000


@pytest.mark.parametrize("data,field", [
    ({"radio": {"mui_factor": -1}}, "radio.mui_factor"),
    ({"traffic": {"p1": 0.9}}, "traffic"),
    ({"experiment": {"loads": []}}, "experiment.loads"),
    ({"experiment": {"replications": 0}}, "experiment.replications"),
    ({"experiment": {"schemes": ["TDMA"]}}, "experiment.schemes"),
    ({"frame": {"horizon_slots": 0}}, "frame.horizon_slots"),
    ({"topology": {"source": "file"}}, "topology"),
    ({"radio": {"sinr_thresholds": {"1": 9, "2": 3}}}, "radio.sinr_thresholds"),
    ({"colour": 1}, "colour"),
])
def test_invalid_config_names_field(data, field):
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert field in str(err.value)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": {"loads": [1, 2]}}))
    assert load_config(p).experiment.loads == [1.0, 2.0]
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(p)
    assert load_config(None) == Config()


def test_spec_invariants():
    with pytest.raises(ValueError):
        small_spec(loads=())
    with pytest.raises(ValueError):
        small_spec(replications=0)


def test_single_cell_single_row():
    rows = run_experiment(small_spec(schemes=(Scheme.PCDS,), replications=1))
    assert len(rows) == 1
    row = rows[0]
    assert set(row) == set(COLUMNS)
    assert row["scheme"] == "PCDS" and row["seed"] == 1 and row["error"] == ""


def test_rows_are_reproducible_and_worker_independent():
    spec = small_spec()
    serial = run_experiment(spec)
    assert serial == run_experiment(spec)
    assert serial == run_experiment(spec, workers=2)
    assert len(serial) == 2 * 3


def test_schemes_share_topology_and_arrivals():
    spec = small_spec(replications=1, schemes=(Scheme.PCDS, Scheme.FDMAC_H), h_max=(1,))
    rows = run_experiment(spec)
    # with one-hop paths both schedulers produce the same star schedule
    assert rows[0]["throughput"] == rows[1]["throughput"]
    assert rows[0]["avg_delay"] == rows[1]["avg_delay"]


def test_failing_cell_is_isolated(monkeypatch):
    real = experiment.run_simulation

    def flaky(topo, rates, tcfg, fcfg, **kw):
        if fcfg.scheme is Scheme.FDMAC_H:
            raise RuntimeError("boom")
        return real(topo, rates, tcfg, fcfg, **kw)

    monkeypatch.setattr(experiment, "run_simulation", flaky)
    rows = run_experiment(small_spec(replications=1))
    errors = {r["scheme"]: r["error"] for r in rows}
    assert errors["FDMAC-H"] == "RuntimeError: boom"
    assert errors["PCDS"] == "" and errors["SBTS"] == ""
    assert [r for r in rows if r["scheme"] == "FDMAC-H"][0]["throughput"] == ""


def test_file_topology(tmp_path):
    topo = Topology.random(5, np.random.default_rng(0))
    path = tmp_path / "topo.json"
    path.write_text(json.dumps(topo.to_dict()))
    spec = small_spec(topology_source="file", topology_file=str(path), replications=1)
    rows = run_experiment(spec)
    assert all(r["error"] == "" for r in rows)


def test_csv_header_and_summary(tmp_path):
    rows = run_experiment(small_spec())
    out = tmp_path / "r.csv"
    write_csv(rows, out)
    with open(out) as fh:
        reader = csv.reader(fh)
        assert next(reader) == list(COLUMNS)
        assert sum(1 for _ in reader) == len(rows)
    summary = summarize(rows)
    assert len(summary) == 3 and all(s["n"] == 2 for s in summary)
    pcds = next(s for s in summary if s["scheme"] == "PCDS")
    vals = [r["throughput"] for r in rows if r["scheme"] == "PCDS"]
    assert pcds["throughput"]["mean"] == pytest.approx(np.mean(vals))
    assert pcds["throughput"]["ci95"] == pytest.approx(ci_half_width(vals))


def test_ci_half_width():
    assert ci_half_width([1.0]) == 0.0
    # t(0.975, 3) = 3.182446
    assert ci_half_width([1, 2, 3, 4]) == pytest.approx(3.182446 * np.std([1, 2, 3, 4], ddof=1) / 2, rel=1e-6)


def test_event_logs_written(tmp_path):
    run_experiment(small_spec(replications=1, schemes=(Scheme.SBTS,)), event_dir=str(tmp_path / "ev"))
    files = list((tmp_path / "ev").glob("*.csv"))
    assert len(files) == 1 and files[0].read_text().startswith("slot,type,link,packet")

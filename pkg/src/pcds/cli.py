"""Command-line entry point: ``pcds simulate | schedule | milp export | milp solve | fixture``."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .baselines import fdmach_schedule, sbts_paths, sbts_schedule
from .config import ConfigError, load_config
from .experiment import ExperimentSpec, run_experiment, write_csv, write_summary
from .fixtures import FIXTURES, export_fixture
from .milp import build_milp, export_milp, solve_exact
from .model import InterferenceMode, RateMatrix, Topology, make_feasibility
from .paths import select_paths
from .scheduling import schedule as pcds_schedule
from .sim import Scheme
from .traffic import TrafficMode

SCHEMES = [s.value for s in Scheme]
MODES = [m.value for m in InterferenceMode]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _load_instance(matrix: str, topology: str | None, interference: str, config: str | None):
    """Rate matrix file ``{"ap": id, "rates": [[...]]}`` plus the feasibility oracle it implies."""
    data = json.loads(Path(matrix).read_text())
    try:
        rates, ap = RateMatrix(data["rates"]), int(data["ap"])
    except KeyError as exc:
        raise click.BadParameter(f"matrix file lacks field {exc}", param_hint="--matrix") from None
    mode = InterferenceMode(interference)
    feasibility, topo = None, None
    if topology:
        topo = Topology.from_dict(json.loads(Path(topology).read_text()))
    if mode is InterferenceMode.SINR:
        if topo is None:
            raise click.BadParameter("SINR checks need node positions", param_hint="--topology")
        feasibility = make_feasibility(mode, load_config(config).radio.params(), rates, topo)
    return rates, ap, topo, feasibility


def _instance_options(f):
    f = click.option("--config", type=click.Path(exists=True, dir_okay=False), help="Config file for radio parameters.")(f)
    f = click.option("--interference", type=click.Choice(MODES), default="off", show_default=True)(f)
    f = click.option("--topology", type=click.Path(exists=True, dir_okay=False), help="Topology JSON (needed for sinr).")(f)
    f = click.option("-d", "--demand", type=int, required=True, help="Packets per UE.")(f)
    f = click.option("--hmax", type=int, default=4, show_default=True)(f)
    f = click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)(f)
    return f


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress and warnings.")
def main(verbose: bool) -> None:
    """Popular-content downloading schedulers and frame simulator."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output (overrides experiment.out).")
@click.option("--seed", type=int, help="Base seed.")
@click.option("--scheme", "schemes", type=click.Choice(SCHEMES), multiple=True)
@click.option("--hmax", "hmaxes", type=int, multiple=True)
@click.option("--load", "loads", type=float, multiple=True)
@click.option("--interference", type=click.Choice(MODES))
@click.option("--traffic", type=click.Choice([m.value for m in TrafficMode]))
@click.option("--replications", type=int)
@click.option("--workers", type=int, help="Worker processes (overrides experiment.workers).")
@click.option("--summary", type=click.Path(dir_okay=False), help="JSON summary of means and 95% CIs.")
@click.option("--events", type=click.Path(file_okay=False), help="Directory for per-replication event logs.")
def simulate(config, out, seed, schemes, hmaxes, loads, interference, traffic, replications, workers, summary, events):
    """Run the configured sweep and write one CSV row per replication."""
    try:
        cfg = load_config(config)
        spec = ExperimentSpec.from_config(
            cfg,
            out=out, base_seed=seed, interference=interference, traffic_mode=traffic, replications=replications,
            schemes=tuple(schemes) or None, h_max=tuple(hmaxes) or None, loads=tuple(loads) or None,
        )
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None
    rows = run_experiment(spec, workers=workers or cfg.experiment.workers, event_dir=events)
    write_csv(rows, spec.out)
    summary = summary or cfg.experiment.summary
    if summary:
        write_summary(rows, summary)
    failed = sum(1 for r in rows if r["error"])
    click.echo(f"{len(rows)} rows -> {spec.out}" + (f" ({failed} failed)" if failed else ""), err=True)


@main.command("schedule")
@_instance_options
@click.option("--scheme", type=click.Choice(SCHEMES), default="PCDS", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def schedule_cmd(matrix, hmax, demand, topology, interference, config, scheme, out):
    """Select paths and schedule one frame; dump paths and pairings as JSON."""
    rates, ap, _, feasibility = _load_instance(matrix, topology, interference, config)
    scheme = Scheme(scheme)
    if scheme is Scheme.SBTS:
        paths, sched = sbts_paths(rates, ap), sbts_schedule(rates, ap, demand)
    else:
        paths = select_paths(rates, ap, hmax)
        build = pcds_schedule if scheme is Scheme.PCDS else fdmach_schedule
        sched = build(paths, rates, demand, feasibility)
    payload = {"scheme": scheme.value, "d": demand, "paths": paths.to_dict(), **sched.to_dict()}
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


@main.group()
def milp() -> None:
    """Exact formulation export and exact solving."""


@milp.command("export")
@_instance_options
@click.option("--K", "K", type=int, help="Number of pairings in the formulation.")
@click.option("--out", type=click.Path(dir_okay=False))
def milp_export(matrix, hmax, demand, topology, interference, config, K, out):
    """Write the linearized program in LP format."""
    rates, ap, topo, _ = _load_instance(matrix, topology, interference, config)
    paths = select_paths(rates, ap, hmax)
    params = load_config(config).radio.params() if interference == "sinr" else None
    inst = build_milp(paths, rates, demand, params=params, K=K, interference=interference, topo=topo)
    for w in inst.warnings:
        click.echo(f"warning: {w}", err=True)
    _emit(export_milp(inst), out)


@milp.command("solve")
@_instance_options
@click.option("--budget", type=int, default=200_000, show_default=True, help="Search node budget.")
@click.option("--out", type=click.Path(dir_okay=False))
def milp_solve(matrix, hmax, demand, topology, interference, config, budget, out):
    """Minimum total slots over the selected paths."""
    rates, ap, _, feasibility = _load_instance(matrix, topology, interference, config)
    paths = select_paths(rates, ap, hmax)
    try:
        sol = solve_exact(paths, rates, demand, feasibility, budget=budget)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    if not sol.proven:
        click.echo("warning: node budget exhausted; result is not proven optimal", err=True)
    _emit(sol.dumps(), out)


@main.command()
@click.argument("name", type=click.Choice(FIXTURES))
@click.option("--out", type=click.Path(file_okay=False), required=True)
def fixture(name, out):
    """Write golden files for a named fixture."""
    for path in export_fixture(name, out):
        click.echo(str(path))


if __name__ == "__main__":
    sys.exit(main())

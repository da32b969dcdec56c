#!/usr/bin/env python3
import logging
import math
import sys
from pathlib import Path

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from lattice.parameters import critical_h, critical_h_bounds, default_cap, kappa, typical_heights
from utils.config_loader import ConfigLoader
from utils.data_models import Parameters
from utils.errors import ConfigError, DomainError
from utils.report_writer import ReportWriter
import config

console = Console()


def setup_logging(level: str = config.LOG_LEVEL) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}" if math.isfinite(value) else str(value)
    return str(value)


@click.group()
@click.option("--log-level", default=config.LOG_LEVEL, show_default=True, help="Logging level")
def cli(log_level):
    """SOS surface above a hard wall: exact oracle, heat-bath sampler, experiments"""
    setup_logging(log_level.upper())


@cli.command()
@click.argument("config_file", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--experiment", "-e", type=click.Choice(sorted(
    ["oracle-verify", "sampler-validate", "domination", "subcritical-height", "critical-zeros", "critical-height-explore"]
)), help="Experiment to run")
@click.option("--beta", type=float, help="Inverse temperature")
@click.option("--h", "h_abs", type=float, multiple=True, help="Absolute pinning value (repeatable)")
@click.option("--h-frac", type=float, multiple=True, help="Pinning as a fraction of h_w (repeatable)")
@click.option("--N", "N", type=int, multiple=True, help="Lattice side (repeatable)")
@click.option("--sweeps", type=int, help="Total sweeps per chain")
@click.option("--burn-in", type=int, help="Sweeps discarded before sampling")
@click.option("--thinning", type=int, help="Keep every n-th sweep")
@click.option("--cap", type=int, help="Height cap M (default ceil(log N / 2beta) + 8)")
@click.option("--m", "m", type=int, multiple=True, help="Excess offsets m (repeatable)")
@click.option("--C", "C", type=float, multiple=True, help="Event constants C (repeatable)")
@click.option("--initial", type=click.Choice(["zero", "typical"]), help="Initial field")
@click.option("--seed", type=int, help="Master seed")
@click.option("--workers", type=int, help="Parallel chains")
@click.option("--threads", type=int, help="Numba threads per chain (0 = default)")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), help="Output root directory")
def run(config_file, experiment, beta, h_abs, h_frac, N, sweeps, burn_in, thinning, cap, m, C,
        initial, seed, workers, threads, out):
    """Run an experiment and write config.json, series.csv, summary.json, verify.json"""
    from workflows.experiment_workflow import ExperimentWorkflow

    if h_abs and h_frac:
        raise click.UsageError("--h and --h-frac are mutually exclusive")
    overrides = {
        "experiment": experiment, "beta": beta, "N": list(N) or None, "sweeps": sweeps,
        "burn_in": burn_in, "thinning": thinning, "cap": cap, "m": list(m) or None,
        "C": list(C) or None, "initial": initial, "seed": seed, "workers": workers,
        "threads": threads, "out": out,
    }
    if h_abs:
        overrides.update(h=list(h_abs), h_mode="absolute")
    elif h_frac:
        overrides.update(h=list(h_frac), h_mode="fraction_of_hw")

    try:
        cfg = ConfigLoader.load(config_file, **overrides)
    except ConfigError as e:
        raise click.UsageError(str(e))

    console.print(f"[cyan]Experiment {cfg.experiment}: beta={cfg.beta}, N={cfg.N}, "
                  f"h={[round(h, 8) for h in cfg.resolved_h]}[/cyan]")
    with console.status(f"[cyan]Running {cfg.experiment}...[/cyan]"):
        result = ExperimentWorkflow().run(cfg)

    if result.get("error"):
        console.print(f"[red]Error: {result['error']}[/red]")
    outcome = result.get("outcome")
    if outcome is not None and outcome.checks:
        table = Table(title="Verification")
        table.add_column("Check", style="cyan")
        table.add_column("Parameters", style="white", overflow="fold", max_width=50)
        table.add_column("LHS", justify="right")
        table.add_column("RHS", justify="right")
        table.add_column("Result")
        for check in outcome.checks:
            kind = "hard" if check.hard else ("exploratory" if check.exploratory else "soft")
            mark = "[green]✓[/green]" if check.passed else ("[red]✗[/red]" if check.hard else "[yellow]✗[/yellow]")
            params = ", ".join(f"{k}={_fmt(v)}" for k, v in check.parameters.items() if not isinstance(v, (list, dict)))
            table.add_row(check.check_name, params, _fmt(check.lhs), _fmt(check.rhs), f"{mark} {kind}")
        console.print(table)
    if result.get("run_info") is not None:
        console.print(f"[green]Artifacts: {result['run_info'].run_dir}[/green]")

    exit_code = result.get("exit_code", 1)
    if exit_code:
        console.print("[red]✗ Hard check failed or run aborted[/red]")
    sys.exit(exit_code)


@cli.command()
@click.option("--beta", type=float, required=True, help="Inverse temperature")
@click.option("--h", "h", type=float, default=None, help="Absolute pinning value")
@click.option("--h-frac", type=float, default=None, help="Pinning as a fraction of h_w")
@click.option("--N", "N", type=int, multiple=True, default=(16, 64, 256), show_default=True, help="Lattice sides")
@click.option("--delta", type=float, default=1.0, show_default=True, help="Slack used in kappa")
def params(beta, h, h_frac, N, delta):
    """Show h_w, its bounds, kappa, H, H_w and the default cap"""
    if h is not None and h_frac is not None:
        raise click.UsageError("--h and --h-frac are mutually exclusive")
    try:
        h_w = critical_h(beta)
    except DomainError as e:
        raise click.UsageError(str(e))
    h_value = h if h is not None else (h_frac or 0.0) * h_w
    lower, upper = critical_h_bounds(beta)
    console.print(f"[bold]h_w(beta={beta})[/bold] = {h_w:.10g}   bounds [{lower:.6g}, {upper:.6g}]   h = {h_value:.6g}")

    table = Table(title="Derived parameters")
    table.add_column("N", style="cyan", justify="right")
    table.add_column("H", justify="right")
    table.add_column("H_w", justify="right")
    table.add_column("kappa", justify="right")
    table.add_column("cap", justify="right")
    for side in N:
        p = Parameters(beta=beta, h=h_value, N=side, delta=delta)
        H, H_w = typical_heights(p)
        try:
            k = f"{kappa(p):.6g}"
        except DomainError:
            k = "[yellow]n/a (h >= h_w)[/yellow]"
        table.add_row(str(side), str(H), str(H_w), k, str(default_cap(side, beta)))
    console.print(table)


@cli.command()
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output root directory")
def list_runs(out):
    """List archived runs"""
    runs = ReportWriter.list_runs(out)
    if not runs:
        console.print(f"[yellow]No runs found in {out or config.OUTPUT_DIR}[/yellow]")
        return
    table = Table(title=f"Runs ({len(runs)})")
    table.add_column("Run", style="cyan")
    table.add_column("Experiment", style="white")
    table.add_column("Started", style="white")
    table.add_column("Hard failures", justify="right")
    for entry in runs:
        failures = entry["hard_failures"]
        color = "green" if failures == 0 else "red"
        table.add_row(entry["run"], entry["experiment"], entry["started_at"],
                      "" if failures is None else f"[{color}]{failures}[/{color}]")
    console.print(table)


if __name__ == "__main__":
    cli()

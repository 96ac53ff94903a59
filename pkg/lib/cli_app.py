#!/usr/bin/env python3
"""
Optospring - Command Line Interface
`optospring budget|fig2|sweep|simulate|optimize|check`

Exit codes: 0 ok, 1 configuration or domain error, 2 no net cooling (or a
failed design check), 3 oracle mismatch under --strict.
"""

import dataclasses
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from cavity_cooling import cavity_linewidth, cooling_ratio_surface, min_phonon_number, optimal_detuning
from design_checks import FAIL, DesignChecker
from geometry_material import polarizability
from langevin_oracle import EnsembleStats, simulate_gas_langevin, simulate_parametric_heating, write_trajectory_csv
from logging_setup import configure_logging
from noise_budget import full_budget
from report_writer import ReportWriter, stats_to_key_value, surface_to_csv
from run_config import DEFAULT_CONFIG, ConfigError, RunConfig, SweepSpec, load_config, sweep_paths
from trap_optics import axial_frequency
from units_constants import DomainError
from workers import ordered_map

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_COOLING = 2
EXIT_MISMATCH = 3

DEFAULT_GRID = "-3,-0.05,121,0,2,81"
STRICT_SIGMA = 3.0


def _fail(message: str, code: int = EXIT_CONFIG):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _load(config_path: str) -> RunConfig:
    try:
        return load_config(config_path)
    except ConfigError as e:
        _fail(str(e))


def parse_grid(raw: str) -> Tuple[np.ndarray, np.ndarray]:
    """`dlo,dhi,dn,llo,lhi,ln` -> (detuning/kappa axis, linewidth/kappa axis)"""
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 6:
        raise ConfigError(f"--grid needs 6 comma-separated values, got {len(parts)}")
    try:
        dlo, dhi, llo, lhi = (float(parts[i]) for i in (0, 1, 3, 4))
        dn, ln = int(parts[2]), int(parts[5])
    except ValueError as e:
        raise ConfigError(f"--grid: {e}") from e
    if dn < 1 or ln < 1:
        raise ConfigError("--grid point counts must be at least 1")
    return np.linspace(dlo, dhi, dn), np.linspace(llo, lhi, ln)


def parse_range(raw: str) -> Tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--range needs lo,hi, got {raw!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise ConfigError(f"--range: {e}") from e


config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False), default=str(DEFAULT_CONFIG),
    show_default=True, help="Design-point config (INI or YAML)")
out_option = click.option("--out", type=click.Path(dir_okay=False), default=None,
                          help="Write the artifact to this file")


@click.group()
@click.option("--debug", is_flag=True, help="DEBUG logging on stderr")
@click.option("--verbose", "-v", is_flag=True, help="INFO logging on stderr")
def cli(debug: bool, verbose: bool):
    """Noise budget and cooling design for an optically levitated Bragg-disk mirror."""
    configure_logging(debug=debug, verbose=verbose)


@cli.command()
@config_option
@out_option
@click.option("--format", "fmt", type=click.Choice(["text", "json", "markdown"]), default="text",
              show_default=True)
def budget(config_path: str, out: Optional[str], fmt: str):
    """Full noise budget of the design point."""
    point = _load(config_path).to_domain()
    try:
        report = full_budget(point.disk, point.beams, point.cavity, point.environment)
    except DomainError as e:
        _fail(str(e))

    writer = ReportWriter()
    logger.info("budget", config=config_path, n_final=report.n_final, net_cooling=report.net_cooling)
    if fmt == "json":
        click.echo(writer.to_json(report), nl=False)
    elif fmt == "markdown":
        click.echo(writer.to_markdown(report))
    else:
        click.echo(writer.to_key_value(report), nl=False)
    if out:
        _write(writer.to_csv([report]), out)
    if not report.net_cooling:
        _fail("no net cooling", EXIT_NO_COOLING)


@cli.command()
@config_option
@out_option
@click.option("--grid", default=DEFAULT_GRID, show_default=True,
              help="Delta/kappa lo,hi,n and Gamma_L/kappa lo,hi,n")
def fig2(config_path: str, out: Optional[str], grid: str):
    """Cooling rate with laser linewidth, relative to a monochromatic drive."""
    config = _load(config_path)
    try:
        detunings, linewidths = parse_grid(grid)
        point = config.to_domain()
        omega_z = axial_frequency(point.beams, polarizability(point.disk), point.disk)
        surface = cooling_ratio_surface(point.cavity, omega_z, point.disk.mass, detunings, linewidths)
    except DomainError as e:
        _fail(str(e))
    logger.info("fig2", detunings=detunings.size, linewidths=linewidths.size,
                undefined=int(surface.undefined.sum()))
    _write(surface_to_csv(surface), out)


@cli.command()
@config_option
@out_option
@click.option("--param", "path", required=True, help="Swept key as section.key")
@click.option("--range", "value_range", required=True, help="lo,hi in the key's config units")
@click.option("--points", type=int, default=11, show_default=True)
@click.option("--log", "log_scale", is_flag=True, help="Logarithmic spacing")
def sweep(config_path: str, out: Optional[str], path: str, value_range: str, points: int, log_scale: bool):
    """Noise budget across one config parameter, one CSV row per point."""
    config = _load(config_path)
    try:
        if path not in sweep_paths(config):
            raise ConfigError(f"parameter path {path!r} does not name a numeric config key")
        lo, hi = parse_range(value_range)
        plan = SweepSpec(path, lo, hi, points, "log" if log_scale else "linear")
        values = plan.values()
        # validate every point before computing any of them
        points_domain = [config.with_value(path, float(v)).to_domain() for v in values]
        reports = ordered_map(lambda p: full_budget(p.disk, p.beams, p.cavity, p.environment), points_domain)
    except DomainError as e:
        _fail(str(e))

    logger.info("sweep", param=path, points=len(reports),
                cooled=sum(1 for r in reports if r.net_cooling))
    writer = ReportWriter(leading_columns=[path])
    _write(writer.to_csv(reports, [[v] for v in values]), out)


def _channel_summary(stats: EnsembleStats) -> Dict[str, object]:
    meta = stats.metadata
    analytic = meta["analytic_rate"]
    stderr = stats.fitted_rate_stderr
    if stderr and math.isfinite(stderr) and stderr > 0:
        sigma = abs(stats.fitted_rate - analytic) / stderr
    else:
        sigma = math.nan
    channel = meta["channel"]
    summary = {
        f"{channel}.fitted_rate": stats.fitted_rate,
        f"{channel}.fitted_rate_stderr": stderr,
        f"{channel}.analytic_rate": analytic,
        f"{channel}.deviation_sigma": sigma,
        f"{channel}.equilibrium_energy": stats.equilibrium_energy,
    }
    if "analytic_equilibrium_energy" in meta:
        summary[f"{channel}.analytic_equilibrium_energy"] = meta["analytic_equilibrium_energy"]
    if "noise_bandwidth_hz" in meta:
        summary[f"{channel}.noise_bandwidth_hz"] = meta["noise_bandwidth_hz"]
    summary[f"{channel}.n_trajectories"] = meta["n_trajectories"]
    summary[f"{channel}.seed"] = meta["seed"]
    summary[f"{channel}.stepper"] = meta["stepper"]
    return summary


def _mismatch(stats: EnsembleStats) -> bool:
    analytic = stats.metadata["analytic_rate"]
    stderr = stats.fitted_rate_stderr
    if not math.isfinite(stats.fitted_rate) or not math.isfinite(stderr):
        return True
    return abs(stats.fitted_rate - analytic) > STRICT_SIGMA * stderr


def _trajectory_path(out: str, channel: str, several: bool) -> str:
    if not several:
        return out
    p = Path(out)
    return str(p.with_name(f"{p.stem}.{channel}{p.suffix}"))


@cli.command()
@config_option
@out_option
@click.option("--mode", type=click.Choice(["gas", "parametric", "both"]), default=None,
              help="Override [oracle] mode")
@click.option("--seed", type=int, default=None, help="Override [oracle] seed")
@click.option("--strict", is_flag=True, help=f"Exit 3 when a fitted rate is >{STRICT_SIGMA:g} sigma off")
def simulate(config_path: str, out: Optional[str], mode: Optional[str], seed: Optional[int], strict: bool):
    """Stochastic oracle runs against the analytic rates."""
    config = _load(config_path)
    try:
        cfg = config.sde_config(seed=seed)
        mode = mode or config.oracle.mode
        channels = ["gas", "parametric"] if mode == "both" else [mode]
        runners = {"gas": simulate_gas_langevin, "parametric": simulate_parametric_heating}
        results: List[EnsembleStats] = [runners[name](cfg) for name in channels]
    except DomainError as e:
        _fail(str(e))

    summary: Dict[str, object] = {}
    for stats in results:
        summary.update(_channel_summary(stats))
    click.echo(stats_to_key_value(summary), nl=False)
    if out:
        for stats in results:
            path = _trajectory_path(out, stats.metadata["channel"], len(results) > 1)
            with open(path, "w", encoding="utf-8", newline="") as f:
                write_trajectory_csv(stats, f)

    mismatched = [s.metadata["channel"] for s in results if _mismatch(s)]
    if mismatched:
        logger.warning("oracle mismatch", channels=mismatched, strict=strict)
        if strict:
            _fail(f"oracle mismatch in {', '.join(mismatched)}", EXIT_MISMATCH)


@cli.command()
@config_option
def optimize(config_path: str):
    """Move the detuning to the backaction optimum and compare budgets."""
    point = _load(config_path).to_domain()
    try:
        omega_z = axial_frequency(point.beams, polarizability(point.disk), point.disk)
        kappa = cavity_linewidth(point.cavity)
        best = optimal_detuning(omega_z, kappa)
        scale = max(omega_z, kappa)
        numeric = minimize_scalar(lambda d: min_phonon_number(d, omega_z, kappa),
                                  bounds=(-20.0 * scale, -1e-3 * scale), method="bounded",
                                  options={"xatol": 1e-6 * scale})
        if abs(numeric.x - best) > 1e-3 * abs(best):
            logger.warning("numeric optimum disagrees", closed_form=best, numeric=float(numeric.x))

        current = full_budget(point.disk, point.beams, point.cavity, point.environment)
        tuned_cavity = dataclasses.replace(point.cavity, detuning=best)
        tuned = full_budget(point.disk, point.beams, tuned_cavity, point.environment)
    except DomainError as e:
        _fail(str(e))

    summary = {
        "omega_z": omega_z,
        "kappa": kappa,
        "detuning_configured": point.cavity.detuning,
        "detuning_optimal": best,
        "detuning_optimal_numeric": float(numeric.x),
        "n_min_configured": current.n_min,
        "n_min_optimal": tuned.n_min,
        "n_final_configured": current.n_final,
        "n_final_optimal": tuned.n_final,
        "improvement_n_min": current.n_min - tuned.n_min,
        "improvement_n_final": current.n_final - tuned.n_final,
    }
    logger.info("optimize", detuning_optimal=best, n_min_optimal=tuned.n_min)
    click.echo(stats_to_key_value(summary), nl=False)
    if not tuned.net_cooling:
        _fail("no net cooling", EXIT_NO_COOLING)


@cli.command()
@config_option
def check(config_path: str):
    """Validity conditions of the design point."""
    point = _load(config_path).to_domain()
    report = DesignChecker(point).run_all_checks()
    for result in report.checks:
        click.echo(f"{result.name}: {result.status} - {result.message}")
    for recommendation in report.recommendations:
        click.echo(f"recommendation: {recommendation}")
    click.echo(f"overall: {report.overall_status}")
    if report.overall_status == FAIL:
        raise SystemExit(EXIT_NO_COOLING)


def main():
    cli(prog_name="optospring")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
Optospring - Langevin Oracle
Stochastic cross-check of the analytic heating and damping rates. The axial
motion is integrated as a 1-D oscillator,

    z'' = -omega_z^2 (1 + eps(t)) z - gamma_bg z' + xi(t),
    <xi(t) xi(t')> = q delta(t - t'),  q = 2 kB T gamma_bg / m,

with eps(t) white intensity noise of one-sided spectrum S_I. Ensembles are
run with one counter-based random stream per trajectory, so results depend
only on (config, seed) and never on the thread schedule.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, TextIO, Tuple

import numpy as np
import structlog

from report_writer import trajectory_to_csv
from units_constants import KB, DomainError
from workers import worker_count

logger = structlog.get_logger(__name__)

MAX_STEP_PHASE = 0.05      # omega_z dt must stay below this
MAX_GROWTH_PER_STEP = 1e-3  # predicted parametric rate * dt
MIN_TRAJECTORIES = 100
N_BATCHES = 10
NOISE_CHUNK = 2048
MAX_RECORDS = 2000
FIT_FLOOR = 0.1            # relaxation fit stops once the excess drops below this fraction
EQUILIBRIUM_TAIL = 0.5

STEPPER = "stochastic leapfrog (kick-drift-kick, then damping and noise impulse of variance q dt)"


class StepSizeError(DomainError):
    """omega_z dt too large for the leapfrog to resolve the oscillation"""
    pass


class GrowthResolutionError(DomainError):
    """Parametric growth too fast for the chosen dt"""
    pass


@dataclass(frozen=True)
class SdeConfig:
    """Oracle run parameters, SI units; rin is S_I in Hz^-1"""
    omega_z: float
    gamma_bg: float
    temperature: float
    mass: float
    rin: float
    dt: float
    n_steps: int
    n_trajectories: int
    seed: int
    initial_energy_kt: float = 20.0
    noise_substeps: int = 1    # normals per step and source; >1 follows the path of a dt / noise_substeps run

    def __post_init__(self):
        if self.omega_z <= 0 or self.mass <= 0 or self.temperature <= 0:
            raise DomainError("omega_z, mass and temperature must be positive")
        if self.gamma_bg < 0 or self.rin < 0:
            raise DomainError("gamma_bg and S_I must be non-negative")
        if self.dt <= 0 or self.n_steps < 1:
            raise DomainError("dt must be positive and n_steps at least 1")
        if self.n_trajectories < MIN_TRAJECTORIES:
            raise DomainError(f"Rate extraction needs at least {MIN_TRAJECTORIES} trajectories")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.initial_energy_kt < 0:
            raise DomainError("initial energy must be non-negative")
        if self.noise_substeps < 1:
            raise DomainError("noise_substeps must be at least 1")

    @property
    def kt(self) -> float:
        return KB * self.temperature

    @property
    def diffusion(self) -> float:
        """q = 2 kB T gamma_bg / m"""
        return 2.0 * self.kt * self.gamma_bg / self.mass

    @property
    def parametric_rate(self) -> float:
        """omega_z^2 S_I / 4"""
        return 0.25 * self.omega_z ** 2 * self.rin

    def check_resolution(self) -> None:
        phase = self.omega_z * self.dt
        if phase >= MAX_STEP_PHASE:
            raise StepSizeError(
                f"Step-size guard: omega_z dt = {phase:.3g} must be below {MAX_STEP_PHASE}")


@dataclass
class EnsembleStats:
    """Ensemble-mean energy trace (J) and the rate fitted to it (s^-1)"""
    times: np.ndarray
    mean_energy: np.ndarray
    stderr_energy: np.ndarray
    fitted_rate: float
    fitted_rate_stderr: float
    equilibrium_energy: float
    metadata: Dict[str, Any] = field(default_factory=dict)


def fit_exponential_rate(times, series) -> Tuple[float, float]:
    """Least-squares slope and intercept of log(series) against time"""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.size < 3 or np.any(series <= 0):
        raise DomainError("Exponential fit needs at least three positive samples")
    slope, intercept = np.polyfit(times, np.log(series), 1)
    return float(slope), float(intercept)


def _generators(cfg: SdeConfig) -> List[np.random.Generator]:
    # one Philox stream per trajectory, keyed by (seed, index)
    return [np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, index])))
            for index in range(cfg.n_trajectories)]


def _integrate(cfg: SdeConfig, gamma: float, diffusion: float, rin: float) -> Tuple[np.ndarray, np.ndarray]:
    """Run the ensemble; returns (record times, energies[record, trajectory])"""
    n = cfg.n_trajectories
    w2 = cfg.omega_z ** 2
    dt = cfg.dt
    generators = _generators(cfg)
    sub = cfg.noise_substeps

    phases = np.array([g.uniform(0.0, 2.0 * math.pi) for g in generators])
    amplitude = math.sqrt(2.0 * cfg.initial_energy_kt * cfg.kt / (cfg.mass * w2))
    z = amplitude * np.cos(phases)
    v = -amplitude * cfg.omega_z * np.sin(phases)

    def energy():
        return 0.5 * cfg.mass * (v * v + w2 * z * z)

    record_every = max(1, cfg.n_steps // MAX_RECORDS)
    n_records = cfg.n_steps // record_every + 1
    energies = np.empty((n_records, n))
    energies[0] = energy()

    sources = []
    if diffusion > 0:
        sources.append("thermal")
    if rin > 0:
        sources.append("parametric")
    kick = math.sqrt(diffusion * dt)
    eps_scale = math.sqrt(rin / (2.0 * dt))
    thermal_idx = sources.index("thermal") if "thermal" in sources else None
    parametric_idx = sources.index("parametric") if "parametric" in sources else None

    workers = min(worker_count(), n)
    step, record = 0, 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while step < cfg.n_steps:
            size = min(NOISE_CHUNK, cfg.n_steps - step)
            if sources:
                rows = list(pool.map(lambda g: g.standard_normal((size * sub, len(sources))), generators))
                noise = np.stack(rows, axis=-1)  # (size * sub, sources, trajectory)
                if sub > 1:
                    # each step takes the summed increment of its sub finer steps
                    noise = noise.reshape(size, sub, len(sources), n).sum(axis=1) / math.sqrt(sub)
            for j in range(size):
                if parametric_idx is not None:
                    stiffness = w2 * (1.0 + eps_scale * noise[j, parametric_idx])
                else:
                    stiffness = w2
                v -= 0.5 * dt * stiffness * z
                z += dt * v
                v -= 0.5 * dt * stiffness * z
                if gamma > 0:
                    v -= gamma * dt * v
                if thermal_idx is not None:
                    v += kick * noise[j, thermal_idx]
                step += 1
                if step % record_every == 0:
                    energies[record] = energy()
                    record += 1

    times = np.arange(n_records) * record_every * dt
    return times, energies


def _batch_means(energies: np.ndarray) -> np.ndarray:
    """Mean energy per fixed trajectory batch, shape (record, batch)"""
    batches = np.array_split(np.arange(energies.shape[1]), N_BATCHES)
    return np.stack([energies[:, b].mean(axis=1) for b in batches], axis=1)


def _summarize(times, energies) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = energies.mean(axis=1)
    stderr = energies.std(axis=1, ddof=1) / math.sqrt(energies.shape[1])
    return mean, stderr, _batch_means(energies)


def _batched_fit(times, mean, batches, transform) -> Tuple[float, float]:
    rate = transform(times, mean)
    batch_rates = np.array([transform(times, batches[:, i]) for i in range(batches.shape[1])])
    return rate, float(batch_rates.std(ddof=1) / math.sqrt(batch_rates.size))


def simulate_gas_langevin(cfg: SdeConfig) -> EnsembleStats:
    """Background-gas damping and forcing; fits the energy relaxation rate"""
    cfg.check_resolution()
    logger.info("gas oracle", omega_z=cfg.omega_z, gamma_bg=cfg.gamma_bg,
                trajectories=cfg.n_trajectories, steps=cfg.n_steps, seed=cfg.seed)
    times, energies = _integrate(cfg, cfg.gamma_bg, cfg.diffusion, rin=0.0)
    mean, stderr, batches = _summarize(times, energies)

    excess = mean - cfg.kt
    batch_excess = batches - cfg.kt
    fitted_rate = fitted_stderr = math.nan
    if excess[0] > 0:
        floor = FIT_FLOOR * excess[0]
        resolved = (excess > floor) & np.all(batch_excess > floor, axis=1)
        end = int(np.argmin(resolved)) if not resolved.all() else resolved.size
        if end >= 3:
            window = slice(0, end)

            def relaxation(t, series):
                return -fit_exponential_rate(t[window], series[window] - cfg.kt)[0]

            fitted_rate, fitted_stderr = _batched_fit(times, mean, batches, relaxation)

    tail = int(mean.size * (1.0 - EQUILIBRIUM_TAIL))
    stats = EnsembleStats(
        times=times,
        mean_energy=mean,
        stderr_energy=stderr,
        fitted_rate=fitted_rate,
        fitted_rate_stderr=fitted_stderr,
        equilibrium_energy=float(mean[tail:].mean()),
        metadata={
            "channel": "gas",
            "stepper": STEPPER,
            "dt": cfg.dt,
            "noise_substeps": cfg.noise_substeps,
            "n_trajectories": cfg.n_trajectories,
            "seed": cfg.seed,
            "analytic_rate": cfg.gamma_bg,
            "analytic_equilibrium_energy": cfg.kt,
        },
    )
    logger.info("gas oracle done", fitted_rate=fitted_rate, stderr=fitted_stderr,
                equilibrium_energy=stats.equilibrium_energy)
    return stats


def simulate_parametric_heating(cfg: SdeConfig) -> EnsembleStats:
    """Trap-frequency modulation by intensity noise; fits the energy growth rate"""
    cfg.check_resolution()
    if cfg.parametric_rate * cfg.dt > MAX_GROWTH_PER_STEP:
        raise GrowthResolutionError(
            f"Predicted growth {cfg.parametric_rate:.3g} s^-1 too fast for dt = {cfg.dt:.3g} s")
    if cfg.initial_energy_kt <= 0:
        raise DomainError("Parametric heating needs a non-zero initial energy")
    logger.info("parametric oracle", omega_z=cfg.omega_z, rin=cfg.rin,
                trajectories=cfg.n_trajectories, steps=cfg.n_steps, seed=cfg.seed)
    times, energies = _integrate(cfg, gamma=0.0, diffusion=0.0, rin=cfg.rin)
    mean, stderr, batches = _summarize(times, energies)

    def growth(t, series):
        return fit_exponential_rate(t, series)[0]

    fitted_rate, fitted_stderr = _batched_fit(times, mean, batches, growth)
    stats = EnsembleStats(
        times=times,
        mean_energy=mean,
        stderr_energy=stderr,
        fitted_rate=fitted_rate,
        fitted_rate_stderr=fitted_stderr,
        equilibrium_energy=math.nan,
        metadata={
            "channel": "parametric",
            "stepper": STEPPER,
            "dt": cfg.dt,
            "noise_substeps": cfg.noise_substeps,
            "n_trajectories": cfg.n_trajectories,
            "seed": cfg.seed,
            "analytic_rate": cfg.parametric_rate,
            # white modulation, flat up to the Nyquist frequency of dt
            "noise_bandwidth_hz": 1.0 / (2.0 * cfg.dt),
        },
    )
    logger.info("parametric oracle done", fitted_rate=fitted_rate, stderr=fitted_stderr)
    return stats


def write_trajectory_csv(stats: EnsembleStats, stream: TextIO) -> None:
    """Dump the ensemble-mean energy trace as t, mean_energy, stderr_energy"""
    stream.write(trajectory_to_csv(stats.times, stats.mean_energy, stats.stderr_energy))

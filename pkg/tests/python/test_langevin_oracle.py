#!/usr/bin/env python3
"""
Unit tests for langevin_oracle.py
"""

import io
import math
import os
import sys
from dataclasses import replace

import numpy as np
import pytest

# Add the lib directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../lib'))

from langevin_oracle import (MAX_STEP_PHASE, GrowthResolutionError, SdeConfig, StepSizeError,
                             fit_exponential_rate, simulate_gas_langevin, simulate_parametric_heating,
                             write_trajectory_csv)
from units_constants import KB, DomainError

OMEGA_Z = 1.235e5
MASS = 1.48e-10


def gas_config(**overrides):
    """gamma/omega = 1e-2, omega dt = 0.02, eight relaxation times"""
    omega = 1e5
    values = dict(omega_z=omega, gamma_bg=1e3, temperature=300.0, mass=MASS, rin=0.0,
                  dt=0.02 / omega, n_steps=40000, n_trajectories=1000, seed=11, initial_energy_kt=20.0)
    values.update(overrides)
    return SdeConfig(**values)


def parametric_config(rin, growth_periods=2.0, phase=0.02, **overrides):
    """Run for `growth_periods` e-foldings of the predicted parametric rate"""
    dt = phase / OMEGA_Z
    rate = 0.25 * OMEGA_Z ** 2 * rin
    n_steps = int(growth_periods / (rate * dt)) if rate > 0 else 20000
    values = dict(omega_z=OMEGA_Z, gamma_bg=0.0, temperature=300.0, mass=MASS, rin=rin,
                  dt=dt, n_steps=n_steps, n_trajectories=2000, seed=7, initial_energy_kt=20.0)
    values.update(overrides)
    return SdeConfig(**values)


@pytest.mark.unit
class TestFitExponentialRate:
    """Log-linear least squares"""

    def test_exact_exponential(self):
        """Test slope and intercept of 3 exp(-2 t)"""
        t = np.linspace(0.0, 1.0, 50)
        slope, intercept = fit_exponential_rate(t, 3.0 * np.exp(-2.0 * t))
        assert slope == pytest.approx(-2.0, rel=1e-10)
        assert intercept == pytest.approx(math.log(3.0), rel=1e-10)

    def test_too_few_samples(self):
        """Test fewer than three samples raise DomainError"""
        with pytest.raises(DomainError):
            fit_exponential_rate([0.0, 1.0], [1.0, 2.0])

    def test_non_positive_samples(self):
        """Test a zero sample raises DomainError"""
        with pytest.raises(DomainError):
            fit_exponential_rate([0.0, 1.0, 2.0], [1.0, 0.0, 2.0])


@pytest.mark.unit
class TestSdeConfig:
    """Oracle configuration and guards"""

    def test_derived_quantities(self):
        """Test kT, q and the predicted parametric rate"""
        cfg = gas_config(rin=1e-8)
        assert cfg.kt == pytest.approx(KB * 300.0)
        assert cfg.diffusion == pytest.approx(2 * KB * 300.0 * 1e3 / MASS)
        assert cfg.parametric_rate == pytest.approx(0.25 * 1e10 * 1e-8)

    @pytest.mark.parametrize("field,value", [
        ("omega_z", 0.0),
        ("mass", -1.0),
        ("temperature", 0.0),
        ("gamma_bg", -1.0),
        ("rin", -1e-12),
        ("dt", 0.0),
        ("n_steps", 0),
        ("n_trajectories", 99),
        ("seed", -1),
        ("seed", 2 ** 64),
        ("initial_energy_kt", -1.0),
        ("noise_substeps", 0),
    ])
    def test_invalid_fields(self, field, value):
        """Test each invariant raises DomainError"""
        with pytest.raises(DomainError):
            gas_config(**{field: value})

    def test_step_size_guard(self):
        """Test omega_z dt above the limit is refused before any integration"""
        cfg = gas_config(dt=1.2 * MAX_STEP_PHASE / 1e5)
        with pytest.raises(StepSizeError):
            simulate_gas_langevin(cfg)
        with pytest.raises(StepSizeError):
            simulate_parametric_heating(replace(cfg, gamma_bg=0.0, rin=1e-8))

    def test_step_size_guard_is_domain_error(self):
        """Test the guards share the domain error base"""
        assert issubclass(StepSizeError, DomainError)
        assert issubclass(GrowthResolutionError, DomainError)

    def test_growth_guard(self):
        """Test a growth rate above 1e-3 per step is refused"""
        cfg = gas_config(gamma_bg=0.0, rin=1e-4, dt=1e-7)
        with pytest.raises(GrowthResolutionError):
            simulate_parametric_heating(cfg)

    def test_parametric_needs_energy(self):
        """Test an oscillator at rest cannot be parametrically heated"""
        with pytest.raises(DomainError):
            simulate_parametric_heating(parametric_config(1e-7, initial_energy_kt=0.0))


@pytest.mark.unit
class TestDeterminism:
    """Seeded reproducibility"""

    def setup_method(self):
        """Set up a short run"""
        self.cfg = gas_config(n_steps=400, n_trajectories=100)

    def test_same_seed_same_trace(self):
        """Test identical seeds give identical traces"""
        first = simulate_gas_langevin(self.cfg)
        second = simulate_gas_langevin(self.cfg)
        assert np.array_equal(first.mean_energy, second.mean_energy)
        assert np.array_equal(first.stderr_energy, second.stderr_energy)

    def test_thread_count_irrelevant(self, monkeypatch):
        """Test the trace does not depend on the worker count"""
        monkeypatch.setenv("OPTOSPRING_THREADS", "1")
        serial = simulate_gas_langevin(self.cfg)
        monkeypatch.setenv("OPTOSPRING_THREADS", "4")
        threaded = simulate_gas_langevin(self.cfg)
        assert np.array_equal(serial.mean_energy, threaded.mean_energy)

    def test_different_seed_differs(self):
        """Test another seed gives another trace"""
        first = simulate_gas_langevin(self.cfg)
        other = simulate_gas_langevin(replace(self.cfg, seed=12))
        assert not np.array_equal(first.mean_energy, other.mean_energy)

    def test_metadata(self):
        """Test the run records how it was produced"""
        stats = simulate_gas_langevin(self.cfg)
        assert stats.metadata["channel"] == "gas"
        assert stats.metadata["seed"] == 11
        assert stats.metadata["n_trajectories"] == 100
        assert stats.metadata["analytic_rate"] == 1e3
        assert "leapfrog" in stats.metadata["stepper"]
        assert stats.times[0] == 0.0
        assert stats.times.shape == stats.mean_energy.shape == stats.stderr_energy.shape

    def test_substeps_follow_finer_path(self):
        """Test a dt run with two noise substeps tracks the dt/2 run on the same seed"""
        coarse = simulate_gas_langevin(replace(self.cfg, noise_substeps=2))
        fine = simulate_gas_langevin(replace(self.cfg, dt=self.cfg.dt / 2, n_steps=2 * self.cfg.n_steps))
        assert coarse.metadata["noise_substeps"] == 2
        assert coarse.times == pytest.approx(fine.times[::2], rel=1e-12)
        assert coarse.mean_energy == pytest.approx(fine.mean_energy[::2], rel=1e-2)

    def test_trajectory_csv(self):
        """Test the trace dump has a header and one row per record"""
        stats = simulate_gas_langevin(self.cfg)
        stream = io.StringIO()
        write_trajectory_csv(stats, stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == "t,mean_energy,stderr_energy"
        assert len(lines) == stats.times.size + 1
        assert lines[1].startswith("0.00000000e+00,")


@pytest.mark.slow
class TestGasOracle:
    """Background-gas relaxation against gamma_bg"""

    @pytest.mark.parametrize("gamma_bg,phase,n_steps", [(1e3, 0.02, 40000), (1e2, 0.04, 100000)])
    def test_relaxation_rate(self, gamma_bg, phase, n_steps):
        """Test the fitted rate matches gamma_bg within 10% at gamma/omega = 1e-2 and 1e-3"""
        stats = simulate_gas_langevin(gas_config(gamma_bg=gamma_bg, dt=phase / 1e5, n_steps=n_steps))
        assert stats.fitted_rate == pytest.approx(gamma_bg, rel=0.1)
        assert stats.fitted_rate_stderr > 0

    @pytest.mark.parametrize("gamma_bg,temperature", [(1e3, 300.0), (2e3, 77.0)])
    def test_equipartition(self, gamma_bg, temperature):
        """Test a particle starting at rest settles at kT"""
        cfg = gas_config(gamma_bg=gamma_bg, temperature=temperature, initial_energy_kt=0.0, n_steps=50000)
        stats = simulate_gas_langevin(cfg)
        assert stats.equilibrium_energy == pytest.approx(cfg.kt, rel=0.05)
        assert math.isnan(stats.fitted_rate)

    def test_energy_conservation(self):
        """Test the undamped, unforced stepper holds energy over 1000 periods"""
        phase = 0.04
        cfg = gas_config(gamma_bg=0.0, dt=phase / 1e5, n_steps=int(2000 * math.pi / phase),
                         n_trajectories=100)
        stats = simulate_gas_langevin(cfg)
        initial = stats.mean_energy[0]
        assert initial == pytest.approx(20 * cfg.kt, rel=1e-12)
        assert np.max(np.abs(stats.mean_energy / initial - 1.0)) < 1e-3


@pytest.mark.slow
class TestParametricOracle:
    """Intensity-noise heating against omega_z^2 S_I / 4"""

    @pytest.mark.parametrize("rin", [1e-7, 1e-6])
    def test_growth_rate(self, rin):
        """Test the fitted growth rate within 15% across a decade of S_I"""
        cfg = parametric_config(rin)
        stats = simulate_parametric_heating(cfg)
        assert stats.fitted_rate == pytest.approx(0.25 * OMEGA_Z ** 2 * rin, rel=0.15)
        assert stats.metadata["analytic_rate"] == pytest.approx(cfg.parametric_rate)
        assert math.isnan(stats.equilibrium_energy)

    def test_design_point_rate(self):
        """Test S_I = 1e-8 at omega_z = 1.235e5 reproduces 38 s^-1"""
        stats = simulate_parametric_heating(parametric_config(1e-8, phase=0.04))
        assert stats.fitted_rate == pytest.approx(38.1, rel=0.15)

    def test_no_noise_no_growth(self):
        """Test S_I = 0 leaves the mean energy flat"""
        stats = simulate_parametric_heating(parametric_config(0.0, n_trajectories=100))
        assert abs(stats.fitted_rate) < 1.0
        assert stats.metadata["noise_bandwidth_hz"] == pytest.approx(OMEGA_Z / 0.04)


@pytest.mark.slow
class TestIntegratorOrder:
    """Halving dt on the same noise path"""

    def assert_dt_converged(self, coarse_cfg, simulate):
        fine_cfg = replace(coarse_cfg, dt=coarse_cfg.dt / 2, n_steps=2 * coarse_cfg.n_steps, noise_substeps=1)
        coarse = simulate(coarse_cfg)
        fine = simulate(fine_cfg)
        assert math.isfinite(coarse.fitted_rate) and math.isfinite(fine.fitted_rate)
        assert abs(coarse.fitted_rate - fine.fitted_rate) < fine.fitted_rate_stderr

    def test_gas_rate(self):
        """Test the relaxation rate moves by less than its standard error when dt halves"""
        self.assert_dt_converged(gas_config(n_steps=20000, n_trajectories=400, noise_substeps=2),
                                 simulate_gas_langevin)

    def test_parametric_rate(self):
        """Test the parametric growth rate moves by less than its standard error when dt halves"""
        self.assert_dt_converged(parametric_config(1e-7, phase=0.04, n_steps=16000, n_trajectories=400,
                                                   noise_substeps=2),
                                 simulate_parametric_heating)

#!/usr/bin/env python3
"""
Optospring - Noise Budget
Aggregates the heating and damping channels of the trapped mirror (trap
intensity noise, beam pointing, photon scattering, background gas) and the
residual thermal occupation into a final phonon-number report.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

import structlog

from cavity_cooling import CavityConfig, cooling_summary, finesse
from geometry_material import DiskMirror, cross_section_area, polarizability
from trap_optics import TrapBeams, characterize
from units_constants import C, HBAR, KB, DomainError

logger = structlog.get_logger(__name__)

NO_NET_COOLING = "no net cooling"

PROVENANCE = {
    "omega_z": "sqrt(2 alpha_perp (I0x+I0y) / (m c eps0 w0z^2))",
    "omega_x": "sqrt(d2V/dx2 / m), finite-difference Hessian of V = -alpha_perp I / (2 eps0 c)",
    "omega_y": "sqrt(d2V/dy2 / m), finite-difference Hessian of V = -alpha_perp I / (2 eps0 c)",
    "omega_wob": "sqrt(12 I0y (alpha_perp - alpha_z) / (eps0 c I_x)), I_x = m (3d^2/4 + h^2)",
    "finesse": "pi (R_f R_m)^(1/4) / (1 - sqrt(R_f R_m))",
    "kappa": "pi c / (F L)",
    "n_min": "-(4 (Delta + omega_z)^2 + kappa^2) / (16 omega_z Delta)",
    "gamma_rp": "-(omega_c kappa / (m omega_z L^2)) 8 P_in (A_- - A_+) / "
                "([(2 Gamma_L + kappa)^2 + 4 Delta^2] (kappa^2 + omega_z^2))",
    "gamma_rp_monochromatic": "gamma_rp at Gamma_L = 0",
    "gamma_I": "omega_z^2 S_I(2 omega_z) / 4",
    "edot_pointing": "omega_z^4 m S_x(omega_z) / 4 (units of power, as printed)",
    "pointing_quanta_rate": "edot_pointing / (hbar omega_z)",
    "photon_flux": "I_total pi (d/2)^2 / (hbar omega_trap)",
    "scatter_force_noise": "sqrt(2 n0) hbar k theta_z",
    "scatter_rate": "(sqrt(2 n0) hbar k theta_z)^2 / (2 m hbar omega_z)",
    "gamma_bg": "4 P A / (m v_g), v_g = sqrt(3 kB T / m_g)",
    "gamma_m": "gamma_I + gamma_bg",
    "n_R": "kB T / (hbar omega_z)",
    "n_bose": "1 / (exp(hbar omega_z / kB T) - 1)",
    "thermal_correction": "gamma_m n_R / (gamma_rp + gamma_m)",
    "n_final": "n_min + thermal_correction",
}

POINTING_CAVEAT = ("pointing: printed expression has units of power; "
                   "pointing_quanta_rate divides it by hbar omega_z")
SCATTER_CAVEAT = ("scattering: n0 taken as the photon flux through the disk face; "
                  "scatter_rate is momentum diffusion over one phonon energy")


class BudgetTermError(DomainError):
    """A budget term could not be evaluated; `term` names it"""

    def __init__(self, term: str, cause: Exception):
        super().__init__(f"{term}: {cause}")
        self.term = term
        self.cause = cause


@dataclass(frozen=True)
class Environment:
    """Background gas: pressure in Pa, molecular mass in kg, temperature in K"""
    pressure: float
    gas_mass: float
    temperature: float

    def __post_init__(self):
        if self.pressure < 0:
            raise DomainError("Gas pressure must be non-negative")
        if self.gas_mass <= 0:
            raise DomainError("Gas molecular mass must be positive")
        if self.temperature <= 0:
            raise DomainError("Temperature must be positive")


@dataclass
class NoiseBudgetReport:
    """Every derived frequency, rate and occupation, plus provenance"""
    omega_z: float
    omega_x: float
    omega_y: float
    omega_wob: float
    finesse: float
    kappa: float
    n_min: float
    gamma_rp: float
    gamma_rp_monochromatic: float
    gamma_I: float
    edot_pointing: float
    pointing_quanta_rate: float
    photon_flux: float
    scatter_force_noise: float
    scatter_rate: float
    gamma_bg: float
    gamma_m: float
    n_R: float
    n_bose: float
    thermal_correction: float
    n_final: float
    net_cooling: bool
    flags: List[str] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)
    provenance: Dict[str, str] = field(default_factory=dict)

    def numeric_fields(self) -> Dict[str, float]:
        data = asdict(self)
        return {k: v for k, v in data.items() if isinstance(v, float)}

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def intensity_heating_rate(omega_z: float, rin: float) -> float:
    """Parametric heating rate omega_z^2 S_I(2 omega_z) / 4"""
    if omega_z <= 0:
        raise DomainError("omega_z must be positive")
    if rin < 0:
        raise DomainError("Intensity noise spectrum must be non-negative")
    return 0.25 * omega_z ** 2 * rin


def pointing_heating_rate(omega_z: float, mass: float, pointing_noise: float) -> float:
    """omega_z^4 m S_x(omega_z) / 4, in W as printed"""
    if omega_z < 0 or mass < 0 or pointing_noise < 0:
        raise DomainError("Pointing heating inputs must be non-negative")
    return 0.25 * omega_z ** 4 * mass * pointing_noise


def pointing_quanta_rate(omega_z: float, mass: float, pointing_noise: float) -> float:
    """Pointing power expressed in phonons per second"""
    if omega_z <= 0:
        return 0.0
    return pointing_heating_rate(omega_z, mass, pointing_noise) / (HBAR * omega_z)


def photon_flux_on_disk(beams: TrapBeams, disk: DiskMirror) -> float:
    """Mean trap-photon flux n0 through the disk face, s^-1"""
    photon_energy = HBAR * 2.0 * math.pi * C / beams.wavelength
    return beams.total_intensity * cross_section_area(disk) / photon_energy


def scattering_force_noise(beams: TrapBeams, disk: DiskMirror) -> float:
    """Momentum noise sqrt(2 n0) hbar k theta_z along z, in N"""
    k = 2.0 * math.pi / beams.wavelength
    return math.sqrt(2.0 * photon_flux_on_disk(beams, disk)) * HBAR * k * beams.theta_z


def scattering_momentum_rate(beams: TrapBeams, disk: DiskMirror, omega_z: float) -> float:
    """Scattering heating in phonons per second"""
    if omega_z <= 0 or disk.mass <= 0:
        raise DomainError("omega_z and mass must be positive")
    return scattering_force_noise(beams, disk) ** 2 / (2.0 * disk.mass * HBAR * omega_z)


def gas_damping_rate(env: Environment, disk: DiskMirror) -> float:
    """gamma_bg = 4 P A / (m v_g) with the rms molecular speed"""
    if disk.mass <= 0:
        raise DomainError("Disk mass must be positive")
    v_g = math.sqrt(3.0 * KB * env.temperature / env.gas_mass)
    return 4.0 * env.pressure * cross_section_area(disk) / (disk.mass * v_g)


def thermal_occupation(temperature: float, omega_z: float) -> float:
    """Rayleigh-Jeans occupation kB T / (hbar omega_z)"""
    return KB * temperature / (HBAR * omega_z)


def bose_occupation(temperature: float, omega_z: float) -> float:
    return 1.0 / math.expm1(HBAR * omega_z / (KB * temperature))


def thermal_correction(gamma_m: float, gamma_rp: float, omega_z: float, temperature: float) -> float:
    """Occupation added by the thermal bath, gamma_m n_R / (gamma_rp + gamma_m)"""
    total = gamma_rp + gamma_m
    if total <= 0:
        raise DomainError("gamma_rp + gamma_m must be positive")
    return gamma_m * thermal_occupation(temperature, omega_z) / total


def _term(name, fn, *args):
    try:
        return fn(*args)
    except DomainError as e:
        raise BudgetTermError(name, e) from e


def full_budget(disk: DiskMirror, beams: TrapBeams, cavity: CavityConfig, env: Environment) -> NoiseBudgetReport:
    """Compose every channel into one report for a design point"""
    pol = _term("polarizability", polarizability, disk)
    trap = _term("trap", characterize, beams, pol, disk)
    omega_z = trap.omega_z
    if omega_z <= 0:
        raise BudgetTermError("omega_z", DomainError("no axial confinement (zero trap intensity)"))

    cooling = _term("gamma_rp", cooling_summary, cavity, omega_z, disk.mass)
    gamma_i = _term("gamma_I", intensity_heating_rate, omega_z, beams.rin)
    gamma_bg = _term("gamma_bg", gas_damping_rate, env, disk)
    gamma_m = gamma_i + gamma_bg
    n_r = thermal_occupation(env.temperature, omega_z)

    flags = []
    net_cooling = cooling.net_cooling and not math.isnan(cooling.n_min)
    if net_cooling:
        correction = _term("thermal_correction", thermal_correction,
                           gamma_m, cooling.gamma_rp, omega_z, env.temperature)
        n_final = cooling.n_min + correction
    else:
        flags.append(NO_NET_COOLING)
        correction = math.nan
        n_final = math.nan

    report = NoiseBudgetReport(
        omega_z=omega_z,
        omega_x=trap.omega_x,
        omega_y=trap.omega_y,
        omega_wob=trap.omega_wob,
        finesse=finesse(cavity),
        kappa=cooling.kappa,
        n_min=cooling.n_min,
        gamma_rp=cooling.gamma_rp,
        gamma_rp_monochromatic=cooling.gamma_rp_monochromatic,
        gamma_I=gamma_i,
        edot_pointing=pointing_heating_rate(omega_z, disk.mass, beams.pointing_noise),
        pointing_quanta_rate=pointing_quanta_rate(omega_z, disk.mass, beams.pointing_noise),
        photon_flux=photon_flux_on_disk(beams, disk),
        scatter_force_noise=scattering_force_noise(beams, disk),
        scatter_rate=_term("scatter_rate", scattering_momentum_rate, beams, disk, omega_z),
        gamma_bg=gamma_bg,
        gamma_m=gamma_m,
        n_R=n_r,
        n_bose=bose_occupation(env.temperature, omega_z),
        thermal_correction=correction,
        n_final=n_final,
        net_cooling=net_cooling,
        flags=flags,
        caveats=[POINTING_CAVEAT, SCATTER_CAVEAT],
        provenance=dict(PROVENANCE),
    )
    logger.debug("noise budget", n_min=report.n_min, correction=correction,
                 n_final=n_final, net_cooling=net_cooling)
    return report

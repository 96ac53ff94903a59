#!/usr/bin/env python3
"""
Optospring - Cavity Cooling
Fabry-Perot linewidth, backaction-limited phonon number, and the dynamical
backaction cooling rate of a drive laser with phase-diffusion linewidth.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from units_constants import C, DomainError

logger = structlog.get_logger(__name__)


class LosslessCavityError(DomainError):
    """Raised when the mirror reflectivities leave no measurable linewidth"""
    pass


class CoolingRegimeError(DomainError):
    """Raised when the drive is not red detuned"""
    pass


@dataclass(frozen=True)
class CavityConfig:
    """Fabry-Perot cavity and its drive laser, SI units.

    detuning is omega_laser - omega_cavity in s^-1 (negative = red),
    linewidth is the drive laser's phase-diffusion linewidth in s^-1.
    """
    length: float
    r_fixed: float
    r_moving: float
    wavelength: float
    power: float
    detuning: float
    linewidth: float = 0.0

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError("Cavity length must be positive")
        for name, r in (("r_fixed", self.r_fixed), ("r_moving", self.r_moving)):
            if not 0 < r < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {r}")
        if self.wavelength <= 0:
            raise DomainError("Cavity laser wavelength must be positive")
        if self.power < 0:
            raise DomainError("Input power must be non-negative")
        if self.linewidth < 0:
            raise DomainError("Laser linewidth must be non-negative")

    @property
    def omega_c(self) -> float:
        return 2.0 * math.pi * C / self.wavelength


@dataclass(frozen=True)
class CoolingResult:
    """Cavity linewidth and backaction figures, rates in s^-1"""
    kappa: float
    n_min: float
    gamma_rp: float
    gamma_rp_monochromatic: float

    @property
    def net_cooling(self) -> bool:
        return self.gamma_rp > 0


@dataclass(frozen=True)
class CoolingSurface:
    """gamma_rp(Delta, Gamma_L) / gamma_rp(Delta, 0) on a dense grid.

    ratios[i, j] belongs to linewidth_over_kappa[i] and detuning_over_kappa[j];
    undefined cells (zero monochromatic rate) hold NaN and are marked in
    `undefined`.
    """
    detuning_over_kappa: np.ndarray
    linewidth_over_kappa: np.ndarray
    ratios: np.ndarray
    undefined: np.ndarray


def finesse(cav: CavityConfig) -> float:
    """Two-mirror finesse pi (R_f R_m)^(1/4) / (1 - sqrt(R_f R_m))"""
    product = cav.r_fixed * cav.r_moving
    loss = 1.0 - math.sqrt(product)
    if loss <= 1e-15:
        raise LosslessCavityError("Mirror reflectivities describe a lossless cavity")
    return math.pi * product ** 0.25 / loss


def free_spectral_range(cav: CavityConfig) -> float:
    """c / 2L in Hz"""
    return C / (2.0 * cav.length)


def cavity_linewidth(cav: CavityConfig) -> float:
    """kappa = pi c / (F L)"""
    return math.pi * C / (finesse(cav) * cav.length)


def resolved_sideband_parameter(kappa: float, omega_z: float) -> float:
    """kappa / omega_z; below 1 is the resolved-sideband regime"""
    if omega_z <= 0:
        raise DomainError("omega_z must be positive")
    return kappa / omega_z


def min_phonon_number(detuning: float, omega_z: float, kappa: float) -> float:
    """-(4 (Delta + omega_z)^2 + kappa^2) / (16 omega_z Delta)"""
    if detuning >= 0:
        raise CoolingRegimeError(f"Detuning {detuning:.4g} s^-1 is not in the cooling regime (need < 0)")
    if omega_z <= 0 or kappa <= 0:
        raise DomainError("omega_z and kappa must be positive")
    return -(4.0 * (detuning + omega_z) ** 2 + kappa ** 2) / (16.0 * omega_z * detuning)


def optimal_detuning(omega_z: float, kappa: float) -> float:
    """Stationary point of the phonon-number formula, -sqrt(omega_z^2 + kappa^2/4)"""
    if omega_z <= 0 or kappa < 0:
        raise DomainError("omega_z must be positive and kappa non-negative")
    return -math.sqrt(omega_z ** 2 + kappa ** 2 / 4.0)


def sideband_weights(detuning, linewidth, kappa: float, omega_z: float) -> Tuple:
    """(A_+, A_-) of the phase-noise cooling rate; broadcasts over arrays"""
    width = 2.0 * linewidth + kappa
    common = (linewidth + kappa) * width ** 2 + 2.0 * linewidth * detuning ** 2 + kappa * omega_z ** 2

    def weight(shift):
        shifted = (detuning + shift) ** 2
        return (common + 2.0 * linewidth * shifted) / (width ** 2 + 4.0 * shifted)

    return weight(omega_z), weight(-omega_z)


def cooling_rate_phase_noise(cav: CavityConfig, omega_z: float, kappa: float, mass: float,
                             length: Optional[float] = None, detuning=None, linewidth=None):
    """Linewidth-modified backaction rate; positive means net cooling.

    `detuning` and `linewidth` default to the cavity's own values and may be
    arrays for grid evaluation.
    """
    length = cav.length if length is None else length
    detuning = cav.detuning if detuning is None else detuning
    linewidth = cav.linewidth if linewidth is None else linewidth
    if mass <= 0 or length <= 0:
        raise DomainError("Mass and cavity length must be positive")

    a_plus, a_minus = sideband_weights(detuning, linewidth, kappa, omega_z)
    prefactor = cav.omega_c * kappa / (mass * omega_z * length ** 2) if omega_z > 0 else 0.0
    denominator = (((2.0 * linewidth + kappa) ** 2 + 4.0 * detuning ** 2)
                   * (kappa ** 2 + omega_z ** 2))
    # A_- < A_+ for red detuning, so with the leading minus cooling comes out positive
    return -prefactor * 8.0 * cav.power * (a_minus - a_plus) / denominator


def cooling_summary(cav: CavityConfig, omega_z: float, mass: float) -> CoolingResult:
    """kappa, n_min and both cooling rates for one configuration"""
    kappa = cavity_linewidth(cav)
    try:
        n_min = min_phonon_number(cav.detuning, omega_z, kappa)
    except CoolingRegimeError:
        n_min = math.nan
    result = CoolingResult(
        kappa=kappa,
        n_min=n_min,
        gamma_rp=float(cooling_rate_phase_noise(cav, omega_z, kappa, mass)),
        gamma_rp_monochromatic=float(cooling_rate_phase_noise(cav, omega_z, kappa, mass, linewidth=0.0)),
    )
    logger.debug("cooling summary", kappa=kappa, n_min=n_min, gamma_rp=result.gamma_rp)
    return result


def cooling_ratio_surface(cav: CavityConfig, omega_z: float, mass: float,
                          detuning_over_kappa: Sequence[float],
                          linewidth_over_kappa: Sequence[float]) -> CoolingSurface:
    """Cooling rate with linewidth scaled to the monochromatic rate"""
    detunings = np.asarray(detuning_over_kappa, dtype=float)
    linewidths = np.asarray(linewidth_over_kappa, dtype=float)
    if np.any(detunings >= 0):
        raise CoolingRegimeError("Detuning grid must be strictly negative")
    if np.any(linewidths < 0):
        raise DomainError("Linewidth grid must be non-negative")

    kappa = cavity_linewidth(cav)
    delta = detunings[np.newaxis, :] * kappa
    gamma_l = linewidths[:, np.newaxis] * kappa

    broadened = cooling_rate_phase_noise(cav, omega_z, kappa, mass, detuning=delta, linewidth=gamma_l)
    reference = cooling_rate_phase_noise(cav, omega_z, kappa, mass, detuning=delta, linewidth=0.0)
    broadened = np.broadcast_to(broadened, (linewidths.size, detunings.size))
    reference = np.broadcast_to(reference, broadened.shape)

    undefined = reference == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(undefined, np.nan, broadened / np.where(undefined, 1.0, reference))

    if undefined.any():
        logger.warning("cooling ratio undefined", cells=int(undefined.sum()))
    return CoolingSurface(detunings, linewidths, ratios, undefined)

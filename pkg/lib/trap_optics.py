#!/usr/bin/env python3
"""
Optospring - Trap Optics
The crossed-beam optical tweezer: intensity field, gradient-force potential,
axial and transverse trap frequencies, and the wobble frequency.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
import structlog

from geometry_material import DiskMirror, Polarizability, moment_of_inertia_x
from units_constants import C, EPS0, DomainError

logger = structlog.get_logger(__name__)

# finite-difference step as a fraction of the beam waist along the sampled axis
FD_STEP_FRACTION = 1e-3

# omega_z / omega_wob above which the wobble mode is considered decoupled
WOBBLE_SEPARATION = 5.0


class UntrappedAxisError(DomainError):
    """Raised when the potential has no restoring curvature along an axis"""
    pass


class ApproximationWarning(UserWarning):
    """A validity condition of the quasi-static field model is violated"""
    pass


@dataclass(frozen=True)
class TrapBeams:
    """Two orthogonal elliptical Gaussian beams, SI units.

    intensity_x belongs to the beam travelling along x, intensity_y to the one
    travelling along y. rin is S_I(2 omega_z) in Hz^-1, pointing_noise is
    S_x(omega_z) in m^2/Hz, theta_z the residual beam/disk angle in rad.
    """
    intensity_x: float
    intensity_y: float
    waist_x: float
    waist_y: float
    waist_z: float
    wavelength: float
    rin: float = 0.0
    pointing_noise: float = 0.0
    theta_z: float = 0.0

    def __post_init__(self):
        if self.intensity_x < 0 or self.intensity_y < 0:
            raise DomainError("Beam intensities must be non-negative")
        if min(self.waist_x, self.waist_y, self.waist_z) <= 0:
            raise DomainError("Beam waists must be positive")
        if self.wavelength <= 0:
            raise DomainError("Trap wavelength must be positive")
        if self.rin < 0 or self.pointing_noise < 0 or self.theta_z < 0:
            raise DomainError("Noise spectra and beam angle must be non-negative")

    @property
    def total_intensity(self) -> float:
        return self.intensity_x + self.intensity_y

    def rayleigh_range(self, waist: float) -> float:
        return math.pi * waist ** 2 / self.wavelength


@dataclass(frozen=True)
class TrapCharacterization:
    """Derived trap frequencies (s^-1) and axial depth (J)"""
    omega_z: float
    omega_x: float
    omega_y: float
    omega_wob: float
    potential_depth_z: float

    @property
    def wobble_ratio(self) -> float:
        return self.omega_z / self.omega_wob if self.omega_wob > 0 else math.inf

    @property
    def parametric_coupling_clear(self) -> bool:
        return self.wobble_ratio > WOBBLE_SEPARATION


def rayleigh_ranges(beams: TrapBeams) -> Tuple[float, float, float]:
    """(x_r, y_r, z_r) = pi w0^2 / lambda per axis"""
    return (beams.rayleigh_range(beams.waist_x),
            beams.rayleigh_range(beams.waist_y),
            beams.rayleigh_range(beams.waist_z))


def intensity(r, beams: TrapBeams):
    """Total intensity of both trapping beams at r = (x, y, z).

    `r` may be a 3-sequence or an array whose last axis has length 3.
    """
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    x_r, y_r, z_r = rayleigh_ranges(beams)

    # beam travelling along x diverges with x
    sy = 1.0 + x ** 2 / y_r ** 2
    sz = 1.0 + x ** 2 / z_r ** 2
    beam_x = beams.intensity_x * np.exp(
        -2.0 * y ** 2 / (beams.waist_y ** 2 * sy) - 2.0 * z ** 2 / (beams.waist_z ** 2 * sz)
    ) / np.sqrt(sy * sz)

    # beam travelling along y diverges with y
    tx = 1.0 + y ** 2 / x_r ** 2
    tz = 1.0 + y ** 2 / z_r ** 2
    beam_y = beams.intensity_y * np.exp(
        -2.0 * x ** 2 / (beams.waist_x ** 2 * tx) - 2.0 * z ** 2 / (beams.waist_z ** 2 * tz)
    ) / np.sqrt(tx * tz)

    total = beam_x + beam_y
    return float(total) if total.ndim == 0 else total


def potential(r, beams: TrapBeams, pol: Polarizability):
    """Gradient-force potential V(r) = -alpha_perp I(r) / (2 eps0 c)"""
    return -pol.alpha_perp * intensity(r, beams) / (2.0 * EPS0 * C)


def potential_depth_z(beams: TrapBeams, pol: Polarizability) -> float:
    """V(0,0,inf) - V(0,0,0)"""
    return pol.alpha_perp * beams.total_intensity / (2.0 * EPS0 * C)


def _second_derivative(f: Callable[[float], float], step: float) -> float:
    """Central difference at 0 with one Richardson extrapolation"""
    def central(h):
        return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)

    coarse = central(step)
    fine = central(step / 2.0)
    return (4.0 * fine - coarse) / 3.0


def curvature(beams: TrapBeams, pol: Polarizability, axis: int) -> float:
    """d^2 V / d mu^2 at the origin along axis 0, 1 or 2"""
    waists = (beams.waist_x, beams.waist_y, beams.waist_z)
    step = FD_STEP_FRACTION * waists[axis]

    def along_axis(s):
        point = [0.0, 0.0, 0.0]
        point[axis] = s
        return potential(point, beams, pol)

    return _second_derivative(along_axis, step)


def _require_mass(disk: DiskMirror) -> None:
    if disk.mass <= 0:
        raise DomainError("Disk mass must be positive for a trap frequency")


def axial_frequency(beams: TrapBeams, pol: Polarizability, disk: DiskMirror) -> float:
    """Axial frequency sqrt(2 alpha_perp (I0x + I0y) / (m c eps0 w0z^2))"""
    _require_mass(disk)
    return math.sqrt(2.0 * pol.alpha_perp * beams.total_intensity
                     / (disk.mass * C * EPS0 * beams.waist_z ** 2))


def transverse_frequencies(beams: TrapBeams, pol: Polarizability, disk: DiskMirror) -> Tuple[float, float]:
    """(omega_x, omega_y) from the numerical Hessian of the potential"""
    _require_mass(disk)
    omegas = []
    for axis, name in ((0, "x"), (1, "y")):
        k = curvature(beams, pol, axis)
        if k <= 0:
            raise UntrappedAxisError(f"No restoring curvature along {name} (d2V = {k:.3e} J/m^2)")
        omegas.append(math.sqrt(k / disk.mass))
    return omegas[0], omegas[1]


def wobble_frequency(beams: TrapBeams, pol: Polarizability, disk: DiskMirror) -> float:
    """Rocking frequency about x; torque from the y-travelling beam only"""
    anisotropy = pol.alpha_perp - pol.alpha_z
    if anisotropy < 0:
        raise DomainError("Wobble restoring torque requires alpha_perp >= alpha_z")
    inertia = moment_of_inertia_x(disk)
    if inertia <= 0:
        raise DomainError("Disk mass must be positive for a wobble frequency")
    return math.sqrt(12.0 * beams.intensity_y * anisotropy / (EPS0 * C * inertia))


def check_field_approximation(beams: TrapBeams, disk: DiskMirror) -> List[str]:
    """Warn when h < w0z or d < x_r, y_r does not hold"""
    x_r, y_r, _ = rayleigh_ranges(beams)
    violated = []
    if disk.height >= beams.waist_z:
        violated.append(f"disk height {disk.height:.3e} m >= axial waist {beams.waist_z:.3e} m")
    if disk.diameter >= x_r:
        violated.append(f"disk diameter {disk.diameter:.3e} m >= Rayleigh range x_r {x_r:.3e} m")
    if disk.diameter >= y_r:
        violated.append(f"disk diameter {disk.diameter:.3e} m >= Rayleigh range y_r {y_r:.3e} m")

    for condition in violated:
        logger.warning("field approximation violated", condition=condition)
        warnings.warn(f"Field does not vary little over the disk: {condition}", ApproximationWarning)
    return violated


def characterize(beams: TrapBeams, pol: Polarizability, disk: DiskMirror) -> TrapCharacterization:
    """All trap frequencies at once"""
    check_field_approximation(beams, disk)
    omega_x, omega_y = transverse_frequencies(beams, pol, disk)
    trap = TrapCharacterization(
        omega_z=axial_frequency(beams, pol, disk),
        omega_x=omega_x,
        omega_y=omega_y,
        omega_wob=wobble_frequency(beams, pol, disk),
        potential_depth_z=potential_depth_z(beams, pol),
    )
    logger.debug("trap characterized", omega_z=trap.omega_z, omega_x=omega_x,
                 omega_y=omega_y, omega_wob=trap.omega_wob)
    return trap

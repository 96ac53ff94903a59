#!/usr/bin/env python3
"""
Optospring - Geometry and Material
Models the Bragg disk as an effective dielectric spheroid: eccentricity,
depolarization factors, static polarizabilities and moment of inertia.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import structlog

from units_constants import EPS0, DomainError

logger = structlog.get_logger(__name__)

# Below this eccentricity the closed form loses digits to cancellation
SERIES_THRESHOLD = 1e-3


class ProlateGeometryError(DomainError):
    """Raised for d <= h, where the oblate eccentricity is undefined"""
    pass


@dataclass(frozen=True)
class DiskMirror:
    """The levitated mirror; SI units throughout"""
    diameter: float
    height: float
    mass: float
    eps_r: float
    reflectivity: float = 1.0

    def __post_init__(self):
        if self.diameter <= 0 or self.height <= 0:
            raise DomainError("Disk diameter and height must be positive")
        if self.diameter <= self.height:
            raise ProlateGeometryError(
                f"Disk diameter ({self.diameter}) must exceed its height ({self.height})")
        if self.mass < 0:
            raise DomainError("Disk mass must be non-negative")
        if self.eps_r < 1:
            raise DomainError(f"Relative permittivity must be >= 1, got {self.eps_r}")
        if not 0 < self.reflectivity <= 1:
            raise DomainError(f"Reflectivity must lie in (0, 1], got {self.reflectivity}")

    @property
    def volume(self) -> float:
        # cylinder volume; the spheroid formula is only used for the shape factors
        return math.pi * (self.diameter / 2) ** 2 * self.height


@dataclass(frozen=True)
class Polarizability:
    """Static polarizability components in C m^2 V^-1"""
    alpha_perp: float
    alpha_z: float


def cross_section_area(disk: DiskMirror) -> float:
    """Face area pi (d/2)^2"""
    return math.pi * (disk.diameter / 2) ** 2


def eccentricity(disk: DiskMirror) -> float:
    """e = sqrt((d/h)^2 - 1)"""
    ratio = disk.diameter / disk.height
    if ratio <= 1:
        raise ProlateGeometryError("Eccentricity requires an oblate disk (d > h)")
    return math.sqrt(ratio * ratio - 1.0)


def depolarization_factors(e: float) -> Tuple[float, float]:
    """Return (N_z, N_perp) for an oblate spheroid of eccentricity e"""
    if e < 0:
        raise DomainError(f"Eccentricity must be non-negative, got {e}")

    if e < SERIES_THRESHOLD:
        e2 = e * e
        n_z = 1.0 / 3.0 + 2.0 * e2 / 15.0 - 2.0 * e2 * e2 / 35.0
    else:
        n_z = (1.0 + e * e) * (e - math.atan(e)) / e ** 3

    return n_z, 0.5 * (1.0 - n_z)


def polarizability_from_factors(volume: float, eps_r: float, n_z: float, n_perp: float) -> Polarizability:
    """Spheroid polarizability eps0 V (eps_r - 1) / (1 + N (eps_r - 1))"""
    chi = eps_r - 1.0
    return Polarizability(
        alpha_perp=EPS0 * volume * chi / (1.0 + n_perp * chi),
        alpha_z=EPS0 * volume * chi / (1.0 + n_z * chi),
    )


def polarizability(disk: DiskMirror) -> Polarizability:
    """Static polarizabilities of the disk treated as a spheroid"""
    n_z, n_perp = depolarization_factors(eccentricity(disk))
    pol = polarizability_from_factors(disk.volume, disk.eps_r, n_z, n_perp)
    logger.debug("polarizability", n_z=n_z, n_perp=n_perp,
                 alpha_perp=pol.alpha_perp, alpha_z=pol.alpha_z)
    return pol


def moment_of_inertia_x(disk: DiskMirror) -> float:
    """I_x = m (3 d^2 / 4 + h^2)

    Kept exactly as printed alongside the wobble formula. The textbook disk
    value carries an extra 1/12; the printed form is the one consistent with
    the quoted wobble frequency.
    """
    return disk.mass * (3.0 * disk.diameter ** 2 / 4.0 + disk.height ** 2)

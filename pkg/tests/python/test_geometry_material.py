#!/usr/bin/env python3
"""
Unit tests for geometry_material.py
"""

import math
import os
import sys

import numpy as np
import pytest

# Add the lib directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../lib'))

from geometry_material import (SERIES_THRESHOLD, DiskMirror, ProlateGeometryError, cross_section_area,
                               depolarization_factors, eccentricity, moment_of_inertia_x, polarizability,
                               polarizability_from_factors)
from units_constants import EPS0, DomainError


def design_disk(**overrides):
    values = dict(diameter=100e-6, height=4e-6, mass=1.48e-10, eps_r=5.9)
    values.update(overrides)
    return DiskMirror(**values)


@pytest.mark.unit
class TestDiskMirror:
    """Construction and validation"""

    def test_volume_is_cylinder(self):
        """Test volume uses pi (d/2)^2 h"""
        assert design_disk().volume == pytest.approx(math.pi * 1e-14)

    def test_cross_section(self):
        """Test face area"""
        assert cross_section_area(design_disk()) == pytest.approx(7.853982e-9, rel=1e-6)

    @pytest.mark.parametrize("diameter,height", [(3e-6, 4e-6), (4e-6, 4e-6)])
    def test_prolate_rejected(self, diameter, height):
        """Test d <= h raises the prolate error"""
        with pytest.raises(ProlateGeometryError):
            design_disk(diameter=diameter, height=height)

    @pytest.mark.parametrize("field,value", [
        ("diameter", 0.0),
        ("height", -1e-6),
        ("mass", -1.0),
        ("eps_r", 0.5),
        ("reflectivity", 0.0),
        ("reflectivity", 1.5),
    ])
    def test_invalid_fields(self, field, value):
        """Test each invariant raises DomainError"""
        with pytest.raises(DomainError):
            design_disk(**{field: value})


@pytest.mark.unit
class TestEccentricity:
    """Oblate eccentricity"""

    def test_design_point(self):
        """Test d=100 um, h=4 um gives e = 24.98"""
        assert eccentricity(design_disk()) == pytest.approx(24.98, abs=0.01)

    def test_exact_algebra(self):
        """Test d = 2h gives sqrt(3)"""
        assert eccentricity(design_disk(diameter=8e-6)) == pytest.approx(math.sqrt(3))

    def test_sphere_limit(self):
        """Test d/h -> 1 drives e to 0"""
        assert eccentricity(design_disk(diameter=4.000004e-6)) < 2e-3


@pytest.mark.unit
class TestDepolarization:
    """Depolarization factors of the oblate spheroid"""

    def test_design_point(self):
        """Test e = 24.98 values"""
        n_z, n_perp = depolarization_factors(24.98)
        assert n_z == pytest.approx(0.9403, abs=1e-4)
        assert n_perp == pytest.approx(0.0299, abs=1e-4)

    def test_sphere(self):
        """Test e = 0 is isotropic"""
        n_z, n_perp = depolarization_factors(0.0)
        assert n_z == pytest.approx(1 / 3, rel=1e-15)
        assert n_perp == pytest.approx(1 / 3, rel=1e-15)

    @pytest.mark.parametrize("e", [0.0, 1e-5, 0.5, 3.0, 24.98, 1e4])
    def test_sum_rule(self, e):
        """Test N_z + 2 N_perp = 1"""
        n_z, n_perp = depolarization_factors(e)
        assert n_z + 2 * n_perp == pytest.approx(1.0, abs=1e-15)

    def test_monotone(self):
        """Test N_z increases over a log-spaced grid and tends to 1"""
        grid = np.logspace(-6, 6, 200)
        values = np.array([depolarization_factors(e)[0] for e in grid])
        assert np.all(np.diff(values) > 0)
        assert values[0] == pytest.approx(1 / 3, rel=1e-9)
        assert values[-1] == pytest.approx(1.0, abs=1e-5)

    def test_series_crossover(self):
        """Test series and closed form agree on both sides of the threshold"""
        below = depolarization_factors(SERIES_THRESHOLD * (1 - 1e-9))[0]
        above = depolarization_factors(SERIES_THRESHOLD * (1 + 1e-9))[0]
        assert below == pytest.approx(above, rel=1e-8)

        e = 0.9 * SERIES_THRESHOLD
        closed = (1 + e * e) * (e - math.atan(e)) / e ** 3
        assert depolarization_factors(e)[0] == pytest.approx(closed, rel=1e-8)

    def test_negative_rejected(self):
        """Test e < 0 raises DomainError"""
        with pytest.raises(DomainError):
            depolarization_factors(-0.1)


@pytest.mark.unit
class TestPolarizability:
    """Static polarizability of the disk"""

    def test_design_point(self):
        """Test the reference disk within 2%"""
        pol = polarizability(design_disk())
        assert pol.alpha_perp == pytest.approx(1.20e-24, rel=0.02)
        assert pol.alpha_z == pytest.approx(2.44e-25, rel=0.02)
        assert pol.alpha_perp > pol.alpha_z > 0

    def test_vacuum_disk(self):
        """Test eps_r = 1 gives zero polarizability"""
        pol = polarizability(design_disk(eps_r=1.0))
        assert pol.alpha_perp == 0.0
        assert pol.alpha_z == 0.0

    def test_sphere_limit(self):
        """Test N = 1/3 reduces to the Clausius-Mossotti form"""
        volume, eps_r = 1e-15, 5.9
        pol = polarizability_from_factors(volume, eps_r, 1 / 3, 1 / 3)
        expected = 3 * EPS0 * volume * (eps_r - 1) / (eps_r + 2)
        assert pol.alpha_perp == pytest.approx(expected, rel=1e-12)
        assert pol.alpha_z == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_eps_r(self):
        """Test both components grow with eps_r"""
        values = [polarizability(design_disk(eps_r=eps)) for eps in (1.5, 2.0, 4.0, 5.9, 10.0)]
        perp = [p.alpha_perp for p in values]
        axial = [p.alpha_z for p in values]
        assert perp == sorted(perp)
        assert axial == sorted(axial)


@pytest.mark.unit
class TestMomentOfInertia:
    """Moment of inertia as used by the wobble frequency"""

    def test_design_point(self):
        """Test I_x = 1.11e-18 kg m^2 within 1%"""
        assert moment_of_inertia_x(design_disk()) == pytest.approx(1.11e-18, rel=0.01)

    def test_thin_disk_limit(self):
        """Test h -> 0 leaves 3 m d^2 / 4"""
        disk = design_disk(height=1e-12)
        assert moment_of_inertia_x(disk) == pytest.approx(0.75 * disk.mass * disk.diameter ** 2, rel=1e-9)

    def test_massless(self):
        """Test m = 0 gives zero"""
        assert moment_of_inertia_x(design_disk(mass=0.0)) == 0.0

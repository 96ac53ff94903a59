#!/usr/bin/env python3
"""
Unit tests for design_checks.py
"""

import os
import sys
from dataclasses import replace

import pytest

# Add the lib directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../lib'))

from design_checks import FAIL, PASS, WARN, DesignChecker
from run_config import load_config


def statuses(report):
    return {check.name: check.status for check in report.checks}


@pytest.mark.unit
class TestDesignChecker:
    """Validity checks at and around the reference design"""

    def setup_method(self):
        """Set up test fixtures"""
        self.point = load_config().to_domain()

    def test_design_point(self):
        """Test the reference design passes everything but sideband resolution"""
        report = DesignChecker(self.point).run_all_checks()
        assert statuses(report) == {
            "field_approximation": PASS,
            "wobble_separation": PASS,
            "resolved_sideband": WARN,
            "cooling_regime": PASS,
            "net_cooling": PASS,
            "quantum_regime": PASS,
        }
        assert report.overall_status == WARN
        assert report.summary == {PASS: 5, WARN: 1, FAIL: 0}
        assert len(report.recommendations) == 1
        assert "kappa" in report.recommendations[0]

    def test_details(self):
        """Test checks carry the figures they judged"""
        report = DesignChecker(self.point).run_all_checks()
        by_name = {check.name: check for check in report.checks}
        assert by_name["wobble_separation"].details["ratio"] == pytest.approx(7.0, rel=0.02)
        assert by_name["resolved_sideband"].details["ratio"] == pytest.approx(1.64, rel=0.02)
        assert by_name["quantum_regime"].details["n_final"] == pytest.approx(0.20, rel=0.1)
        assert all(check.duration_ms is not None for check in report.checks)

    def test_blue_detuning(self):
        """Test a blue drive fails the regime, cooling and occupation checks"""
        point = replace(self.point, cavity=replace(self.point.cavity, detuning=1.6e5))
        report = DesignChecker(point).run_all_checks()
        result = statuses(report)
        assert result["cooling_regime"] == FAIL
        assert result["net_cooling"] == FAIL
        assert result["quantum_regime"] == FAIL
        assert report.overall_status == FAIL
        assert any("red" in r for r in report.recommendations)

    def test_zero_power(self):
        """Test an undriven cavity reports no net cooling"""
        point = replace(self.point, cavity=replace(self.point.cavity, power=0.0))
        report = DesignChecker(point).run_all_checks()
        assert statuses(report)["net_cooling"] == FAIL
        assert statuses(report)["cooling_regime"] == PASS
        assert any("power" in r for r in report.recommendations)

    def test_wide_axial_waist(self):
        """Test a softer axial trap brings omega_wob too close"""
        point = replace(self.point, beams=replace(self.point.beams, waist_z=12e-6))
        report = DesignChecker(point).run_all_checks()
        wobble = next(check for check in report.checks if check.name == "wobble_separation")
        assert wobble.status == FAIL
        assert "not above" in wobble.message

    def test_narrow_axial_waist(self):
        """Test a waist thinner than the disk only warns"""
        point = replace(self.point, beams=replace(self.point.beams, waist_z=3e-6))
        report = DesignChecker(point).run_all_checks()
        assert statuses(report)["field_approximation"] == WARN

    def test_dark_trap(self):
        """Test checks that cannot be evaluated fail instead of raising"""
        dark = replace(self.point.beams, intensity_x=0.0, intensity_y=0.0)
        report = DesignChecker(replace(self.point, beams=dark)).run_all_checks()
        result = statuses(report)
        assert len(result) == 6
        assert result["wobble_separation"] == FAIL
        assert result["net_cooling"] == FAIL
        failed = next(check for check in report.checks if check.name == "net_cooling")
        assert "could not be evaluated" in failed.message

    def test_to_dict(self):
        """Test the report serializes to plain data"""
        data = DesignChecker(self.point).run_all_checks().to_dict()
        assert data["overall_status"] == WARN
        assert len(data["checks"]) == 6
        assert data["checks"][0]["name"] == "field_approximation"

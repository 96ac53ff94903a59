#!/usr/bin/env python3
"""
Optospring - Design Checks
Pass/warn/fail checks of the validity conditions behind a design point:
field approximation, wobble decoupling, sideband resolution, cooling regime
and the final occupation.
"""

import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import structlog

from cavity_cooling import cavity_linewidth, resolved_sideband_parameter
from geometry_material import polarizability
from noise_budget import NoiseBudgetReport, full_budget
from run_config import DesignPoint
from trap_optics import WOBBLE_SEPARATION, ApproximationWarning, characterize, check_field_approximation
from units_constants import DomainError

logger = structlog.get_logger(__name__)

PASS, WARN, FAIL = "pass", "warn", "fail"

RESOLVED_LIMIT = 1.0
MARGINAL_LIMIT = 3.0


@dataclass
class DesignCheckResult:
    """Result of one design check"""
    name: str
    status: str  # "pass", "fail", "warn"
    message: str
    details: Optional[Dict[str, Any]] = None
    duration_ms: Optional[int] = None


@dataclass
class DesignCheckReport:
    overall_status: str
    checks: List[DesignCheckResult]
    summary: Dict[str, int]
    recommendations: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class DesignChecker:
    """Runs every validity check for one design point"""

    def __init__(self, point: DesignPoint):
        self.point = point
        self.checks: List[DesignCheckResult] = []
        self._budget: Optional[NoiseBudgetReport] = None

    def run_all_checks(self) -> DesignCheckReport:
        self.checks = []
        self._budget = None

        self._timed(self._check_field_approximation)
        self._timed(self._check_wobble_separation)
        self._timed(self._check_resolved_sideband)
        self._timed(self._check_cooling_regime)
        self._timed(self._check_net_cooling)
        self._timed(self._check_quantum_regime)

        return self._generate_report()

    def _timed(self, check) -> None:
        start = time.perf_counter()
        try:
            result = check()
        except DomainError as e:
            result = DesignCheckResult(check.__name__.replace("_check_", ""), FAIL,
                                       f"Check could not be evaluated: {e}", {"error": str(e)})
        result.duration_ms = int((time.perf_counter() - start) * 1000)
        self.checks.append(result)

    def _budget_report(self) -> NoiseBudgetReport:
        if self._budget is None:
            p = self.point
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ApproximationWarning)
                self._budget = full_budget(p.disk, p.beams, p.cavity, p.environment)
        return self._budget

    def _check_field_approximation(self) -> DesignCheckResult:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ApproximationWarning)
            violated = check_field_approximation(self.point.beams, self.point.disk)
        if violated:
            return DesignCheckResult("field_approximation", WARN,
                                     f"{len(violated)} field-uniformity condition(s) violated",
                                     {"violated": violated})
        return DesignCheckResult("field_approximation", PASS,
                                 "Field varies little over the disk (h < w0z, d < x_r, y_r)")

    def _check_wobble_separation(self) -> DesignCheckResult:
        p = self.point
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ApproximationWarning)
            trap = characterize(p.beams, polarizability(p.disk), p.disk)
        details = {"omega_z": trap.omega_z, "omega_wob": trap.omega_wob, "ratio": trap.wobble_ratio}
        if trap.parametric_coupling_clear:
            return DesignCheckResult("wobble_separation", PASS,
                                     f"omega_z / omega_wob = {trap.wobble_ratio:.2f}", details)
        return DesignCheckResult("wobble_separation", FAIL,
                                 f"omega_z / omega_wob = {trap.wobble_ratio:.2f} is not above "
                                 f"{WOBBLE_SEPARATION:g}; parametric coupling to the wobble mode possible",
                                 details)

    def _check_resolved_sideband(self) -> DesignCheckResult:
        report = self._budget_report()
        kappa = cavity_linewidth(self.point.cavity)
        ratio = resolved_sideband_parameter(kappa, report.omega_z)
        details = {"kappa": kappa, "omega_z": report.omega_z, "ratio": ratio}
        if ratio <= RESOLVED_LIMIT:
            status, message = PASS, f"Resolved sidebands, kappa / omega_z = {ratio:.2f}"
        elif ratio <= MARGINAL_LIMIT:
            status, message = WARN, f"Marginally resolved sidebands, kappa / omega_z = {ratio:.2f}"
        else:
            status, message = FAIL, f"Unresolved sidebands, kappa / omega_z = {ratio:.2f}"
        return DesignCheckResult("resolved_sideband", status, message, details)

    def _check_cooling_regime(self) -> DesignCheckResult:
        detuning = self.point.cavity.detuning
        if detuning < 0:
            return DesignCheckResult("cooling_regime", PASS, f"Red detuned drive, Delta = {detuning:.4g} s^-1")
        return DesignCheckResult("cooling_regime", FAIL,
                                 f"Drive is not red detuned (Delta = {detuning:.4g} s^-1)")

    def _check_net_cooling(self) -> DesignCheckResult:
        report = self._budget_report()
        details = {"gamma_rp": report.gamma_rp, "gamma_m": report.gamma_m}
        if report.net_cooling:
            return DesignCheckResult("net_cooling", PASS, f"gamma_rp = {report.gamma_rp:.4g} s^-1", details)
        return DesignCheckResult("net_cooling", FAIL, "No net cooling from the cavity drive", details)

    def _check_quantum_regime(self) -> DesignCheckResult:
        report = self._budget_report()
        n_final = report.n_final
        details = {"n_min": report.n_min, "n_final": n_final}
        if math.isnan(n_final):
            return DesignCheckResult("quantum_regime", FAIL, "Final occupation undefined", details)
        if n_final < 1.0:
            return DesignCheckResult("quantum_regime", PASS, f"n_final = {n_final:.3f} < 1", details)
        return DesignCheckResult("quantum_regime", WARN, f"n_final = {n_final:.3g} is not below 1", details)

    def _generate_report(self) -> DesignCheckReport:
        summary = {
            PASS: sum(1 for c in self.checks if c.status == PASS),
            WARN: sum(1 for c in self.checks if c.status == WARN),
            FAIL: sum(1 for c in self.checks if c.status == FAIL),
        }
        if summary[FAIL] > 0:
            overall_status = FAIL
        elif summary[WARN] > 0:
            overall_status = WARN
        else:
            overall_status = PASS

        logger.info("design checks", overall=overall_status, **summary)
        return DesignCheckReport(
            overall_status=overall_status,
            checks=self.checks,
            summary=summary,
            recommendations=self._generate_recommendations(),
        )

    def _generate_recommendations(self) -> List[str]:
        recommendations = []
        for check in self.checks:
            if check.status == PASS:
                continue
            if check.name == "field_approximation":
                recommendations.append("Widen the axial waist or shrink the disk so the field is uniform over it")
            elif check.name == "wobble_separation":
                recommendations.append("Lower intensity_y or raise intensity_x to move omega_wob away from omega_z")
            elif check.name == "resolved_sideband":
                recommendations.append("Raise the mirror reflectivities or lengthen the cavity to narrow kappa")
            elif check.name == "cooling_regime":
                recommendations.append("Set a negative (red) cavity detuning")
            elif check.name == "net_cooling":
                recommendations.append("Increase the cavity input power")
            elif check.name == "quantum_regime" and check.status == WARN:
                recommendations.append("Run `optospring optimize` to move the detuning to its optimum")
        return recommendations

#!/usr/bin/env python3
"""
Optospring - Report Writer
Deterministic text, CSV, JSON and Markdown renderings of noise budgets,
cooling-ratio surfaces and oracle runs.
"""

import csv
import io
import json
import math
from dataclasses import fields
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from cavity_cooling import CoolingSurface
from noise_budget import NoiseBudgetReport

# 9 significant digits in scientific notation
NUMBER_FORMAT = "{:.8e}"
FLAG_SEPARATOR = ";"


def format_number(value: float) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return NUMBER_FORMAT.format(value)


def _csv_text(rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


class ReportWriter:
    """Serializes NoiseBudgetReport objects; column order follows the dataclass"""

    def __init__(self, leading_columns: Optional[List[str]] = None):
        self.leading_columns = list(leading_columns or [])

    @staticmethod
    def numeric_columns() -> List[str]:
        return [f.name for f in fields(NoiseBudgetReport) if f.type in (float, "float")]

    def csv_header(self) -> List[str]:
        return self.leading_columns + self.numeric_columns() + ["net_cooling", "flags"]

    def csv_row(self, report: NoiseBudgetReport, leading: Sequence[float] = ()) -> List[str]:
        if len(leading) != len(self.leading_columns):
            raise ValueError(f"Expected {len(self.leading_columns)} leading values, got {len(leading)}")
        values = [format_number(v) for v in leading]
        values += [format_number(getattr(report, name)) for name in self.numeric_columns()]
        values.append("true" if report.net_cooling else "false")
        values.append(FLAG_SEPARATOR.join(report.flags))
        return values

    def to_csv(self, reports: Sequence[NoiseBudgetReport],
               leading: Optional[Sequence[Sequence[float]]] = None) -> str:
        leading = leading if leading is not None else [()] * len(reports)
        rows = [self.csv_header()]
        rows += [self.csv_row(r, lead) for r, lead in zip(reports, leading)]
        return _csv_text(rows)

    def to_key_value(self, report: NoiseBudgetReport) -> str:
        """One `key = value` line per field; flags and caveats last"""
        lines = [f"{name} = {format_number(getattr(report, name))}" for name in self.numeric_columns()]
        lines.append(f"net_cooling = {'true' if report.net_cooling else 'false'}")
        lines.append(f"flags = {FLAG_SEPARATOR.join(report.flags)}")
        for i, caveat in enumerate(report.caveats, 1):
            lines.append(f"caveat_{i} = {caveat}")
        return "\n".join(lines) + "\n"

    def to_json(self, report: NoiseBudgetReport) -> str:
        data = report.to_dict()
        for key, value in data.items():
            if isinstance(value, float) and not math.isfinite(value):
                data[key] = format_number(value)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    def to_markdown(self, report: NoiseBudgetReport) -> str:
        md_lines = [
            "# Noise Budget",
            "",
            "| quantity | value | formula |",
            "|---|---|---|",
        ]
        for name in self.numeric_columns():
            formula = report.provenance.get(name, "")
            md_lines.append(f"| {name} | {format_number(getattr(report, name))} | `{formula}` |")
        md_lines.append("")
        if report.flags:
            md_lines.extend(["## Flags", ""] + [f"- {flag}" for flag in report.flags] + [""])
        if report.caveats:
            md_lines.extend(["## Caveats", ""] + [f"- {caveat}" for caveat in report.caveats] + [""])
        return "\n".join(md_lines)


def surface_to_csv(surface: CoolingSurface) -> str:
    """Header row of Delta/kappa values, first column Gamma_L/kappa, body ratios"""
    rows = [["linewidth_over_kappa"] + [format_number(d) for d in surface.detuning_over_kappa]]
    for i, gamma in enumerate(surface.linewidth_over_kappa):
        rows.append([format_number(gamma)] + [format_number(r) for r in surface.ratios[i]])
    return _csv_text(rows)


def trajectory_to_csv(times: np.ndarray, mean_energy: np.ndarray, stderr_energy: np.ndarray) -> str:
    rows = [["t", "mean_energy", "stderr_energy"]]
    rows += [[format_number(t), format_number(e), format_number(s)]
             for t, e, s in zip(times, mean_energy, stderr_energy)]
    return _csv_text(rows)


def stats_to_key_value(values: Dict[str, Any]) -> str:
    lines = []
    for key, value in values.items():
        if isinstance(value, (float, np.floating)):
            value = format_number(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"

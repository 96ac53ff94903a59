#!/usr/bin/env python3
"""
Optospring - Run Configuration
Parses the sectioned design-point files ([disk], [beams], [cavity],
[environment], optional [oracle]) from INI or YAML, validates every key with
pydantic, and converts the natural units of the file to SI domain objects.
"""

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import structlog
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from cavity_cooling import CavityConfig
from geometry_material import DiskMirror, polarizability
from langevin_oracle import SdeConfig
from noise_budget import Environment
from trap_optics import TrapBeams, axial_frequency
from units_constants import DomainError, to_si

logger = structlog.get_logger(__name__)

YAML_SUFFIXES = (".yml", ".yaml")
DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "config" / "design_point.ini"


class ConfigError(DomainError):
    """Invalid configuration; carries the offending section, key and line when known"""

    def __init__(self, message: str, section: Optional[str] = None,
                 key: Optional[str] = None, line: Optional[int] = None):
        location = ".".join(p for p in (section, key) if p)
        prefix = f"{location}: " if location else ""
        suffix = f" (line {line})" if line else ""
        super().__init__(f"{prefix}{message}{suffix}")
        self.message = message
        self.section = section
        self.key = key
        self.line = line


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DiskSection(_Section):
    diameter: float = Field(gt=0, description="um")
    height: float = Field(gt=0, description="um")
    mass: float = Field(ge=0, description="kg")
    eps_r: float = Field(ge=1)
    reflectivity: Optional[float] = Field(default=None, gt=0, lt=1, description="same quantity as cavity.r_moving")


class BeamsSection(_Section):
    intensity_x: float = Field(ge=0, description="mW/um^2")
    intensity_y: float = Field(ge=0, description="mW/um^2")
    waist_x: float = Field(gt=0, description="um")
    waist_y: float = Field(gt=0, description="um")
    waist_z: float = Field(gt=0, description="um")
    wavelength: float = Field(gt=0, description="um")
    rin: float = Field(default=0.0, ge=0, description="Hz^-1")
    pointing_noise: float = Field(default=0.0, ge=0, description="um^2/Hz")
    theta_z: float = Field(default=0.0, ge=0, description="rad")


class CavitySection(_Section):
    length: float = Field(gt=0, description="cm")
    r_fixed: float = Field(gt=0, lt=1)
    r_moving: Optional[float] = Field(default=None, gt=0, lt=1, description="defaults to disk.reflectivity")
    wavelength: float = Field(gt=0, description="nm")
    power: float = Field(ge=0, description="mW")
    detuning: float = Field(description="kHz, negative = red")
    linewidth: float = Field(default=0.0, ge=0, description="kHz")


class EnvironmentSection(_Section):
    pressure: float = Field(ge=0, description="torr")
    gas_mass: float = Field(default=28.0, gt=0, description="amu")
    temperature: float = Field(default=300.0, gt=0, description="K")


class OracleSection(_Section):
    """Stochastic oracle settings, SI units; unset overrides come from the design point"""
    mode: Literal["gas", "parametric", "both"] = "both"
    gamma_bg: float = Field(ge=0, description="s^-1")
    s_i: float = Field(ge=0, description="Hz^-1")
    dt: float = Field(gt=0, description="s")
    n_steps: int = Field(ge=1)
    n_trajectories: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    initial_energy_kt: float = Field(default=20.0, ge=0)
    omega_z: Optional[float] = Field(default=None, gt=0, description="s^-1")
    mass: Optional[float] = Field(default=None, gt=0, description="kg")
    temperature: Optional[float] = Field(default=None, gt=0, description="K")


@dataclass(frozen=True)
class DesignPoint:
    """Validated SI domain objects for one configuration"""
    disk: DiskMirror
    beams: TrapBeams
    cavity: CavityConfig
    environment: Environment


@dataclass(frozen=True)
class SweepSpec:
    """One swept config key; lo/hi in the key's config units"""
    path: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError("sweep needs at least 2 points")
        if not self.lo < self.hi:
            raise ConfigError(f"sweep range must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"unknown sweep scale {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ConfigError("log sweep requires lo > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(np.log10(self.lo), np.log10(self.hi), self.points)
        return np.linspace(self.lo, self.hi, self.points)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    disk: DiskSection
    beams: BeamsSection
    cavity: CavitySection
    environment: EnvironmentSection
    oracle: Optional[OracleSection] = None

    def to_domain(self) -> DesignPoint:
        d, b, c, e = self.disk, self.beams, self.cavity, self.environment
        r_moving = self.moving_reflectivity()
        return DesignPoint(
            disk=DiskMirror(
                diameter=to_si(d.diameter, "um"),
                height=to_si(d.height, "um"),
                mass=d.mass,
                eps_r=d.eps_r,
                reflectivity=r_moving,
            ),
            beams=TrapBeams(
                intensity_x=to_si(b.intensity_x, "mW/um^2"),
                intensity_y=to_si(b.intensity_y, "mW/um^2"),
                waist_x=to_si(b.waist_x, "um"),
                waist_y=to_si(b.waist_y, "um"),
                waist_z=to_si(b.waist_z, "um"),
                wavelength=to_si(b.wavelength, "um"),
                rin=b.rin,
                pointing_noise=to_si(b.pointing_noise, "um^2/Hz"),
                theta_z=b.theta_z,
            ),
            cavity=CavityConfig(
                length=to_si(c.length, "cm"),
                r_fixed=c.r_fixed,
                r_moving=r_moving,
                wavelength=to_si(c.wavelength, "nm"),
                power=to_si(c.power, "mW"),
                detuning=to_si(c.detuning, "kHz"),
                linewidth=to_si(c.linewidth, "kHz"),
            ),
            environment=Environment(
                pressure=to_si(e.pressure, "torr"),
                gas_mass=to_si(e.gas_mass, "amu"),
                temperature=e.temperature,
            ),
        )

    def moving_reflectivity(self) -> float:
        """The disk is the cavity's moving mirror: one reflectivity, set in either section"""
        disk_r, cavity_r = self.disk.reflectivity, self.cavity.r_moving
        if disk_r is None and cavity_r is None:
            raise ConfigError("missing key (or set disk.reflectivity)", section="cavity", key="r_moving")
        if disk_r is not None and cavity_r is not None and not math.isclose(disk_r, cavity_r, rel_tol=1e-12):
            raise ConfigError(f"{cavity_r} disagrees with disk.reflectivity = {disk_r}",
                              section="cavity", key="r_moving")
        return cavity_r if cavity_r is not None else disk_r

    def sde_config(self, seed: Optional[int] = None) -> SdeConfig:
        """Oracle parameters; omega_z, mass and temperature default to the design point"""
        if self.oracle is None:
            raise ConfigError("missing [oracle] section", section="oracle")
        o = self.oracle
        point = self.to_domain()
        omega_z = o.omega_z
        if omega_z is None:
            omega_z = axial_frequency(point.beams, polarizability(point.disk), point.disk)
        return SdeConfig(
            omega_z=omega_z,
            gamma_bg=o.gamma_bg,
            temperature=o.temperature if o.temperature is not None else point.environment.temperature,
            mass=o.mass if o.mass is not None else point.disk.mass,
            rin=o.s_i,
            dt=o.dt,
            n_steps=o.n_steps,
            n_trajectories=o.n_trajectories,
            seed=o.seed if seed is None else seed,
            initial_energy_kt=o.initial_energy_kt,
        )

    def with_value(self, path: str, value: Any) -> "RunConfig":
        """Copy with one `section.key` replaced and re-validated"""
        section_name, key = _split_path(path)
        if section_name not in type(self).model_fields:
            raise ConfigError("unknown section", section=section_name, key=key)
        section = getattr(self, section_name)
        if section is None:
            raise ConfigError("section not present in config", section=section_name, key=key)
        if key not in type(section).model_fields:
            raise ConfigError("unknown key", section=section_name, key=key)
        data = self.model_dump()
        data[section_name][key] = value
        return _validate(data)


def _split_path(path: str) -> Tuple[str, str]:
    parts = path.split(".")
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"parameter path {path!r} must look like section.key")
    return parts[0], parts[1]


def _validate(data: Dict[str, Any], lines: Optional[Dict[Tuple[str, str], int]] = None) -> RunConfig:
    lines = lines or {}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(p) for p in error["loc"]]
        section = loc[0] if loc else None
        key = loc[1] if len(loc) > 1 else None
        if error["type"] == "extra_forbidden":
            message = "unknown key" if key else "unknown section"
        elif error["type"] == "missing":
            message = "missing key" if key else "missing section"
        else:
            message = error["msg"]
        line = lines.get((section, key)) or lines.get((section, None))
        raise ConfigError(message, section=section, key=key, line=line) from e


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_INI_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")
_YAML_KEY_RE = re.compile(r"^(\s*)([A-Za-z_][\w]*)\s*:")


def _ini_lines(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    lines: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for number, raw in enumerate(text.splitlines(), 1):
        header = _SECTION_RE.match(raw)
        if header:
            section = header.group(1).strip()
            lines.setdefault((section, None), number)
            continue
        match = _INI_KEY_RE.match(raw)
        if match and section is not None:
            lines.setdefault((section, match.group(1).strip()), number)
    return lines


def _yaml_lines(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    lines: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for number, raw in enumerate(text.splitlines(), 1):
        match = _YAML_KEY_RE.match(raw)
        if not match:
            continue
        if not match.group(1):
            section = match.group(2)
            lines.setdefault((section, None), number)
        elif section is not None:
            lines.setdefault((section, match.group(2)), number)
    return lines


def _parse_ini(text: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("key outside of any section", line=e.lineno) from e
    except configparser.DuplicateOptionError as e:
        raise ConfigError("duplicate key", section=e.section, key=e.option, line=e.lineno) from e
    except configparser.DuplicateSectionError as e:
        raise ConfigError("duplicate section", section=e.section, line=e.lineno) from e
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError("malformed line", line=line) from e
    return {name: dict(parser[name]) for name in parser.sections()}


def _parse_yaml(text: str) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(e, 'problem', e)}",
                          line=mark.line + 1 if mark else None) from e
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ConfigError("YAML config must map section names to key/value mappings")
    return data


def parse_config(text: str, fmt: str = "ini") -> RunConfig:
    """Validate config text completely, including the SI domain objects"""
    if fmt == "yaml":
        data, lines = _parse_yaml(text), _yaml_lines(text)
    else:
        data, lines = _parse_ini(text), _ini_lines(text)
    config = _validate(data, lines)
    try:
        config.to_domain()
    except ConfigError as e:
        if e.line is None and e.section is not None:
            line = lines.get((e.section, e.key)) or lines.get((e.section, None))
            raise ConfigError(e.message, section=e.section, key=e.key, line=line) from e
        raise
    except DomainError as e:
        raise ConfigError(str(e)) from e
    return config


def load_config(path: Union[str, Path, None] = None) -> RunConfig:
    path = Path(path) if path is not None else DEFAULT_CONFIG
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror or e}") from e
    fmt = "yaml" if path.suffix.lower() in YAML_SUFFIXES else "ini"
    config = parse_config(text, fmt)
    logger.debug("config loaded", path=str(path), format=fmt, oracle=config.oracle is not None)
    return config


def sweep_paths(config: RunConfig) -> List[str]:
    """Every numeric `section.key` a sweep can address"""
    paths = []
    for section_name in type(config).model_fields:
        section = getattr(config, section_name)
        if section is None:
            continue
        for key, value in section.model_dump().items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                paths.append(f"{section_name}.{key}")
    return paths

"""Run configuration: INI-style ``key = value`` sections with dotted overrides."""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .classical import DEFAULT_SEED
from .orbits import ACTION_CONVENTIONS
from .pipeline import R_SCAN_GRID, default_nu_c
from .reflectivity import SHAPES, ReflectivityProfile
from .scars import THETA_CONVENTIONS
from .semiclassical import DEFAULT_SIGMA_CUT, ORDERINGS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProfileSection:
    shape: str = "step"
    R: float = 0.01
    A: float = 120.0
    B: float = 0.63


@dataclass(frozen=True)
class ClassicalSection:
    t: int = 10
    K: int = 243
    n_ic: int = 100
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class SpectralSection:
    nu_c: float | None = None
    nu_min: float = 0.0
    nu_max: float = 1.0
    nu_step: float = 0.01
    dloc_R: tuple = (0.0, 0.001, 0.01, 0.1)
    save_vectors: bool = False


@dataclass(frozen=True)
class ScarSection:
    l_max: int = 7
    tau: int | None = None
    theta: str = "preceding"
    action: str = "coherent"
    n_outside: int = 0


@dataclass(frozen=True)
class SemiclassicalSection:
    sigma_cut: float = DEFAULT_SIGMA_CUT
    epsilon: float = 1e-3
    target_P: float = 0.8
    ordering: str = "period"
    R_grid: tuple = R_SCAN_GRID
    husimi_K: int = 81
    overlap_norm: str = "l2"


@dataclass(frozen=True)
class RunConfig:
    N: int = 243
    output: str = "out"
    profile: ProfileSection = field(default_factory=ProfileSection)
    classical: ClassicalSection = field(default_factory=ClassicalSection)
    spectral: SpectralSection = field(default_factory=SpectralSection)
    scar: ScarSection = field(default_factory=ScarSection)
    semiclassical: SemiclassicalSection = field(default_factory=SemiclassicalSection)

    @property
    def reflectivity(self) -> ReflectivityProfile:
        p = self.profile
        return ReflectivityProfile(p.shape, p.R, p.A, p.B)

    @property
    def nu_c(self) -> float:
        return default_nu_c(self.profile.shape) if self.spectral.nu_c is None else self.spectral.nu_c

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spectral"]["nu_c"] = self.nu_c
        for section in d.values():
            if isinstance(section, dict):
                for k, v in section.items():
                    if isinstance(v, tuple):
                        section[k] = list(v)
        return d

    def hash(self) -> str:
        """Digest of the resolved configuration, excluding the output location."""
        d = self.to_dict()
        d.pop("output")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def to_ini(self) -> str:
        lines = ["[run]", f"N = {self.N}", f"output = {self.output}", ""]
        d = self.to_dict()
        for name in _SECTIONS:
            lines.append(f"[{name}]")
            for k, v in d[name].items():
                if isinstance(v, list):
                    v = ", ".join(repr(x) for x in v)
                lines.append(f"{k} = {'auto' if v is None else v}")
            lines.append("")
        return "\n".join(lines)


_SECTIONS = {
    "profile": ProfileSection,
    "classical": ClassicalSection,
    "spectral": SpectralSection,
    "scar": ScarSection,
    "semiclassical": SemiclassicalSection,
}


def _coerce(value: str, annotation: str):
    value = value.strip()
    if value.lower() in ("auto", "none", ""):
        if "None" not in annotation:
            raise ValueError("a value is required")
        return None
    base = annotation.split("|")[0].strip()
    if base == "bool":
        if value.lower() in ("true", "yes", "1", "on"):
            return True
        if value.lower() in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if base == "tuple":
        return tuple(float(x) for x in value.replace(",", " ").split())
    if base == "int":
        return int(value)
    if base == "float":
        return float(value)
    return value


def load_config(path=None, overrides=()) -> RunConfig:
    """Read an INI file (optional) and apply ``section.key=value`` overrides."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read_string(path.read_text())
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        section, _, name = key.strip().rpartition(".")
        section = section or "run"
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, name, value)

    unknown = set(parser.sections()) - set(_SECTIONS) - {"run"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    cfg = RunConfig()
    top = {}
    if parser.has_section("run"):
        for k, v in parser.items("run"):
            if k not in ("N", "output"):
                raise ConfigError(f"unknown key run.{k}")
            try:
                top[k] = int(v) if k == "N" else v.strip()
            except ValueError as exc:
                raise ConfigError(f"run.{k}: {exc}") from exc
    sections = {}
    for name, cls in _SECTIONS.items():
        values = {}
        if parser.has_section(name):
            annotations = {f.name: str(f.type) for f in fields(cls)}
            for k, v in parser.items(name):
                if k not in annotations:
                    raise ConfigError(f"unknown key {name}.{k}")
                try:
                    values[k] = _coerce(v, annotations[k])
                except ValueError as exc:
                    raise ConfigError(f"{name}.{k}: {exc}") from exc
        sections[name] = replace(getattr(cfg, name), **values)
    cfg = replace(cfg, **top, **sections)
    validate(cfg)
    return cfg


def _is_power_of_three(n: int) -> bool:
    while n > 1 and n % 3 == 0:
        n //= 3
    return n == 1


def validate(cfg: RunConfig) -> None:
    """Reject inconsistent configurations before any computation."""
    problems = []
    if cfg.N < 3 or not _is_power_of_three(cfg.N):
        problems.append(f"N must be a power of 3 (>= 3), got {cfg.N}")
    p = cfg.profile
    if p.shape not in SHAPES:
        problems.append(f"profile.shape must be one of {SHAPES}")
    else:
        try:
            cfg.reflectivity
        except ValueError as exc:
            problems.append(f"profile: {exc}")
    c = cfg.classical
    if c.t < 0 or c.K < 3 or c.n_ic < 1:
        problems.append("classical: need t >= 0, K >= 3, n_ic >= 1")
    s = cfg.spectral
    if s.nu_c is not None and not 0 <= s.nu_c <= 1:
        problems.append("spectral.nu_c must lie in [0, 1]")
    if not (0 <= s.nu_min < s.nu_max <= 1) or s.nu_step <= 0:
        problems.append("spectral: need 0 <= nu_min < nu_max <= 1 and nu_step > 0")
    if any(not 0 <= r <= 1 for r in s.dloc_R):
        problems.append("spectral.dloc_R values must lie in [0, 1]")
    sc = cfg.scar
    if not 1 <= sc.l_max <= 12:
        problems.append("scar.l_max must lie in [1, 12]")
    if sc.tau is not None and sc.tau < 1:
        problems.append("scar.tau must be >= 1")
    if sc.theta not in THETA_CONVENTIONS:
        problems.append(f"scar.theta must be one of {THETA_CONVENTIONS}")
    if sc.action not in ACTION_CONVENTIONS:
        problems.append(f"scar.action must be one of {ACTION_CONVENTIONS}")
    if sc.n_outside < 0:
        problems.append("scar.n_outside must be >= 0")
    sm = cfg.semiclassical
    if not 0 < sm.sigma_cut < 1:
        problems.append("semiclassical.sigma_cut must lie in (0, 1)")
    if sm.epsilon <= 0 or not 0 < sm.target_P <= 1:
        problems.append("semiclassical: need epsilon > 0 and 0 < target_P <= 1")
    if sm.ordering not in ORDERINGS:
        problems.append(f"semiclassical.ordering must be one of {ORDERINGS}")
    if any(not 0 <= r <= 1 for r in sm.R_grid):
        problems.append("semiclassical.R_grid values must lie in [0, 1]")
    if sm.husimi_K < 3:
        problems.append("semiclassical.husimi_K must be >= 3")
    if sm.overlap_norm not in ("l2", "sum"):
        problems.append("semiclassical.overlap_norm must be 'l2' or 'sum'")
    if problems:
        raise ConfigError("; ".join(problems))

"""Run configuration: the dataclass, TOML parsing and validation.

Config files are TOML with two sections, ``[run]`` and ``[limiter]``.
Unknown keys are errors rather than silently ignored defaults; enum values
are validated here so the solver can trust them.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import warnings
from dataclasses import dataclass, field, fields

from crkfr import boundary, core1d, limiters, tableau
from crkfr.basis import GL, GLL
from crkfr.limiters import IndicatorConfig


class ConfigError(ValueError):
    pass


_CORRECTION_FOR_POINTS = {GL: "radau", GLL: "g2"}


@dataclass
class RunConfig:
    problem: str
    degree: int
    mesh: tuple
    final_time: float = None
    points: str = GL
    correction: str = "auto"
    dissipation: str = core1d.D2
    trace: str = core1d.EA
    tableau_name: str = "auto"
    cfl_safety: float = 0.98
    cfl: float = 0.0                  # 0 -> use the committed stability table
    interface_flux: str = "rusanov"
    boundary_treatment: str = boundary.FACE_TREATMENT
    dt_include_ghost: bool = False
    speed_sampling: str = "mean"      # mean | nodal_max
    threads: int = 0
    seed: int = 0
    output_cadence: float = 0.0
    gamma: float = None
    # limiter section
    blending: str = limiters.NO_BLENDING
    flux_limiter: bool = True
    scaling_limiter: bool = True
    indicator_variable: str = "auto"
    alpha_max: float = 1.0
    alpha_min: float = 1e-3
    smooth_alpha: bool = True

    indicator: IndicatorConfig = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.validate()

    def validate(self):
        self.points = self.points.lower()
        if self.points not in (GL, GLL):
            raise ConfigError(f"unknown point kind {self.points!r}")
        self.correction = self.correction.lower()
        expected = _CORRECTION_FOR_POINTS[self.points]
        if self.correction == "auto":
            self.correction = expected
        elif self.correction != expected:
            raise ConfigError(
                f"correction {self.correction!r} is not available for {self.points} points; "
                f"the pairing is fixed (gl->radau, gll->g2)"
            )
        self.dissipation = self.dissipation.lower()
        if self.dissipation not in core1d.DISSIPATION_MODELS:
            raise ConfigError(f"unknown dissipation model {self.dissipation!r}")
        self.trace = self.trace.lower()
        if self.trace not in core1d.TRACE_MODES:
            raise ConfigError(f"unknown trace mode {self.trace!r}")
        if not isinstance(self.degree, int) or self.degree < 0:
            raise ConfigError("degree must be a non-negative integer")
        mesh = tuple(int(n) for n in (self.mesh if hasattr(self.mesh, "__len__") else (self.mesh,)))
        if len(mesh) not in (1, 2) or any(n < 1 for n in mesh):
            raise ConfigError(f"invalid mesh specification {self.mesh!r}")
        self.mesh = mesh
        if self.tableau_name == "auto":
            self.tab = tableau.default_for_degree(self.degree)
        else:
            self.tab = tableau.by_name(self.tableau_name)
            if self.tab.order != min(self.degree + 1, 4):
                warnings.warn(
                    f"tableau {self.tab.name} has order {self.tab.order} but degree "
                    f"{self.degree} pairs with order {self.degree + 1} by default",
                    stacklevel=2,
                )
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ConfigError("cfl_safety must lie in (0, 1]")
        if self.interface_flux not in ("rusanov", "hllc"):
            raise ConfigError(f"unknown interface flux {self.interface_flux!r}")
        if self.boundary_treatment not in (boundary.FACE_TREATMENT, boundary.GHOST_ELEMENT_TREATMENT):
            raise ConfigError(f"unknown boundary treatment {self.boundary_treatment!r}")
        if self.speed_sampling not in ("mean", "nodal_max"):
            raise ConfigError(f"unknown speed sampling {self.speed_sampling!r}")
        self.blending = self.blending.lower()
        if self.blending not in limiters.BLENDING_SCHEMES:
            raise ConfigError(f"unknown blending scheme {self.blending!r}")
        if self.blending != limiters.NO_BLENDING and self.degree < 1:
            raise ConfigError("subcell blending needs degree >= 1")
        self.indicator = IndicatorConfig(
            variable=self.indicator_variable,
            alpha_max=self.alpha_max,
            alpha_min=self.alpha_min,
            smooth_neighbors=self.smooth_alpha,
        )
        return self

    def replace(self, **kwargs):
        vals = {f.name: getattr(self, f.name) for f in fields(self) if f.init}
        vals.update(kwargs)
        return RunConfig(**vals)

    def as_dict(self):
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.init}
        out["mesh"] = list(self.mesh)
        return out


_RUN_KEYS = {
    "problem", "degree", "mesh", "final_time", "points", "correction", "dissipation",
    "trace", "tableau_name", "cfl_safety", "cfl", "interface_flux", "boundary_treatment",
    "dt_include_ghost", "speed_sampling", "threads", "seed", "output_cadence", "gamma",
}
_LIMITER_KEYS = {
    "blending", "flux_limiter", "scaling_limiter", "indicator_variable",
    "alpha_max", "alpha_min", "smooth_alpha",
}


def parse_config(path, overrides=()):
    """Load and validate a TOML run configuration.

    Overrides are ``key=value`` strings; keys may carry a ``run.`` or
    ``limiter.`` prefix but are also resolved without one.
    """
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}")

    unknown_sections = set(raw) - {"run", "limiter"}
    if unknown_sections:
        raise ConfigError(f"unknown config sections {sorted(unknown_sections)}")
    values = {}
    for section, allowed in (("run", _RUN_KEYS), ("limiter", _LIMITER_KEYS)):
        data = raw.get(section, {})
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
        values.update(data)

    for item in overrides:
        key, _, value = item.partition("=")
        if not _:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key = key.removeprefix("run.").removeprefix("limiter.")
        if key not in _RUN_KEYS | _LIMITER_KEYS:
            raise ConfigError(f"unknown override key {key!r}")
        values[key] = _parse_override_value(key, value)

    missing = {"problem", "degree", "mesh"} - set(values)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc))


def _parse_override_value(key, text):
    text = text.strip()
    if key == "mesh":
        return tuple(int(part) for part in text.replace("x", ",").split(",") if part)
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text

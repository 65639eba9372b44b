"""Scenario files for the matchedcavity command line."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol

from .const import (
    CONF_ALPHA_L,
    CONF_AREA,
    CONF_AREA_FACTOR,
    CONF_CENTER,
    CONF_DT,
    CONF_FINESSE,
    CONF_FSR,
    CONF_GRID_N,
    CONF_GRID_SPACING,
    CONF_INVERSIONS,
    CONF_KAPPA,
    CONF_OMEGA_MAX,
    CONF_OUTPUT_DIR,
    CONF_RESPONSE_POINTS,
    CONF_SIGMA_T,
    CONF_SNAPSHOT_STRIDE,
    CONF_SWEEP_MAX_FACTOR,
    CONF_SWEEP_POINTS,
    CONF_T_END,
    CONF_T_MAX,
    CONF_T_START,
    DEFAULT_AREA_FACTOR,
    DEFAULT_CENTER,
    DEFAULT_DT,
    DEFAULT_FINESSE,
    DEFAULT_FSR,
    DEFAULT_GRID_N,
    DEFAULT_GRID_SPACING,
    DEFAULT_INVERSIONS,
    DEFAULT_OMEGA_MAX_LINEWIDTHS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_RESPONSE_POINTS,
    DEFAULT_SIGMA_T,
    DEFAULT_SNAPSHOT_STRIDE,
    DEFAULT_SWEEP_MAX_FACTOR,
    DEFAULT_SWEEP_POINTS,
    DEFAULT_T_END,
    DEFAULT_T_MAX,
    DEFAULT_T_START,
)
from .exceptions import (
    ConfigInvariantError,
    InvalidParameterError,
    ScenarioConfigError,
)
from .linear_response import pole_distance
from .models import CavityParams, DetuningGrid, FloatArray, cavity_linewidth
from .pulse import GaussianPulseSpec, make_gaussian, pi_pulse_area
from .simulator import SimulationConfig

_LOGGER = logging.getLogger(__name__)


def _float_list(value: Any) -> tuple[float, ...]:
    """Coerce "a, b, c" (or a sequence) into a tuple of floats."""
    parts = [p.strip() for p in value.split(",")] if isinstance(value, str) else value
    try:
        numbers = tuple(float(p) for p in parts if p != "")
    except (TypeError, ValueError) as err:
        raise vol.Invalid(f"expected comma-separated numbers, got {value!r}") from err
    if not numbers:
        raise vol.Invalid("expected at least one number")
    return numbers


_POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))
_NON_NEGATIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0.0))

SCENARIO_SCHEMA = vol.Schema(
    {
        vol.Exclusive(CONF_KAPPA, "cavity.coupling"): vol.All(
            vol.Coerce(float),
            vol.Range(min=0.0, max=1.0, min_included=False, max_included=False),
        ),
        vol.Exclusive(CONF_FINESSE, "cavity.coupling"): vol.All(
            vol.Coerce(float), vol.Range(min=2.0 * math.pi, min_included=False)
        ),
        vol.Optional(CONF_FSR, default=DEFAULT_FSR): _POSITIVE_FLOAT,
        vol.Optional(CONF_ALPHA_L): _NON_NEGATIVE_FLOAT,
        vol.Optional(CONF_GRID_N, default=DEFAULT_GRID_N): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_GRID_SPACING, default=DEFAULT_GRID_SPACING): _POSITIVE_FLOAT,
        vol.Optional(CONF_SIGMA_T, default=DEFAULT_SIGMA_T): _POSITIVE_FLOAT,
        vol.Optional(CONF_CENTER, default=DEFAULT_CENTER): vol.Coerce(float),
        vol.Exclusive(CONF_AREA, CONF_AREA): _NON_NEGATIVE_FLOAT,
        vol.Exclusive(CONF_AREA_FACTOR, CONF_AREA): _NON_NEGATIVE_FLOAT,
        vol.Optional(CONF_DT, default=DEFAULT_DT): _POSITIVE_FLOAT,
        vol.Optional(CONF_T_START, default=DEFAULT_T_START): vol.Coerce(float),
        vol.Optional(CONF_T_END, default=DEFAULT_T_END): vol.Coerce(float),
        vol.Optional(CONF_T_MAX): vol.Coerce(float),
        vol.Optional(CONF_SNAPSHOT_STRIDE, default=DEFAULT_SNAPSHOT_STRIDE): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_SWEEP_POINTS, default=DEFAULT_SWEEP_POINTS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(
            CONF_SWEEP_MAX_FACTOR, default=DEFAULT_SWEEP_MAX_FACTOR
        ): _NON_NEGATIVE_FLOAT,
        vol.Optional(CONF_OMEGA_MAX): _POSITIVE_FLOAT,
        vol.Optional(CONF_RESPONSE_POINTS, default=DEFAULT_RESPONSE_POINTS): vol.All(
            vol.Coerce(int), vol.Range(min=3)
        ),
        vol.Optional(CONF_INVERSIONS, default=list(DEFAULT_INVERSIONS)): _float_list,
        vol.Optional(CONF_OUTPUT_DIR, default=DEFAULT_OUTPUT_DIR): vol.All(
            str, vol.Length(min=1)
        ),
    }
)

KNOWN_KEYS: frozenset[str] = frozenset(str(key) for key in SCENARIO_SCHEMA.schema)


def parse_scenario_text(text: str) -> dict[str, str]:
    """Split key = value lines into a mapping of raw strings.

    Blank lines and lines starting with # are ignored. Malformed lines,
    unknown keys and duplicates are all collected before raising.
    """
    data: dict[str, str] = {}
    seen: dict[str, int] = {}
    errors: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"line {lineno}: expected 'key = value', got {raw!r}")
            continue
        if key not in KNOWN_KEYS:
            errors.append(f"{key}: unknown key (line {lineno})")
            continue
        if key in seen:
            errors.append(f"{key}: duplicate key (lines {seen[key]} and {lineno})")
            continue
        seen[key] = lineno
        data[key] = value.strip()
    if errors:
        raise ScenarioConfigError(errors)
    return data


def _error_key(error: vol.Invalid) -> str:
    # Exclusion groups appear as <group> in the error path.
    return ".".join(str(p).strip("<>") for p in error.path) or "config"


def _format(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(item) for item in value)
    return str(value)


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Class to hold a validated scenario."""

    params: CavityParams
    grid: DetuningGrid
    pulse: GaussianPulseSpec
    dt: float
    t_start: float
    t_end: float
    t_max: float
    snapshot_stride: int
    sweep_points: int
    sweep_max_factor: float
    omega_max: float
    response_points: int
    inversions: tuple[float, ...]
    output_dir: Path

    @classmethod
    def from_mapping(cls, raw: dict[str, Any]) -> ScenarioConfig:
        """Validate raw values and check every invariant before any run starts."""
        try:
            data = SCENARIO_SCHEMA(raw)
        except vol.MultipleInvalid as err:
            raise ScenarioConfigError(
                [f"{_error_key(e)}: {e.msg}" for e in err.errors]
            ) from err

        try:
            scenario = cls._build(data)
            scenario.simulation_config().validate()
        except ConfigInvariantError as err:
            raise ScenarioConfigError([str(err)]) from err
        except InvalidParameterError as err:
            raise ScenarioConfigError([f"config: {err}"]) from err
        scenario._check_inversions()
        return scenario

    @classmethod
    def _build(cls, data: dict[str, Any]) -> ScenarioConfig:
        fsr = data[CONF_FSR]
        alpha_l = data.get(CONF_ALPHA_L)
        try:
            if CONF_KAPPA in data:
                kappa = data[CONF_KAPPA]
                params = (
                    CavityParams.matched_to(kappa, fsr)
                    if alpha_l is None
                    else CavityParams(kappa, fsr, alpha_l)
                )
            else:
                params = CavityParams.from_finesse(
                    data.get(CONF_FINESSE, DEFAULT_FINESSE), fsr, alpha_l
                )
        except InvalidParameterError as err:
            raise ConfigInvariantError(CONF_KAPPA, str(err)) from err

        if CONF_AREA in data:
            theta_in = data[CONF_AREA]
        else:
            theta_in = data.get(CONF_AREA_FACTOR, DEFAULT_AREA_FACTOR) * pi_pulse_area(
                params
            )
        omega_max = data.get(
            CONF_OMEGA_MAX, DEFAULT_OMEGA_MAX_LINEWIDTHS * cavity_linewidth(params)
        )
        return cls(
            params=params,
            grid=DetuningGrid(data[CONF_GRID_N], data[CONF_GRID_SPACING]),
            pulse=GaussianPulseSpec(data[CONF_SIGMA_T], theta_in, data[CONF_CENTER]),
            dt=data[CONF_DT],
            t_start=data[CONF_T_START],
            t_end=data[CONF_T_END],
            t_max=data.get(CONF_T_MAX, max(DEFAULT_T_MAX, data[CONF_T_END])),
            snapshot_stride=data[CONF_SNAPSHOT_STRIDE],
            sweep_points=data[CONF_SWEEP_POINTS],
            sweep_max_factor=data[CONF_SWEEP_MAX_FACTOR],
            omega_max=omega_max,
            response_points=data[CONF_RESPONSE_POINTS],
            inversions=data[CONF_INVERSIONS],
            output_dir=Path(data[CONF_OUTPUT_DIR]),
        )

    def _check_inversions(self) -> None:
        errors: list[str] = []
        for w in self.inversions:
            try:
                pole_distance(w, self.params)
            except InvalidParameterError as err:
                errors.append(f"{CONF_INVERSIONS}: {err}")
        if errors:
            raise ScenarioConfigError(errors)

    @property
    def n_samples(self) -> int:
        """Return the number of recorded samples over the window."""
        return int(round((self.t_end - self.t_start) / self.dt)) + 1

    def simulation_config(self, theta_in: float | None = None) -> SimulationConfig:
        """Return the integration driven by the scenario pulse.

        theta_in overrides the configured input area.
        """
        if self.t_end <= self.t_start:
            raise ConfigInvariantError(CONF_T_END, "t_end must be after t_start")
        pulse = self.pulse
        if theta_in is not None:
            pulse = GaussianPulseSpec(pulse.sigma_t, theta_in, pulse.center)
        try:
            waveform = make_gaussian(pulse, self.t_start, self.dt, self.n_samples)
        except InvalidParameterError as err:
            raise ConfigInvariantError(CONF_CENTER, str(err)) from err
        return SimulationConfig(
            params=self.params,
            grid=self.grid,
            input=waveform,
            dt=self.dt,
            t_start=self.t_start,
            t_end=self.t_end,
            snapshot_stride=self.snapshot_stride,
            t_max=self.t_max,
        )

    def sweep_areas(self) -> FloatArray:
        """Return the input areas of the area sweep, from 0 upwards."""
        top = self.sweep_max_factor * pi_pulse_area(self.params)
        return np.linspace(0.0, top, self.sweep_points)

    def response_omegas(self) -> FloatArray:
        """Return the symmetric frequency grid of the response tables."""
        return np.linspace(-self.omega_max, self.omega_max, self.response_points)

    def resolved_items(self) -> list[tuple[str, str]]:
        """Return the resolved scenario as key, value pairs.

        Exclusive keys appear once (kappa, area), so the pairs read back as a
        scenario file describe the same scenario.
        """
        values: list[tuple[str, object]] = [
            (CONF_KAPPA, self.params.kappa),
            (CONF_FSR, self.params.fsr),
            (CONF_ALPHA_L, self.params.alpha_l),
            (CONF_GRID_N, self.grid.n),
            (CONF_GRID_SPACING, self.grid.spacing),
            (CONF_SIGMA_T, self.pulse.sigma_t),
            (CONF_CENTER, self.pulse.center),
            (CONF_AREA, self.pulse.area),
            (CONF_DT, self.dt),
            (CONF_T_START, self.t_start),
            (CONF_T_END, self.t_end),
            (CONF_T_MAX, self.t_max),
            (CONF_SNAPSHOT_STRIDE, self.snapshot_stride),
            (CONF_SWEEP_POINTS, self.sweep_points),
            (CONF_SWEEP_MAX_FACTOR, self.sweep_max_factor),
            (CONF_OMEGA_MAX, self.omega_max),
            (CONF_RESPONSE_POINTS, self.response_points),
            (CONF_INVERSIONS, self.inversions),
            (CONF_OUTPUT_DIR, str(self.output_dir)),
        ]
        return [(key, _format(value)) for key, value in values]


def load_scenario(path: Path | None = None) -> ScenarioConfig:
    """Read and validate a scenario file; None gives the default scenario."""
    if path is None:
        _LOGGER.debug("No scenario file given, using defaults")
        return ScenarioConfig.from_mapping({})
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise ScenarioConfigError([f"config: cannot read {path}: {err}"]) from err
    _LOGGER.debug("Loaded scenario %s", path)
    return ScenarioConfig.from_mapping(parse_scenario_text(text))

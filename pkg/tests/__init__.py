"""Tests for the matchedcavity package."""

from __future__ import annotations

from pathlib import Path

from matchedcavity.models import CavityParams, DetuningGrid
from matchedcavity.pulse import GaussianPulseSpec, make_gaussian, pi_pulse_area
from matchedcavity.simulator import SimulationConfig

# Reduced scenario: D ten times below desk scale so a run takes seconds.
FAST_FINESSE = 500.0
FAST_FSR = 3.0e8
FAST_GRID_N = 101
FAST_GRID_SPACING = 8.0e4
FAST_DT = 4.0e-9
FAST_T_END = 60.0e-6
FAST_SIGMA_T = 2.0e-6
FAST_CENTER = 12.0e-6

FAST_SCENARIO: dict[str, str] = {
    "cavity.fsr": "3e8",
    "grid.n": "101",
    "grid.spacing": "8e4",
    "integrator.dt": "4e-9",
    "integrator.t_end": "60e-6",
    "integrator.t_max": "60e-6",
    "pulse.center": "12e-6",
}


def fast_params(alpha_l: float | None = None) -> CavityParams:
    """Return the reduced-scale cavity, matched unless alpha_l is given."""
    return CavityParams.from_finesse(FAST_FINESSE, FAST_FSR, alpha_l)


def fast_config(
    area_factor: float,
    params: CavityParams | None = None,
    *,
    dt: float = FAST_DT,
    snapshot_stride: int = 0,
) -> SimulationConfig:
    """Return a reduced-scale run driven by a Gaussian of area_factor pi-pulse areas."""
    params = params or fast_params()
    n_samples = int(round(FAST_T_END / dt)) + 1
    spec = GaussianPulseSpec(
        FAST_SIGMA_T, area_factor * pi_pulse_area(params), FAST_CENTER
    )
    return SimulationConfig(
        params=params,
        grid=DetuningGrid(FAST_GRID_N, FAST_GRID_SPACING),
        input=make_gaussian(spec, 0.0, dt, n_samples),
        dt=dt,
        t_start=0.0,
        t_end=FAST_T_END,
        snapshot_stride=snapshot_stride,
    )


def write_config(directory: Path, entries: dict[str, str], name: str = "scenario.cfg") -> Path:
    """Write a scenario file and return its path."""
    path = directory / name
    lines = ["# test scenario", *(f"{key} = {value}" for key, value in entries.items())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

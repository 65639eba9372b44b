"""Strong-pulse dynamics of an impedance-matched ring cavity filled with an absorber."""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

from .analysis import RunDiagnostics, SweepTable, diagnose, figure2_sweep
from .area_theorem import AreaSolution, intracavity_area
from .exceptions import MatchedCavityError
from .linear_response import group_delay, reflection, reflection_generalized
from .models import (
    CavityParams,
    DetuningGrid,
    EnsembleState,
    SimulationRecord,
    Waveform,
    matched,
)
from .pulse import GaussianPulseSpec, area, energy, make_gaussian, rms_width
from .simulator import SimulationConfig, simulate

try:
    __version__ = version("matchedcavity")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "AreaSolution",
    "CavityParams",
    "DetuningGrid",
    "EnsembleState",
    "GaussianPulseSpec",
    "MatchedCavityError",
    "RunDiagnostics",
    "SimulationConfig",
    "SimulationRecord",
    "SweepTable",
    "Waveform",
    "area",
    "diagnose",
    "energy",
    "figure2_sweep",
    "group_delay",
    "intracavity_area",
    "make_gaussian",
    "matched",
    "reflection",
    "reflection_generalized",
    "rms_width",
    "simulate",
]

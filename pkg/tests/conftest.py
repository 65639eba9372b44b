"""Fixtures for matchedcavity tests."""

from __future__ import annotations

import pytest

from matchedcavity.models import CavityParams, DetuningGrid, SimulationRecord
from matchedcavity.simulator import SimulationConfig, simulate

from . import FAST_GRID_N, FAST_GRID_SPACING, fast_config, fast_params


@pytest.fixture
def matched_params() -> CavityParams:
    """Return the desk-scale matched cavity (finesse 500, D = 3 GHz)."""
    return CavityParams.from_finesse(500.0, 3.0e9)


@pytest.fixture
def reduced_params() -> CavityParams:
    """Return the reduced-scale matched cavity."""
    return fast_params()


@pytest.fixture
def reduced_grid() -> DetuningGrid:
    """Return the reduced-scale detuning grid."""
    return DetuningGrid(FAST_GRID_N, FAST_GRID_SPACING)


@pytest.fixture(scope="session")
def half_pi_run() -> tuple[SimulationConfig, SimulationRecord]:
    """Integrate a half pi-pulse once for the whole session."""
    config = fast_config(0.5, snapshot_stride=2500)
    return config, simulate(config)


@pytest.fixture(scope="session")
def empty_cavity_run() -> tuple[SimulationConfig, SimulationRecord]:
    """Integrate a pulse through the cavity with no absorber."""
    config = fast_config(0.5, fast_params(alpha_l=0.0))
    return config, simulate(config)


@pytest.fixture(scope="session")
def two_pi_run() -> tuple[SimulationConfig, SimulationRecord]:
    """Integrate the self-induced-transparency pulse once for the whole session."""
    config = fast_config(2.0)
    return config, simulate(config)

"""Desk-scale acceptance runs (deselected by default, run with -m slow)."""

from __future__ import annotations

import os

import numpy as np
import pytest

from matchedcavity.analysis import (
    correlation_delay,
    diagnose,
    figure2_sweep,
    transfer_function,
)
from matchedcavity.area_theorem import intracavity_area, rabi_population
from matchedcavity.config import ScenarioConfig, load_scenario
from matchedcavity.linear_response import reflection, reflection_finite_band
from matchedcavity.models import CavityParams, DetuningGrid
from matchedcavity.pulse import GaussianPulseSpec, make_gaussian, pi_pulse_area
from matchedcavity.simulator import SimulationConfig, simulate

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def desk() -> ScenarioConfig:
    """Return the default desk-scale scenario."""
    return load_scenario(None)


def test_area_sweep(desk: ScenarioConfig) -> None:
    """Test the 20-point sweep overlays the analytic area curve."""
    base = desk.simulation_config(theta_in=pi_pulse_area(desk.params))
    workers = min(4, os.cpu_count() or 1)
    table = figure2_sweep(desk.sweep_areas(), base, workers=workers)
    assert len(table.rows) == 20
    assert table.max_deviation <= 1e-2
    pi_area = pi_pulse_area(desk.params)
    assert abs(table.elongation_argmax() - pi_area) <= 0.1 * pi_area


def test_pi_pulse_elongation(desk: ScenarioConfig) -> None:
    """Test the pi pulse leaves the cavity stretched by more than ten."""
    config = desk.simulation_config(theta_in=pi_pulse_area(desk.params))
    record = simulate(config)
    diag = diagnose(record, config.params, config.grid)
    assert diag.elongation > 10.0
    assert diag.quiescent
    assert record.times[-1] > config.t_end
    assert abs(diag.quanta_residual) <= 1e-4
    assert diag.bloch_norm_error <= 1e-8
    assert diag.w_resonant == pytest.approx(rabi_population(diag.theta_cav), abs=1e-4)


def test_self_induced_transparency(desk: ScenarioConfig) -> None:
    """Test the 2 pi pulse comes out undistorted and delayed."""
    theta_in = desk.params.sqrt_kappa * np.pi
    config = desk.simulation_config(theta_in=theta_in)
    record = simulate(config)
    peak = correlation_delay(record.omega_in, record.omega_out)
    assert peak.peak >= 0.98
    assert 1.0e-6 <= peak.delay <= 5.0e-6
    diag = diagnose(record, config.params, config.grid)
    assert diag.theta_out == pytest.approx(
        intracavity_area(theta_in, config.params).theta_out, abs=1e-2
    )


def test_weak_pulse_desk_scale(desk: ScenarioConfig) -> None:
    """Test a weak pulse follows the finite-band linear response."""
    config = desk.simulation_config(theta_in=0.01 * pi_pulse_area(desk.params))
    record = simulate(config)
    omegas, ratio = transfer_function(record, 1.0 / desk.pulse.sigma_t)
    expected = reflection_finite_band(omegas, config.params, config.grid.half_span)
    assert np.max(np.abs(ratio - expected)) <= 0.01
    diag = diagnose(record, config.params, config.grid)
    assert diag.u_out <= 0.01 * diag.u_in


def test_weak_pulse_wide_band() -> None:
    """Test a wide band and slow cavity reproduce the unbounded reflection."""
    params = CavityParams.from_finesse(500.0, 3.0e7)
    sigma_t, dt, t_end = 10.0e-6, 8.0e-9, 160.0e-6
    n_samples = int(round(t_end / dt)) + 1
    spec = GaussianPulseSpec(sigma_t, 0.01 * pi_pulse_area(params), 60.0e-6)
    config = SimulationConfig(
        params=params,
        grid=DetuningGrid(345, 3.5e4),
        input=make_gaussian(spec, 0.0, dt, n_samples),
        dt=dt,
        t_start=0.0,
        t_end=t_end,
    )
    record = simulate(config)
    omegas, ratio = transfer_function(record, 1.0 / sigma_t)
    assert np.max(np.abs(ratio - reflection(omegas, params))) <= 0.01

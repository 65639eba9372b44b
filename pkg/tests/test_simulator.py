"""Test the time-domain integrator."""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np
import pytest

from matchedcavity.analysis import diagnose
from matchedcavity.area_theorem import rabi_population
from matchedcavity.const import SETTLE_CHECK_STRIDE
from matchedcavity.exceptions import (
    ConfigInvariantError,
    DimensionMismatchError,
    IntegrationError,
)
from matchedcavity.models import (
    CavityParams,
    DetuningGrid,
    EnsembleState,
    SimulationRecord,
    Waveform,
)
from matchedcavity.pulse import area
from matchedcavity.simulator import (
    SimulationConfig,
    excitation_quanta,
    quanta_balance,
    rhs,
    simulate,
    step_rk4,
    stored_energy,
)

from . import fast_config

Run = tuple[SimulationConfig, SimulationRecord]


def test_rhs_ground_state_is_stationary(
    reduced_params: CavityParams, reduced_grid: DetuningGrid
) -> None:
    """Test the undriven ground state does not evolve."""
    deriv = rhs(EnsembleState.ground(reduced_grid.n), 0j, reduced_params, reduced_grid)
    assert not np.any(deriv.du)
    assert not np.any(deriv.dv)
    assert not np.any(deriv.dw)
    assert deriv.domega == 0j


def test_rhs_input_drive(reduced_params: CavityParams, reduced_grid: DetuningGrid) -> None:
    """Test the input field drives the cavity at D sqrt(kappa)."""
    deriv = rhs(EnsembleState.ground(reduced_grid.n), 1.0, reduced_params, reduced_grid)
    assert deriv.domega == pytest.approx(reduced_params.fsr * reduced_params.sqrt_kappa)


def test_rhs_polarisation_source(reduced_params: CavityParams) -> None:
    """Test the summed in-quadrature polarisation feeds the field."""
    grid = DetuningGrid(3, 2.0)
    state = EnsembleState(np.zeros(3), np.ones(3), np.zeros(3))
    deriv = rhs(state, 0j, reduced_params, grid)
    expected = reduced_params.fsr * reduced_params.alpha_l * 3.0 * grid.weight
    assert deriv.domega == pytest.approx(expected)
    np.testing.assert_allclose(deriv.du, -grid.points)


def test_rhs_clamped_field(reduced_params: CavityParams) -> None:
    """Test field_dynamics=False leaves the field untouched."""
    grid = DetuningGrid(1, 1.0)
    state = EnsembleState.ground(1)
    state.omega = 2.0
    deriv = rhs(state, 5.0, reduced_params, grid, field_dynamics=False)
    assert deriv.domega == 0j
    assert deriv.dv[0] == pytest.approx(-2.0)


def test_rhs_dimension_mismatch(
    reduced_params: CavityParams, reduced_grid: DetuningGrid
) -> None:
    """Test a state that does not fit the grid is rejected."""
    with pytest.raises(DimensionMismatchError):
        rhs(EnsembleState.ground(3), 0j, reduced_params, reduced_grid)


def test_rabi_flopping(reduced_params: CavityParams) -> None:
    """Test a clamped resonant field rotates the population as -cos(Omega t)."""
    grid = DetuningGrid(1, 1.0)
    rabi, dt = 1.0e6, 1.0e-8
    state = EnsembleState.ground(1)
    state.omega = rabi
    for step in range(1000):
        state = step_rk4(
            state, step * dt, dt, lambda _t: 0j, reduced_params, grid, field_dynamics=False
        )
    t = 1000 * dt
    assert state.w[0] == pytest.approx(-math.cos(rabi * t), abs=1e-8)
    assert state.v[0] == pytest.approx(-math.sin(rabi * t), abs=1e-8)
    assert state.bloch_norm_deviation() <= 1e-10


def test_step_accepts_waveform(
    reduced_params: CavityParams, reduced_grid: DetuningGrid
) -> None:
    """Test a Waveform input is interpolated like the equivalent callable."""
    wave = Waveform(0.0, 1.0e-9, np.linspace(0.0, 1.0e5, 11))
    state = EnsembleState.ground(reduced_grid.n)
    from_wave = step_rk4(state, 2.0e-9, 1.0e-9, wave, reduced_params, reduced_grid)
    from_call = step_rk4(
        state, 2.0e-9, 1.0e-9, lambda t: complex(1.0e14 * t), reduced_params, reduced_grid
    )
    assert from_wave.omega == pytest.approx(from_call.omega, rel=1e-12)


def test_record_shape(half_pi_run: Run) -> None:
    """Test the record covers the window and honours the output relation."""
    config, record = half_pi_run
    assert record.omega_cav.n_samples == config.n_steps + 1
    assert record.times[-1] == pytest.approx(config.t_end)
    assert not np.iscomplexobj(record.omega_in.samples)
    np.testing.assert_allclose(
        record.omega_out.samples,
        config.params.sqrt_kappa * record.omega_cav.samples - record.omega_in.samples,
    )


def test_snapshots(half_pi_run: Run) -> None:
    """Test snapshots are taken at t = 0 and every stride steps."""
    config, record = half_pi_run
    times = [snap.time for snap in record.snapshots]
    assert len(times) == config.n_steps // config.snapshot_stride + 1
    assert times[0] == 0.0
    assert times[1] == pytest.approx(config.snapshot_stride * config.dt)
    np.testing.assert_array_equal(record.snapshots[0].state.w, -np.ones(config.grid.n))


def test_conservation(half_pi_run: Run) -> None:
    """Test the Bloch norm and the quanta balance over a half pi-pulse."""
    config, record = half_pi_run
    assert record.final_state.bloch_norm_deviation() <= 1e-8
    assert abs(quanta_balance(record, config.params, config.grid)) <= 1e-4
    excitation = excitation_quanta(record.final_state, config.params, config.grid)
    stored = stored_energy(record.final_state, config.params, config.grid)
    assert excitation > 0.0
    assert stored == pytest.approx(excitation / (4.0 * math.pi))


def test_field_stays_real(half_pi_run: Run) -> None:
    """Test a real input on a symmetric grid keeps the intracavity field real."""
    config, record = half_pi_run
    assert diagnose(record, config.params, config.grid).field_imag_ratio <= 1e-9


def test_empty_cavity_reflects_everything(empty_cavity_run: Run) -> None:
    """Test without absorber the output carries the input energy."""
    config, record = empty_cavity_run
    diag = diagnose(record, config.params, config.grid)
    assert diag.u_out == pytest.approx(diag.u_in, rel=1e-4)
    assert diag.u_w_final == 0.0
    assert diag.theta_out == pytest.approx(diag.theta_in, rel=1e-4)


def test_step_halving(two_pi_run: Run) -> None:
    """Test halving the step changes the output by less than 1e-4 relative."""
    config, record = two_pi_run
    fine_config = fast_config(2.0, dt=2.0e-9)
    coarse = diagnose(record, config.params, config.grid)
    fine = diagnose(simulate(fine_config), fine_config.params, fine_config.grid)
    assert fine.theta_out == pytest.approx(coarse.theta_out, rel=1e-4)
    assert fine.theta_cav == pytest.approx(coarse.theta_cav, rel=1e-4)
    assert fine.sigma_out == pytest.approx(coarse.sigma_out, rel=1e-4)
    assert fine.u_out == pytest.approx(coarse.u_out, rel=1e-4)


def test_resonant_class_follows_rabi_flopping(half_pi_run: Run, two_pi_run: Run) -> None:
    """Test the on-resonance class is left at -cos of the intracavity area."""
    for config, record in (half_pi_run, two_pi_run):
        w0 = record.final_state.w[config.grid.center_index]
        assert w0 == pytest.approx(rabi_population(area(record.omega_cav)), abs=1e-5)


def test_settling_extends_window(half_pi_run: Run) -> None:
    """Test a window ending mid-pulse is extended until the field settles."""
    _, full = half_pi_run
    config = _replace(fast_config(0.5), t_end=16.0e-6, t_max=60.0e-6)
    record = simulate(config)

    n = record.omega_cav.n_samples
    assert config.n_steps < n - 1 <= config.n_max_steps
    assert (n - 1 - config.n_steps) % SETTLE_CHECK_STRIDE == 0
    assert record.omega_cav.is_quiescent()
    assert record.omega_out.is_quiescent()
    np.testing.assert_array_equal(record.omega_cav.samples, full.omega_cav.samples[:n])


def test_settling_gives_up_at_t_max(caplog: pytest.LogCaptureFixture) -> None:
    """Test the extension stops at t_max with a warning."""
    config = _replace(fast_config(0.5), t_end=14.0e-6, t_max=16.0e-6)
    with caplog.at_level(logging.WARNING):
        record = simulate(config)
    assert record.omega_cav.n_samples == config.n_max_steps + 1
    assert record.times[-1] == pytest.approx(16.0e-6)
    assert "not settled" in caplog.text


def test_no_extension_without_t_max() -> None:
    """Test the record stops at t_end when no t_max is set."""
    config = _replace(fast_config(0.5), t_end=16.0e-6)
    record = simulate(config)
    assert record.omega_cav.n_samples == config.n_steps + 1


def _replace(config: SimulationConfig, **changes: object) -> SimulationConfig:
    return dataclasses.replace(config, **changes)  # type: ignore[arg-type]


@pytest.mark.parametrize(
    ("changes", "field"),
    [
        ({"t_end": 0.0}, "integrator.t_end"),
        ({"t_max": 50.0e-6}, "integrator.t_max"),
        ({"t_max": 80.0e-6}, "grid.spacing"),
        ({"dt": 3.0e-8}, "integrator.dt"),
        ({"snapshot_stride": -1}, "integrator.snapshot_stride"),
        ({"grid": DetuningGrid(101, 2.0e5)}, "grid.spacing"),
        ({"grid": DetuningGrid(21, 8.0e4)}, "grid.n"),
        ({"input": Waveform(0.0, 4.0e-9, np.ones(15001))}, "pulse"),
    ],
)
def test_validate(changes: dict[str, object], field: str) -> None:
    """Test invalid configurations name the offending field."""
    with pytest.raises(ConfigInvariantError) as err:
        simulate(_replace(fast_config(1.0), **changes))
    assert err.value.field == field


def test_divergence_raises() -> None:
    """Test a non-finite state aborts with the time and step."""
    with np.errstate(all="ignore"), pytest.raises(IntegrationError) as err:
        simulate(fast_config(1.0e190))
    assert err.value.step >= 1
    assert "step" in str(err.value)

"""Time-domain integration of the coupled Bloch / ring-cavity equations.

For every detuning class the Bloch vector rotates about (Re Omega, Im Omega,
detuning); the intracavity field obeys the input/output relation with the
polarisation summed over the grid as source term:

    dOmega/dt = D [ -kappa/2 Omega + sqrt(kappa) Omega_in
                    - i alpha_l sum_k (U_k + i V_k) dDelta ]

The system of 3n + 1 equations is advanced with the classical fixed-step
fourth-order Runge-Kutta scheme.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .const import (
    CAVITY_RESOLUTION,
    CONF_DT,
    CONF_GRID_N,
    CONF_GRID_SPACING,
    CONF_SNAPSHOT_STRIDE,
    CONF_T_END,
    CONF_T_MAX,
    DETUNING_RESOLUTION,
    FINITE_CHECK_STRIDE,
    GRID_COVERAGE,
    PULSE_RESOLUTION,
    QUIESCENT_RTOL,
    SETTLE_CHECK_STRIDE,
)
from .exceptions import (
    ConfigInvariantError,
    DimensionMismatchError,
    IntegrationError,
    UndefinedWidthError,
)
from .models import (
    CavityParams,
    ComplexArray,
    DetuningGrid,
    EnsembleState,
    FloatArray,
    SimulationRecord,
    Snapshot,
    Waveform,
)
from .pulse import area, energy, rms_width

_LOGGER = logging.getLogger(__name__)

InputInterpolant = Callable[[float], complex]


class StateDerivative(NamedTuple):
    """Time derivative of an ensemble state."""

    du: FloatArray
    dv: FloatArray
    dw: FloatArray
    domega: complex


@dataclass(frozen=True, eq=False, slots=True)
class SimulationConfig:
    """Everything one integration needs.

    The record always reaches t_end. When t_max lies beyond t_end the
    integration carries on until the intracavity and output fields have
    settled, or until t_max.
    """

    params: CavityParams
    grid: DetuningGrid
    input: Waveform
    dt: float
    t_start: float
    t_end: float
    snapshot_stride: int = 0
    t_max: float | None = None

    @property
    def n_steps(self) -> int:
        """Return the number of integrator steps covering the window."""
        return int(round((self.t_end - self.t_start) / self.dt))

    @property
    def t_limit(self) -> float:
        """Return the latest time the integration may reach."""
        return self.t_end if self.t_max is None else max(self.t_max, self.t_end)

    @property
    def n_max_steps(self) -> int:
        """Return the number of steps up to t_limit."""
        return int(round((self.t_limit - self.t_start) / self.dt))

    @property
    def times(self) -> FloatArray:
        """Return the time axis of the nominal window."""
        return self.t_start + self.dt * np.arange(self.n_steps + 1, dtype=np.float64)

    def with_input(self, waveform: Waveform) -> SimulationConfig:
        """Return a copy driven by another input waveform."""
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

    def validate(self) -> None:
        """Check the window and resolution rules, raise ConfigInvariantError."""
        if not self.t_end > self.t_start:
            raise ConfigInvariantError(CONF_T_END, "t_end must be after t_start")
        if self.t_max is not None and self.t_max < self.t_end:
            raise ConfigInvariantError(CONF_T_MAX, "must not be before t_end")
        if not self.dt > 0.0:
            raise ConfigInvariantError(CONF_DT, "step must be positive")
        if self.n_steps < 1:
            raise ConfigInvariantError(CONF_DT, "step is longer than the window")
        if self.snapshot_stride < 0:
            raise ConfigInvariantError(CONF_SNAPSHOT_STRIDE, "must be non-negative")

        # The settling extension counts as part of the window.
        window = self.t_limit - self.t_start
        if not window < self.grid.recurrence_time:
            raise ConfigInvariantError(
                CONF_GRID_SPACING,
                f"window {window:.3e} s reaches the comb recurrence time "
                f"{self.grid.recurrence_time:.3e} s",
            )

        cavity_limit = CAVITY_RESOLUTION / (self.params.kappa * self.params.fsr)
        if self.dt > cavity_limit:
            raise ConfigInvariantError(
                CONF_DT, f"{self.dt:.3e} s does not resolve the cavity ({cavity_limit:.3e} s)"
            )
        if self.grid.max_detuning > 0.0:
            detuning_limit = DETUNING_RESOLUTION / self.grid.max_detuning
            if self.dt > detuning_limit:
                raise ConfigInvariantError(
                    CONF_DT,
                    f"{self.dt:.3e} s does not resolve the largest detuning "
                    f"({detuning_limit:.3e} s)",
                )

        if not self.input.is_quiescent():
            raise ConfigInvariantError("pulse", "envelope does not vanish at both ends")
        if area(self.input) == 0.0:
            return
        try:
            sigma_t = rms_width(self.input).sigma
        except UndefinedWidthError:
            return
        if self.dt > PULSE_RESOLUTION * sigma_t:
            raise ConfigInvariantError(
                CONF_DT, f"{self.dt:.3e} s does not resolve the pulse (sigma {sigma_t:.3e} s)"
            )
        coverage = GRID_COVERAGE / sigma_t
        if self.grid.half_span < coverage:
            raise ConfigInvariantError(
                CONF_GRID_N,
                f"half-span {self.grid.half_span:.3e} rad/s is below "
                f"{GRID_COVERAGE:g}x the pulse spectral width",
            )


class _Kernel:
    """Precomputed constants of the right-hand side."""

    __slots__ = ("alpha_l", "deltas", "fsr", "half_kappa", "sqrt_kappa", "weight")

    def __init__(self, params: CavityParams, grid: DetuningGrid) -> None:
        """Initialize the kernel."""
        self.deltas = grid.points
        self.weight = grid.weight
        self.half_kappa = 0.5 * params.kappa
        self.sqrt_kappa = params.sqrt_kappa
        self.fsr = params.fsr
        self.alpha_l = params.alpha_l

    def __call__(
        self,
        bloch: FloatArray,
        omega: complex,
        omega_in: complex,
        field_dynamics: bool = True,
    ) -> tuple[FloatArray, complex]:
        """Return d(bloch)/dt as a (3, n) array and dOmega/dt."""
        u, v, w = bloch
        om_r = omega.real
        om_i = omega.imag
        d = np.empty_like(bloch)
        d[0] = -self.deltas * v - om_i * w
        d[1] = self.deltas * u + om_r * w
        d[2] = om_i * u - om_r * v
        if not field_dynamics:
            return d, 0j
        source = complex(u.sum(), v.sum()) * self.weight
        domega = self.fsr * (
            -self.half_kappa * omega
            + self.sqrt_kappa * omega_in
            - 1j * self.alpha_l * source
        )
        return d, domega


def _pack(state: EnsembleState) -> FloatArray:
    return np.stack((state.u, state.v, state.w))


def _unpack(bloch: FloatArray, omega: complex) -> EnsembleState:
    return EnsembleState(u=bloch[0].copy(), v=bloch[1].copy(), w=bloch[2].copy(), omega=omega)


def _check_dimensions(state: EnsembleState, grid: DetuningGrid) -> None:
    if state.size != grid.n:
        raise DimensionMismatchError(
            f"state has {state.size} classes, grid has {grid.n}"
        )


def rhs(
    state: EnsembleState,
    omega_in: complex,
    params: CavityParams,
    grid: DetuningGrid,
    *,
    field_dynamics: bool = True,
) -> StateDerivative:
    """Return the time derivative of the ensemble and the intracavity field.

    With field_dynamics=False the field is clamped (dOmega/dt = 0).
    """
    _check_dimensions(state, grid)
    d, domega = _Kernel(params, grid)(_pack(state), state.omega, omega_in, field_dynamics)
    return StateDerivative(d[0], d[1], d[2], domega)


def _rk4(
    kernel: _Kernel,
    bloch: FloatArray,
    omega: complex,
    dt: float,
    in_start: complex,
    in_mid: complex,
    in_end: complex,
    field_dynamics: bool = True,
) -> tuple[FloatArray, complex]:
    half = 0.5 * dt
    k1, l1 = kernel(bloch, omega, in_start, field_dynamics)
    k2, l2 = kernel(bloch + half * k1, omega + half * l1, in_mid, field_dynamics)
    k3, l3 = kernel(bloch + half * k2, omega + half * l2, in_mid, field_dynamics)
    k4, l4 = kernel(bloch + dt * k3, omega + dt * l3, in_end, field_dynamics)
    sixth = dt / 6.0
    bloch_next = bloch + sixth * (k1 + 2.0 * (k2 + k3) + k4)
    omega_next = omega + sixth * (l1 + 2.0 * (l2 + l3) + l4)
    return bloch_next, omega_next


def _waveform_interpolant(waveform: Waveform) -> InputInterpolant:
    def source(time: float) -> complex:
        return complex(waveform.interpolate(time))

    return source


def step_rk4(
    state: EnsembleState,
    t: float,
    dt: float,
    omega_in: InputInterpolant | Waveform,
    params: CavityParams,
    grid: DetuningGrid,
    *,
    field_dynamics: bool = True,
) -> EnsembleState:
    """Advance the state by one classical Runge-Kutta step.

    The input is evaluated at t, t + dt/2 and t + dt; a Waveform is linearly
    interpolated.
    """
    _check_dimensions(state, grid)
    source = (
        _waveform_interpolant(omega_in) if isinstance(omega_in, Waveform) else omega_in
    )
    bloch, omega = _rk4(
        _Kernel(params, grid),
        _pack(state),
        state.omega,
        dt,
        source(t),
        source(t + 0.5 * dt),
        source(t + dt),
        field_dynamics,
    )
    return _unpack(bloch, omega)


def _settled(cavity: ComplexArray, inputs: ComplexArray, sqrt_kappa: float) -> bool:
    """Return whether the last cavity and output samples are negligible."""
    output = sqrt_kappa * cavity - inputs
    return all(
        abs(x[-1]) <= QUIESCENT_RTOL * float(np.max(np.abs(x))) for x in (cavity, output)
    )


def simulate(config: SimulationConfig) -> SimulationRecord:
    """Integrate from the ground state over the configured window.

    Past t_end the field is checked every SETTLE_CHECK_STRIDE steps and the
    integration stops as soon as it has settled.
    """
    config.validate()
    params, grid, dt = config.params, config.grid, config.dt
    n_steps = config.n_steps
    n_max = config.n_max_steps
    times = config.t_start + dt * np.arange(n_max + 1, dtype=np.float64)
    inputs = np.asarray(config.input.interpolate(times), dtype=np.complex128)
    inputs_mid = np.asarray(
        config.input.interpolate(times[:-1] + 0.5 * dt), dtype=np.complex128
    )

    kernel = _Kernel(params, grid)
    bloch = _pack(EnsembleState.ground(grid.n))
    omega = 0j
    cavity = np.empty(n_max + 1, dtype=np.complex128)
    cavity[0] = omega
    snapshots: list[Snapshot] = []
    stride = config.snapshot_stride
    if stride:
        snapshots.append(Snapshot(float(times[0]), _unpack(bloch, omega)))

    _LOGGER.debug(
        "Integrating %d steps (at most %d) of %.3e s over %d detuning classes",
        n_steps,
        n_max,
        dt,
        grid.n,
    )
    last = n_max
    for step in range(n_max):
        bloch, omega = _rk4(
            kernel,
            bloch,
            omega,
            dt,
            complex(inputs[step]),
            complex(inputs_mid[step]),
            complex(inputs[step + 1]),
        )
        done = step + 1
        if not cmath.isfinite(omega):
            raise IntegrationError(
                "Intracavity field diverged", time=float(times[done]), step=done
            )
        if done % FINITE_CHECK_STRIDE == 0 and not np.all(np.isfinite(bloch)):
            raise IntegrationError(
                "Bloch vectors diverged", time=float(times[done]), step=done
            )
        cavity[done] = omega
        if stride and done % stride == 0:
            snapshots.append(Snapshot(float(times[done]), _unpack(bloch, omega)))
        if (
            n_steps <= done < n_max
            and (done - n_steps) % SETTLE_CHECK_STRIDE == 0
            and _settled(cavity[: done + 1], inputs[: done + 1], params.sqrt_kappa)
        ):
            last = done
            break
    else:
        if n_max > n_steps:
            _LOGGER.warning(
                "Field has not settled by t_max = %.3e s; the record is truncated",
                float(times[n_max]),
            )

    if not np.all(np.isfinite(bloch)):
        raise IntegrationError("Bloch vectors diverged", time=float(times[last]), step=last)
    if last > n_steps:
        _LOGGER.debug("Extended the window to %.3e s for the field to settle", times[last])

    inputs = inputs[: last + 1]
    cavity = cavity[: last + 1]
    omega_in = Waveform(config.t_start, dt, inputs)
    if not np.iscomplexobj(config.input.samples):
        omega_in = omega_in.real
    omega_cav = Waveform(config.t_start, dt, cavity)
    omega_out = Waveform(config.t_start, dt, params.sqrt_kappa * cavity - inputs)
    _LOGGER.debug("Integration finished, final |Omega| = %.3e rad/s", abs(omega))
    return SimulationRecord(
        omega_in=omega_in,
        omega_cav=omega_cav,
        omega_out=omega_out,
        final_state=_unpack(bloch, omega),
        snapshots=tuple(snapshots),
    )


def stored_energy(
    state: EnsembleState, params: CavityParams, grid: DetuningGrid
) -> float:
    """Return the atomic excitation energy (alpha_l/2pi) sum (W+1)/2 dDelta."""
    _check_dimensions(state, grid)
    return float(
        params.alpha_l / (2.0 * math.pi) * np.sum(0.5 * (state.w + 1.0)) * grid.weight
    )


def excitation_quanta(
    state: EnsembleState, params: CavityParams, grid: DetuningGrid
) -> float:
    """Return alpha_l sum (W+1) dDelta, the population term of the quanta balance."""
    _check_dimensions(state, grid)
    return float(params.alpha_l * np.sum(state.w + 1.0) * grid.weight)


def cavity_quanta(state: EnsembleState, params: CavityParams) -> float:
    """Return |Omega|^2 / 2D, the field energy still stored in the cavity."""
    return abs(state.omega) ** 2 / (2.0 * params.fsr)


def quanta_balance(
    record: SimulationRecord, params: CavityParams, grid: DetuningGrid
) -> float:
    """Return the relative residual of the quanta balance over the record.

    alpha_l sum (W+1) dDelta + |Omega(T)|^2 / 2D = (U_in - U_out) / 2 holds
    exactly for the continuous equations; the residual is divided by U_in.
    """
    u_in = energy(record.omega_in)
    if u_in == 0.0:
        return 0.0
    u_out = energy(record.omega_out)
    stored = excitation_quanta(record.final_state, params, grid) + cavity_quanta(
        record.final_state, params
    )
    return (stored - 0.5 * (u_in - u_out)) / u_in

"""Diagnostics tying simulation records to the conservation rules."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Literal, NamedTuple

import numpy as np
from scipy import signal

from .area_theorem import area_residual, intracavity_area
from .exceptions import InvalidParameterError, SweepPointError, UndefinedWidthError
from .models import (
    CavityParams,
    ComplexArray,
    DetuningGrid,
    FloatArray,
    SimulationRecord,
    Waveform,
)
from .pulse import RmsWidth, area, energy, rms_width
from .simulator import (
    SimulationConfig,
    cavity_quanta,
    quanta_balance,
    simulate,
    stored_energy,
)

_LOGGER = logging.getLogger(__name__)


class CorrelationPeak(NamedTuple):
    """Peak of a normalised cross-correlation and the delay where it occurs."""

    peak: float
    delay: float


@dataclass(frozen=True, slots=True)
class RunDiagnostics:
    """Derived quantities of one simulation record.

    Widths are NaN where the rms width is undefined (vanishing area);
    w_resonant is NaN on grids without a class at zero detuning.
    """

    theta_in: float
    theta_cav: float
    theta_out: float
    u_in: float
    u_out: float
    u_w_final: float
    u_cav_final: float
    quanta_residual: float
    sigma_in: float
    sigma_out: float
    mu_out: float
    elongation: float
    area_theorem_residual: float
    w_resonant: float
    bloch_norm_error: float
    field_imag_ratio: float
    quiescent: bool

    def items(self) -> list[tuple[str, float]]:
        """Return (name, value) pairs in declaration order."""
        return [
            (f.name, float(value))
            for f, value in zip(fields(self), astuple(self), strict=True)
        ]


def _width_or_nan(w: Waveform) -> RmsWidth:
    try:
        return rms_width(w)
    except UndefinedWidthError as err:
        _LOGGER.debug("Rms width undefined: %s", err)
        return RmsWidth(math.nan, math.nan)


def _resonant_inversion(record: SimulationRecord, grid: DetuningGrid) -> float:
    try:
        return float(record.final_state.w[grid.center_index])
    except InvalidParameterError:
        return math.nan


def diagnose(
    record: SimulationRecord, params: CavityParams, grid: DetuningGrid
) -> RunDiagnostics:
    """Compute areas, energies, widths and the conservation residuals."""
    quiescent = record.omega_cav.is_quiescent() and record.omega_out.is_quiescent()
    if not quiescent:
        _LOGGER.warning("Record does not end quiescent; energies and areas are truncated")

    theta_in = area(record.omega_in)
    theta_cav = area(record.omega_cav)
    width_in = _width_or_nan(record.omega_in)
    width_out = _width_or_nan(record.omega_out)
    elongation = width_out.sigma / width_in.sigma

    cavity = record.omega_cav.samples
    real_peak = float(np.max(np.abs(np.real(cavity))))
    imag_peak = float(np.max(np.abs(np.imag(cavity))))
    states = [record.final_state, *(snap.state for snap in record.snapshots)]

    return RunDiagnostics(
        theta_in=theta_in,
        theta_cav=theta_cav,
        theta_out=area(record.omega_out),
        u_in=energy(record.omega_in),
        u_out=energy(record.omega_out),
        u_w_final=stored_energy(record.final_state, params, grid),
        u_cav_final=cavity_quanta(record.final_state, params),
        quanta_residual=quanta_balance(record, params, grid),
        sigma_in=width_in.sigma,
        sigma_out=width_out.sigma,
        mu_out=width_out.mu,
        elongation=elongation,
        area_theorem_residual=area_residual(theta_cav, theta_in, params)
        / (0.5 * params.kappa),
        w_resonant=_resonant_inversion(record, grid),
        bloch_norm_error=max(state.bloch_norm_deviation() for state in states),
        field_imag_ratio=imag_peak / real_peak if real_peak > 0.0 else 0.0,
        quiescent=quiescent,
    )


def transfer_function(
    record: SimulationRecord,
    omega_max: float,
    *,
    field: Literal["out", "cav"] = "out",
) -> tuple[FloatArray, ComplexArray]:
    """Return (omega, X(omega) / Omega_in(omega)) on FFT bins with |omega| <= omega_max.

    X is the output field (field="out") or the intracavity field ("cav").
    """
    target = record.omega_out if field == "out" else record.omega_cav
    spectrum_in = np.fft.fft(record.omega_in.samples)
    spectrum = np.fft.fft(target.samples)
    # numpy transforms with exp(-i omega t); bin k therefore sits at -omega_k.
    omegas = -2.0 * math.pi * np.fft.fftfreq(record.omega_in.n_samples, record.omega_in.dt)
    mask = np.abs(omegas) <= omega_max
    order = np.argsort(omegas[mask])
    return omegas[mask][order], (spectrum[mask] / spectrum_in[mask])[order]


def correlation_delay(reference: Waveform, signal_: Waveform) -> CorrelationPeak:
    """Return the normalised cross-correlation peak and the delay of signal_.

    The discrete peak is refined by a parabola through its neighbours.
    """
    if not math.isclose(reference.dt, signal_.dt, rel_tol=1e-12):
        raise InvalidParameterError("waveforms must share the sampling step")
    x = np.real(reference.samples)
    y = np.real(signal_.samples)
    norm = math.sqrt(float(np.dot(x, x)) * float(np.dot(y, y)))
    if norm == 0.0:
        raise InvalidParameterError("cannot correlate an all-zero waveform")
    corr = signal.correlate(y, x, mode="full") / norm
    lags = signal.correlation_lags(y.size, x.size, mode="full")
    k = int(np.argmax(corr))
    peak = float(corr[k])
    offset = 0.0
    if 0 < k < corr.size - 1:
        left, right = float(corr[k - 1]), float(corr[k + 1])
        curvature = left - 2.0 * peak + right
        if curvature < 0.0:
            offset = 0.5 * (left - right) / curvature
            peak -= 0.25 * (left - right) * offset
    delay = (float(lags[k]) + offset) * reference.dt + (signal_.t0 - reference.t0)
    return CorrelationPeak(peak, delay)


@dataclass(frozen=True, slots=True)
class SweepRow:
    """One input area of a sweep: simulated and analytic areas plus distortion."""

    theta_in: float
    theta_cav_sim: float
    theta_cav_theory: float
    theta_out_sim: float
    theta_out_theory: float
    sigma_out: float
    elongation: float
    quanta_residual: float

    @property
    def deviation(self) -> float:
        """Return the larger of the intracavity and output area errors."""
        return max(
            abs(self.theta_cav_sim - self.theta_cav_theory),
            abs(self.theta_out_sim - self.theta_out_theory),
        )


@dataclass(frozen=True, slots=True)
class SweepTable:
    """Rows of an area sweep, in the order the areas were given."""

    rows: tuple[SweepRow, ...]

    @property
    def max_deviation(self) -> float:
        """Return the largest simulated-vs-analytic area error."""
        return max((row.deviation for row in self.rows), default=0.0)

    def elongation_argmax(self) -> float:
        """Return the input area with the largest output elongation."""
        elongations = np.array([row.elongation for row in self.rows])
        if elongations.size == 0 or np.all(np.isnan(elongations)):
            raise UndefinedWidthError("no sweep point has a defined elongation")
        return self.rows[int(np.nanargmax(elongations))].theta_in


def _run_point(config: SimulationConfig) -> RunDiagnostics:
    return diagnose(simulate(config), config.params, config.grid)


def _row(theta_in: float, params: CavityParams, diag: RunDiagnostics) -> SweepRow:
    theory = intracavity_area(theta_in, params)
    return SweepRow(
        theta_in=theta_in,
        theta_cav_sim=diag.theta_cav,
        theta_cav_theory=theory.theta_cav,
        theta_out_sim=diag.theta_out,
        theta_out_theory=theory.theta_out,
        sigma_out=diag.sigma_out,
        elongation=diag.elongation,
        quanta_residual=diag.quanta_residual,
    )


def figure2_sweep(
    areas: Sequence[float], base: SimulationConfig, *, workers: int = 1
) -> SweepTable:
    """Simulate the base input rescaled to every area and compare with the theorem.

    With workers > 1 the points run on a process pool; rows keep the order of
    areas. A failing point raises SweepPointError naming its input area.
    """
    base_area = area(base.input)
    if base_area == 0.0:
        raise InvalidParameterError("the base input must have a non-zero area")
    configs = [base.with_input(base.input.scaled(theta / base_area)) for theta in areas]
    _LOGGER.info("Sweeping %d input areas with %d worker(s)", len(configs), workers)

    rows: list[SweepRow] = []
    if workers <= 1:
        for theta, config in zip(areas, configs, strict=True):
            try:
                diag = _run_point(config)
            except Exception as err:
                raise SweepPointError(theta) from err
            rows.append(_row(theta, base.params, diag))
        return SweepTable(tuple(rows))

    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures: list[Future[RunDiagnostics]] = [
            executor.submit(_run_point, config) for config in configs
        ]
        for theta, future in zip(areas, futures, strict=True):
            try:
                diag = future.result()
            except Exception as err:
                for pending in futures:
                    pending.cancel()
                raise SweepPointError(theta) from err
            rows.append(_row(theta, base.params, diag))
    return SweepTable(tuple(rows))

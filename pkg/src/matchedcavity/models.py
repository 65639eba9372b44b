"""Parameter and state containers shared by the simulator and the analytic tools.

Units: every rate, detuning and Rabi frequency is in rad/s. The free spectral
range D is stored as an ordinary frequency in s^-1, so that the cavity
linewidth reads 2*kappa*D (2*pi x 12 MHz for finesse 500 and D = 3 GHz).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import MATCHING_TOL, QUIESCENT_RTOL
from .exceptions import DimensionMismatchError, InvalidParameterError

_LOGGER = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]


class MatchingStatus(NamedTuple):
    """Impedance matching verdict."""

    matched: bool
    mismatch: float


@dataclass(frozen=True, slots=True)
class CavityParams:
    """Ring cavity with an absorbing medium.

    kappa is the intensity transmission of the entrance mirror, fsr the free
    spectral range D = c/L (s^-1) and alpha_l the round-trip absorption.
    """

    kappa: float
    fsr: float
    alpha_l: float

    def __post_init__(self) -> None:
        """Validate the cavity parameters."""
        if not 0.0 < self.kappa < 1.0:
            raise InvalidParameterError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not self.fsr > 0.0:
            raise InvalidParameterError(f"fsr must be positive, got {self.fsr}")
        if not self.alpha_l >= 0.0:
            raise InvalidParameterError(
                f"alpha_l must be non-negative, got {self.alpha_l}"
            )

    @classmethod
    def matched_to(cls, kappa: float, fsr: float) -> CavityParams:
        """Return the impedance-matched cavity, alpha_l = kappa / 2pi."""
        return cls(kappa=kappa, fsr=fsr, alpha_l=kappa / (2.0 * math.pi))

    @classmethod
    def from_finesse(
        cls, finesse: float, fsr: float, alpha_l: float | None = None
    ) -> CavityParams:
        """Build the cavity from its finesse 2pi/kappa (matched by default)."""
        if not finesse > 2.0 * math.pi:
            raise InvalidParameterError(f"finesse must exceed 2pi, got {finesse}")
        kappa = 2.0 * math.pi / finesse
        if alpha_l is None:
            return cls.matched_to(kappa, fsr)
        return cls(kappa=kappa, fsr=fsr, alpha_l=alpha_l)

    @property
    def finesse(self) -> float:
        """Return the cavity finesse 2pi/kappa."""
        return 2.0 * math.pi / self.kappa

    @property
    def sqrt_kappa(self) -> float:
        """Return the amplitude transmission of the entrance mirror."""
        return math.sqrt(self.kappa)


def matched(params: CavityParams) -> MatchingStatus:
    """Return whether alpha_l equals kappa/2pi, with the relative mismatch."""
    mismatch = params.alpha_l * 2.0 * math.pi / params.kappa - 1.0
    return MatchingStatus(abs(mismatch) <= MATCHING_TOL, mismatch)


def cavity_linewidth(params: CavityParams) -> float:
    """Return the FWHM of the matched reflection dip, 2 kappa D (rad/s)."""
    return 2.0 * params.kappa * params.fsr


@dataclass(frozen=True, slots=True)
class DetuningGrid:
    """Symmetric discretisation of the inhomogeneous detuning axis.

    Point k sits at (k - (n-1)/2) * spacing; every class carries the
    quadrature weight spacing, which folds in g(detuning) = 1.
    """

    n: int
    spacing: float

    def __post_init__(self) -> None:
        """Validate the grid."""
        if self.n < 1:
            raise InvalidParameterError(f"grid needs at least one class, got {self.n}")
        if not self.spacing > 0.0:
            raise InvalidParameterError(
                f"grid spacing must be positive, got {self.spacing}"
            )

    @property
    def points(self) -> FloatArray:
        """Return the detunings (rad/s)."""
        k = np.arange(self.n, dtype=np.float64)
        return (k - 0.5 * (self.n - 1)) * self.spacing

    @property
    def weight(self) -> float:
        """Return the quadrature weight of one class."""
        return self.spacing

    @property
    def max_detuning(self) -> float:
        """Return the largest |detuning| on the grid."""
        return 0.5 * (self.n - 1) * self.spacing

    @property
    def half_span(self) -> float:
        """Return the half-width represented by the midpoint quadrature."""
        return 0.5 * self.n * self.spacing

    @property
    def recurrence_time(self) -> float:
        """Return 2pi/spacing, when the discrete comb rephases."""
        return 2.0 * math.pi / self.spacing

    @property
    def center_index(self) -> int:
        """Return the index of the on-resonance class (odd n only)."""
        if self.n % 2 == 0:
            raise InvalidParameterError("an even grid has no point at zero detuning")
        return self.n // 2


@dataclass(eq=False, slots=True)
class EnsembleState:
    """Bloch components per detuning class plus the intracavity field."""

    u: FloatArray
    v: FloatArray
    w: FloatArray
    omega: complex = 0j

    def __post_init__(self) -> None:
        """Validate array shapes."""
        self.u = np.asarray(self.u, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        self.w = np.asarray(self.w, dtype=np.float64)
        self.omega = complex(self.omega)
        if not self.u.ndim == self.v.ndim == self.w.ndim == 1:
            raise DimensionMismatchError("Bloch components must be 1-D arrays")
        if not self.u.shape == self.v.shape == self.w.shape:
            raise DimensionMismatchError(
                f"Bloch components differ in length: "
                f"{self.u.shape}, {self.v.shape}, {self.w.shape}"
            )

    @classmethod
    def ground(cls, n: int) -> EnsembleState:
        """Return every class in the ground state (0, 0, -1) with no field."""
        return cls(
            u=np.zeros(n),
            v=np.zeros(n),
            w=-np.ones(n),
            omega=0j,
        )

    @property
    def size(self) -> int:
        """Return the number of detuning classes."""
        return int(self.u.shape[0])

    def bloch_norm_deviation(self) -> float:
        """Return max |U^2 + V^2 + W^2 - 1| over the classes."""
        if self.size == 0:
            return 0.0
        norm = self.u**2 + self.v**2 + self.w**2
        return float(np.max(np.abs(norm - 1.0)))

    def copy(self) -> EnsembleState:
        """Return an independent copy."""
        return EnsembleState(
            u=self.u.copy(), v=self.v.copy(), w=self.w.copy(), omega=self.omega
        )


@dataclass(frozen=True, eq=False, slots=True)
class Waveform:
    """Uniformly sampled Rabi-frequency envelope."""

    t0: float
    dt: float
    samples: NDArray[np.float64] | NDArray[np.complex128]

    def __post_init__(self) -> None:
        """Validate the sampling."""
        if not self.dt > 0.0:
            raise InvalidParameterError(f"waveform step must be positive, got {self.dt}")
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidParameterError("waveform samples must be a non-empty 1-D array")
        if not np.iscomplexobj(samples):
            samples = samples.astype(np.float64, copy=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n_samples(self) -> int:
        """Return the number of samples."""
        return int(self.samples.shape[0])

    @property
    def times(self) -> FloatArray:
        """Return the sample times."""
        return self.t0 + self.dt * np.arange(self.n_samples, dtype=np.float64)

    @property
    def t_end(self) -> float:
        """Return the time of the last sample."""
        return self.t0 + self.dt * (self.n_samples - 1)

    @property
    def peak(self) -> float:
        """Return max |envelope|."""
        return float(np.max(np.abs(self.samples)))

    @property
    def real(self) -> Waveform:
        """Return the real part of the envelope."""
        return Waveform(self.t0, self.dt, np.real(self.samples).copy())

    def interpolate(self, t: ArrayLike) -> NDArray[np.float64] | NDArray[np.complex128]:
        """Return the linearly interpolated envelope, zero outside the record."""
        times = self.times
        if np.iscomplexobj(self.samples):
            re = np.interp(t, times, self.samples.real, left=0.0, right=0.0)
            im = np.interp(t, times, self.samples.imag, left=0.0, right=0.0)
            return re + 1j * im
        return np.interp(t, times, self.samples, left=0.0, right=0.0)

    def scaled(self, factor: float) -> Waveform:
        """Return the envelope multiplied by factor."""
        return Waveform(self.t0, self.dt, self.samples * factor)

    def shifted(self, delta_t: float) -> Waveform:
        """Return the same samples delayed by delta_t."""
        return Waveform(self.t0 + delta_t, self.dt, self.samples.copy())

    def mirrored(self) -> Waveform:
        """Return the envelope reversed in time about the record centre."""
        return Waveform(self.t0, self.dt, self.samples[::-1].copy())

    def is_quiescent(self, rtol: float = QUIESCENT_RTOL) -> bool:
        """Return whether both end samples are below rtol times the peak."""
        peak = self.peak
        if peak == 0.0:
            return True
        ends = max(abs(self.samples[0]), abs(self.samples[-1]))
        return bool(ends <= rtol * peak)


@dataclass(frozen=True, eq=False, slots=True)
class Snapshot:
    """Ensemble state captured during an integration."""

    time: float
    state: EnsembleState


@dataclass(frozen=True, eq=False, slots=True)
class SimulationRecord:
    """Time series of one integration.

    omega_out is built from the recorded omega_cav and omega_in through the
    input/output relation, so it holds sample by sample.
    """

    omega_in: Waveform
    omega_cav: Waveform
    omega_out: Waveform
    final_state: EnsembleState
    snapshots: tuple[Snapshot, ...] = field(default_factory=tuple)

    @property
    def times(self) -> FloatArray:
        """Return the shared time axis."""
        return self.omega_cav.times

"""Pulse construction and scalar functionals of sampled envelopes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid

from .const import (
    GAUSSIAN_SUPPORT_SIGMAS,
    SIGN_CHANGE_RTOL,
    ZERO_AREA_ATOL,
    ZERO_AREA_RTOL,
)
from .exceptions import (
    InvalidParameterError,
    UndefinedWidthError,
    WindowTooShortError,
    ZeroAreaError,
)
from .models import CavityParams, Waveform

_LOGGER = logging.getLogger(__name__)


class RmsWidth(NamedTuple):
    """Rms width and mean time of a normalised envelope."""

    sigma: float
    mu: float


@dataclass(frozen=True, slots=True)
class GaussianPulseSpec:
    """Gaussian input pulse: rms duration, target area and centre time."""

    sigma_t: float
    area: float
    center: float

    def __post_init__(self) -> None:
        """Validate the pulse."""
        if not self.sigma_t > 0.0:
            raise InvalidParameterError(
                f"sigma_t must be positive, got {self.sigma_t}"
            )

    @property
    def amplitude(self) -> float:
        """Return the peak Rabi frequency area / (sigma_t sqrt(2pi))."""
        return self.area / (self.sigma_t * math.sqrt(2.0 * math.pi))

    @property
    def spectral_width(self) -> float:
        """Return the rms width of the envelope spectrum, 1/sigma_t."""
        return 1.0 / self.sigma_t


def pi_pulse_area(params: CavityParams) -> float:
    """Return the input area (sqrt(kappa)/2) pi that drives an intracavity pi rotation."""
    return 0.5 * params.sqrt_kappa * math.pi


def make_gaussian(
    spec: GaussianPulseSpec, t0: float, dt: float, n_samples: int
) -> Waveform:
    """Sample the Gaussian envelope on a uniform grid.

    The envelope is cut to zero beyond +-6 sigma, which the record must
    contain, and rescaled so that its trapezoidal area equals spec.area.
    """
    if n_samples < 2:
        raise InvalidParameterError(f"need at least two samples, got {n_samples}")
    t_end = t0 + dt * (n_samples - 1)
    half_support = GAUSSIAN_SUPPORT_SIGMAS * spec.sigma_t
    slack = 1e-9 * spec.sigma_t
    if spec.center - half_support < t0 - slack or spec.center + half_support > t_end + slack:
        raise WindowTooShortError(
            f"window [{t0:.6e}, {t_end:.6e}] s clips the +-{GAUSSIAN_SUPPORT_SIGMAS:g} "
            f"sigma support of a pulse centred at {spec.center:.6e} s"
        )
    times = t0 + dt * np.arange(n_samples, dtype=np.float64)
    if spec.area == 0.0:
        return Waveform(t0, dt, np.zeros(n_samples))
    offsets = (times - spec.center) / spec.sigma_t
    envelope = np.where(
        np.abs(offsets) <= GAUSSIAN_SUPPORT_SIGMAS, np.exp(-0.5 * offsets**2), 0.0
    )
    # Scale the sampled envelope itself so its quadrature hits the target area.
    envelope *= spec.area / float(trapezoid(envelope, dx=dt))
    return Waveform(t0, dt, envelope)


def make_rectangular(
    duration: float,
    amplitude: float,
    center: float,
    t0: float,
    dt: float,
    n_samples: int,
) -> Waveform:
    """Sample a rectangular envelope of the given duration."""
    times = t0 + dt * np.arange(n_samples, dtype=np.float64)
    inside = np.abs(times - center) <= 0.5 * duration
    return Waveform(t0, dt, np.where(inside, amplitude, 0.0))


def area(w: Waveform) -> float:
    """Return the signed pulse area, the trapezoidal integral of Re(envelope)."""
    return float(trapezoid(np.real(w.samples), dx=w.dt))


def energy(w: Waveform) -> float:
    """Return the pulse energy, the trapezoidal integral of |envelope|^2."""
    return float(trapezoid(np.abs(w.samples) ** 2, dx=w.dt))


def rms_width(w: Waveform) -> RmsWidth:
    """Return the rms width and mean of the envelope normalised by its area.

    The signed envelope is used as the distribution, so a waveform whose
    lobes cancel has no defined width.
    """
    envelope = np.real(w.samples)
    theta = float(trapezoid(envelope, dx=w.dt))
    abs_area = float(trapezoid(np.abs(envelope), dx=w.dt))
    if abs(theta) <= max(ZERO_AREA_ATOL, ZERO_AREA_RTOL * abs_area):
        raise ZeroAreaError(f"area {theta:.3e} rad is too small to normalise the envelope")

    p = envelope / theta
    if np.min(p) < -SIGN_CHANGE_RTOL * np.max(np.abs(p)):
        _LOGGER.warning("Envelope changes sign; rms width may be ill-conditioned")

    times = w.times
    mu = float(trapezoid(times * p, dx=w.dt))
    variance = float(trapezoid((times - mu) ** 2 * p, dx=w.dt))
    if variance < 0.0:
        raise UndefinedWidthError(f"negative variance {variance:.3e} s^2")
    return RmsWidth(math.sqrt(variance), mu)

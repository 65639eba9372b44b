"""Test pulse construction and functionals."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from matchedcavity.exceptions import (
    InvalidParameterError,
    UndefinedWidthError,
    WindowTooShortError,
    ZeroAreaError,
)
from matchedcavity.models import CavityParams, Waveform
from matchedcavity.pulse import (
    GaussianPulseSpec,
    area,
    energy,
    make_gaussian,
    make_rectangular,
    pi_pulse_area,
    rms_width,
)


def _gaussian(area_: float = 1.0, sigma_t: float = 2.0e-6) -> Waveform:
    return make_gaussian(GaussianPulseSpec(sigma_t, area_, 15.0e-6), 0.0, 2.0e-9, 15001)


def test_gaussian_area_and_width() -> None:
    """Test the sampled Gaussian has the requested area and rms width."""
    wave = _gaussian(area_=0.25)
    assert area(wave) == pytest.approx(0.25, rel=1e-9)
    width = rms_width(wave)
    assert width.sigma == pytest.approx(2.0e-6, rel=1e-6)
    assert width.mu == pytest.approx(15.0e-6, rel=1e-9)


def test_gaussian_energy() -> None:
    """Test the energy of a Gaussian of peak A and rms width s is A^2 s sqrt(pi)."""
    spec = GaussianPulseSpec(2.0e-6, 0.25, 15.0e-6)
    expected = spec.amplitude**2 * spec.sigma_t * math.sqrt(math.pi)
    assert energy(_gaussian(area_=0.25)) == pytest.approx(expected, rel=1e-8)


def test_gaussian_spec() -> None:
    """Test the amplitude and spectral width of the Gaussian description."""
    spec = GaussianPulseSpec(2.0e-6, 1.0, 0.0)
    assert spec.amplitude == pytest.approx(1.0 / (2.0e-6 * math.sqrt(2.0 * math.pi)))
    assert spec.spectral_width == pytest.approx(5.0e5)
    with pytest.raises(InvalidParameterError):
        GaussianPulseSpec(0.0, 1.0, 0.0)


def test_pi_pulse_area(matched_params: CavityParams) -> None:
    """Test the pi-pulse input area is sqrt(kappa)/2 pi."""
    assert pi_pulse_area(matched_params) == pytest.approx(
        0.5 * math.sqrt(2.0 * math.pi / 500.0) * math.pi
    )


def test_window_too_short() -> None:
    """Test a window that clips the 6 sigma support is rejected."""
    spec = GaussianPulseSpec(2.0e-6, 1.0, 10.0e-6)
    with pytest.raises(WindowTooShortError):
        make_gaussian(spec, 0.0, 2.0e-9, 5001)


def test_zero_area_gaussian() -> None:
    """Test a zero-area request gives an all-zero envelope."""
    wave = _gaussian(area_=0.0)
    assert wave.peak == 0.0
    with pytest.raises(ZeroAreaError):
        rms_width(wave)


def test_rectangular() -> None:
    """Test the rectangular envelope covers its duration."""
    wave = make_rectangular(1.0, 2.0, 5.0, 0.0, 0.01, 1001)
    assert area(wave) == pytest.approx(2.0, abs=0.03)
    assert energy(wave) == pytest.approx(4.0, abs=0.06)
    assert rms_width(wave).mu == pytest.approx(5.0, abs=1e-6)


def test_cancelling_lobes_have_no_width() -> None:
    """Test a waveform whose lobes cancel has no rms width."""
    times = np.linspace(-10.0, 10.0, 2001)
    wave = Waveform(-10.0, 0.01, times * np.exp(-0.5 * times**2))
    with pytest.raises(ZeroAreaError):
        rms_width(wave)


def test_sign_change_warns(caplog: pytest.LogCaptureFixture) -> None:
    """Test a sign-changing envelope logs a warning."""
    times = np.linspace(-10.0, 10.0, 2001)
    envelope = np.exp(-0.5 * times**2) - 0.05 * np.exp(-0.5 * ((times - 3.0) / 0.2) ** 2)
    with caplog.at_level(logging.WARNING):
        width = rms_width(Waveform(-10.0, 0.01, envelope))
    assert "changes sign" in caplog.text
    assert width.sigma > 0.0


def test_negative_variance() -> None:
    """Test a negative variance raises UndefinedWidthError."""
    times = np.linspace(-10.0, 10.0, 2001)
    envelope = 3.0 * np.exp(-0.5 * (times / 0.5) ** 2) - np.exp(-0.5 * times**2)
    with pytest.raises(UndefinedWidthError):
        rms_width(Waveform(-10.0, 0.01, envelope))


def test_gaussian_support_and_normalisation() -> None:
    """Test the Gaussian vanishes beyond 6 sigma and carries the exact target area."""
    spec = GaussianPulseSpec(2.0e-6, 0.75, 15.0e-6)
    wave = make_gaussian(spec, 0.0, 2.0e-9, 15001)
    outside = np.abs(wave.times - spec.center) > 6.0 * spec.sigma_t
    assert outside.any()
    assert np.all(wave.samples[outside] == 0.0)
    assert area(wave) == pytest.approx(0.75, rel=1e-12)
    assert wave.peak == pytest.approx(spec.amplitude, rel=1e-6)

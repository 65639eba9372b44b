"""Exceptions for the matched ring-cavity simulator."""

from __future__ import annotations

from collections.abc import Sequence


class MatchedCavityError(Exception):
    """Base class for every error raised by matchedcavity."""


class InvalidParameterError(MatchedCavityError, ValueError):
    """A parameter or state container violates one of its invariants."""


class DimensionMismatchError(InvalidParameterError):
    """Per-detuning arrays do not have consistent lengths."""


class WindowTooShortError(InvalidParameterError):
    """The sampling window clips the support of a generated pulse."""


class ConfigInvariantError(InvalidParameterError):
    """A simulation configuration fails a resolution or window rule."""

    def __init__(self, field: str, message: str) -> None:
        """Initialize the error."""
        super().__init__(f"{field}: {message}")
        self.field = field


class SingularInversionError(InvalidParameterError):
    """The linear response is singular at the requested inversion level."""


class UndefinedWidthError(MatchedCavityError):
    """The rms width of a waveform is not defined."""


class ZeroAreaError(UndefinedWidthError):
    """The waveform area is too small to normalise the envelope."""


class IntegrationError(MatchedCavityError):
    """The time integration produced a non-finite state."""

    def __init__(self, message: str, *, time: float, step: int) -> None:
        """Initialize the error."""
        super().__init__(f"{message} at t={time:.6e} s (step {step})")
        self.time = time
        self.step = step


class SweepPointError(MatchedCavityError):
    """One point of an area sweep failed."""

    def __init__(self, theta_in: float) -> None:
        """Initialize the error."""
        super().__init__(f"Sweep point theta_in={theta_in:.6g} rad failed")
        self.theta_in = theta_in


class ScenarioConfigError(MatchedCavityError):
    """A scenario file cannot be read or does not validate."""

    def __init__(self, errors: Sequence[str]) -> None:
        """Initialize the error."""
        super().__init__("; ".join(errors))
        self.errors: list[str] = list(errors)


__all__ = [
    "ConfigInvariantError",
    "DimensionMismatchError",
    "IntegrationError",
    "InvalidParameterError",
    "MatchedCavityError",
    "ScenarioConfigError",
    "SingularInversionError",
    "SweepPointError",
    "UndefinedWidthError",
    "WindowTooShortError",
    "ZeroAreaError",
]

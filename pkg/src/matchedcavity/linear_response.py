"""Weak-signal reflection of the loaded cavity and its group delay.

Spectra use the convention X(omega) = integral x(t) exp(+i omega t) dt, under
which the time-domain simulator reproduces these transfer functions and a
delayed response has a positive group delay. A frozen population W rescales
the absorption by -W, so W > 0 turns it into gain.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from .exceptions import InvalidParameterError, SingularInversionError
from .models import CavityParams, matched

_LOGGER = logging.getLogger(__name__)

# Central-difference step of group_delay_numeric, relative to the pole distance.
_FD_RELATIVE_STEP = 1e-4


def reflection_generalized(
    omega: ArrayLike, w: float, params: CavityParams
) -> NDArray[np.complex128]:
    """Return r_W(omega) for a population frozen at W.

    r_W = (kappa/2 + pi alpha_l W + i omega/D) / (kappa/2 - pi alpha_l W - i omega/D)
    """
    x = 1j * np.asarray(omega, dtype=np.float64) / params.fsr
    gain = math.pi * params.alpha_l * w
    return np.asarray((0.5 * params.kappa + gain + x) / (0.5 * params.kappa - gain - x))


def reflection(omega: ArrayLike, params: CavityParams) -> NDArray[np.complex128]:
    """Return the ground-state reflection coefficient r(omega)."""
    return reflection_generalized(omega, -1.0, params)


def reflection_finite_band(
    omega: ArrayLike, params: CavityParams, half_span: float, w: float = -1.0
) -> NDArray[np.complex128]:
    """Return the reflection of a flat inhomogeneous line of half-width half_span.

    The band edges add the dispersive term ln((Dm + omega)/(Dm - omega)) to
    the atomic response; the result tends to reflection_generalized as the
    band widens. Valid for |omega| < half_span.
    """
    om = np.asarray(omega, dtype=np.float64)
    if np.any(np.abs(om) >= half_span):
        raise InvalidParameterError("frequencies must lie inside the inhomogeneous band")
    dispersion = np.log((half_span + om) / (half_span - om))
    x = 1j * om / params.fsr + 1j * params.alpha_l * w * dispersion
    gain = math.pi * params.alpha_l * w
    return np.asarray((0.5 * params.kappa + gain + x) / (0.5 * params.kappa - gain - x))


def pole_distance(w: float, params: CavityParams) -> float:
    if w >= 1.0:
        raise SingularInversionError(f"inversion W={w} >= 1 makes the response singular")
    distance = 0.5 * params.kappa - math.pi * params.alpha_l * w
    if distance <= 0.0:
        raise SingularInversionError(
            f"gain at W={w} exceeds the mirror coupling; no steady state"
        )
    return distance


def group_delay(w: float, params: CavityParams) -> float:
    """Return T_g from r_W(omega) = r_W(0) + i omega T_g + ...

    T_g = kappa / (D (kappa/2 - pi alpha_l W)^2), i.e. 8 / (dw_cav (1 - W)^2)
    for a matched cavity, diverging as W -> 1.
    """
    if not matched(params).matched:
        _LOGGER.warning("Group delay requested for a cavity that is not matched")
    distance = pole_distance(w, params)
    return params.kappa / (params.fsr * distance**2)


def group_delay_quoted(w: float, params: CavityParams) -> float:
    """Return the often quoted 4 / (dw_cav (1 - W)^2), half of group_delay."""
    pole_distance(w, params)
    return 4.0 / (2.0 * params.kappa * params.fsr * (1.0 - w) ** 2)


def group_delay_numeric(w: float, params: CavityParams) -> float:
    """Return T_g from a central difference of r_W at omega = 0."""
    step = _FD_RELATIVE_STEP * params.fsr * pole_distance(w, params)
    r_plus, r_minus = reflection_generalized(np.array([step, -step]), w, params)
    return float(((r_plus - r_minus) / (2.0 * step) / 1j).real)


def dip_fwhm(params: CavityParams, omega_max: float, n_points: int = 2001) -> float:
    """Return the FWHM of the reflection dip 1 - |r(omega)|^2.

    The dip is scanned on [-omega_max, omega_max] and both half-maximum
    crossings are refined by bisection.
    """
    if n_points < 3:
        raise InvalidParameterError(f"need at least three scan points, got {n_points}")
    omegas = np.linspace(-omega_max, omega_max, n_points)

    def dip(omega: float) -> float:
        return float(1.0 - abs(complex(reflection(omega, params))) ** 2)

    depth = np.array([dip(float(om)) for om in omegas])
    i_peak = int(np.argmax(depth))
    half = 0.5 * depth[i_peak]

    def excess(omega: float) -> float:
        return dip(omega) - half

    left = np.nonzero(depth[: i_peak + 1] < half)[0]
    right = np.nonzero(depth[i_peak:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise InvalidParameterError(
            f"scan range +-{omega_max:.3e} rad/s does not contain the half-maximum points"
        )
    i_left = int(left[-1])
    i_right = i_peak + int(right[0])
    lower = optimize.bisect(excess, omegas[i_left], omegas[i_left + 1])
    upper = optimize.bisect(excess, omegas[i_right - 1], omegas[i_right])
    return float(upper - lower)

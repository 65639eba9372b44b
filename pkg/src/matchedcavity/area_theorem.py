"""Intracavity pulse-area theorem.

Integrating the cavity equation over time, with the on-resonance population
following the Rabi-flopping solution W0 = -cos(Theta), gives

    (kappa/2) Theta + pi alpha_l sin(Theta) = sqrt(kappa) Theta_in
    Theta_out = sqrt(kappa) Theta - Theta_in

which under matching reduces to Theta + sin(Theta) = (2/sqrt(kappa)) Theta_in.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .const import AREA_RESIDUAL_TOL, AREA_SOLVER_XTOL, MATCHING_TOL
from .exceptions import InvalidParameterError
from .models import CavityParams, matched

_LOGGER = logging.getLogger(__name__)

# Scan step (rad) used to bracket roots when the source term is not monotone.
_SCAN_STEP = 1e-3


@dataclass(frozen=True, slots=True)
class AreaSolution:
    """Input, intracavity and output areas linked by the area theorem.

    branch counts the folds of the source term crossed below theta_cav; it is
    always 0 for matched or under-matched cavities.
    """

    theta_in: float
    theta_cav: float
    theta_out: float
    branch: int = 0
    residual: float = 0.0


def area_residual(theta: float, theta_in: float, params: CavityParams) -> float:
    """Return (kappa/2) Theta - sqrt(kappa) Theta_in + pi alpha_l sin(Theta)."""
    return (
        0.5 * params.kappa * theta
        - params.sqrt_kappa * theta_in
        + math.pi * params.alpha_l * math.sin(theta)
    )


def rabi_population(theta: float) -> float:
    """Return the population -cos(Theta) left on resonance by an area Theta."""
    return -math.cos(theta)


def _source(theta: float, params: CavityParams) -> float:
    return 0.5 * params.kappa * theta + math.pi * params.alpha_l * math.sin(theta)


def _source_slope(theta: float, params: CavityParams) -> float:
    return 0.5 * params.kappa + math.pi * params.alpha_l * math.cos(theta)


def _is_monotone(params: CavityParams) -> bool:
    return matched(params).mismatch <= MATCHING_TOL


def _refine(params: CavityParams, target: float, lo: float, hi: float) -> float:
    return float(
        optimize.bisect(
            lambda theta: _source(theta, params) - target,
            lo,
            hi,
            xtol=AREA_SOLVER_XTOL,
            maxiter=400,
        )
    )


def _monotone_root(params: CavityParams, target: float) -> float:
    hi = target / (0.5 * params.kappa)
    while _source(hi, params) < target:
        hi *= 2.0
        _LOGGER.debug("Expanding area bracket to %.6g rad", hi)
    return _refine(params, target, 0.0, hi)


def _first_crossing(
    params: CavityParams, target: float, start: float
) -> tuple[float, int]:
    """Scan upward from start to the first level crossing; count folds passed."""
    a = start
    ga = _source(a, params) - target
    if ga >= 0.0:
        return a, 0
    folds = 0
    rising = _source_slope(a, params) >= 0.0
    while True:
        b = a + _SCAN_STEP
        gb = _source(b, params) - target
        now_rising = _source_slope(b, params) >= 0.0
        if rising and not now_rising:
            folds += 1
            _LOGGER.warning(
                "Area continuation crosses a fold near Theta=%.6g rad "
                "(sqrt(kappa) Theta_in=%.6g)",
                b,
                target,
            )
        rising = now_rising
        if gb >= 0.0:
            return _refine(params, target, a, b), folds
        a = b


def _solution(theta_in: float, theta: float, params: CavityParams, branch: int) -> AreaSolution:
    residual = area_residual(theta, theta_in, params)
    if abs(residual) > AREA_RESIDUAL_TOL:
        _LOGGER.warning("Area theorem residual %.3e exceeds tolerance", residual)
    return AreaSolution(
        theta_in=theta_in,
        theta_cav=theta,
        theta_out=params.sqrt_kappa * theta - theta_in,
        branch=branch,
        residual=residual,
    )


def intracavity_area(theta_in: float, params: CavityParams) -> AreaSolution:
    """Solve the area theorem for the intracavity area.

    Matched and under-matched cavities have a monotone source term and a
    unique root, found by bisection on an expanding bracket. Over-matched
    cavities follow the branch grown continuously from Theta = 0; the folds
    crossed on the way are logged and counted in AreaSolution.branch.
    """
    if theta_in < 0.0:
        raise InvalidParameterError(f"theta_in must be non-negative, got {theta_in}")
    target = params.sqrt_kappa * theta_in
    if target == 0.0:
        return _solution(theta_in, 0.0, params, 0)
    if _is_monotone(params):
        return _solution(theta_in, _monotone_root(params, target), params, 0)
    theta, folds = _first_crossing(params, target, 0.0)
    return _solution(theta_in, theta, params, folds)


def all_intracavity_roots(theta_in: float, params: CavityParams) -> list[float]:
    """Return every root of the area theorem, in increasing order.

    Tangential roots of multiplicity two can be missed by the sign scan.
    """
    target = params.sqrt_kappa * theta_in
    reach = math.pi * params.alpha_l
    lo = (target - reach) / (0.5 * params.kappa) - _SCAN_STEP
    hi = (target + reach) / (0.5 * params.kappa) + _SCAN_STEP
    n_scan = max(2, int(math.ceil((hi - lo) / _SCAN_STEP)) + 1)
    grid = np.linspace(lo, hi, n_scan)
    values = np.array([_source(theta, params) - target for theta in grid])
    roots: list[float] = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], values[:-1], values[1:], strict=True):
        if ga == 0.0:
            roots.append(float(a))
        elif ga * gb < 0.0:
            roots.append(_refine(params, target, float(a), float(b)))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def area_curve(
    theta_in_max: float, n_points: int, params: CavityParams
) -> list[AreaSolution]:
    """Tabulate the area theorem on n_points evenly spaced input areas."""
    if n_points < 1:
        raise InvalidParameterError(f"n_points must be positive, got {n_points}")
    if theta_in_max < 0.0:
        raise InvalidParameterError(
            f"theta_in_max must be non-negative, got {theta_in_max}"
        )
    inputs = np.linspace(0.0, theta_in_max, n_points)
    if _is_monotone(params):
        return [intracavity_area(float(theta_in), params) for theta_in in inputs]

    curve: list[AreaSolution] = []
    theta, branch = 0.0, 0
    for theta_in in inputs:
        target = params.sqrt_kappa * float(theta_in)
        theta, folds = _first_crossing(params, target, theta)
        branch += folds
        curve.append(_solution(float(theta_in), theta, params, branch))
    return curve

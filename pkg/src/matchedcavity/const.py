"""Constants for the matched ring-cavity simulator."""

import math
from typing import Final

DOMAIN: Final[str] = "matchedcavity"

# Scenario file keys
CONF_KAPPA: Final[str] = "cavity.kappa"
CONF_FINESSE: Final[str] = "cavity.finesse"
CONF_FSR: Final[str] = "cavity.fsr"
CONF_ALPHA_L: Final[str] = "cavity.alpha_l"
CONF_GRID_N: Final[str] = "grid.n"
CONF_GRID_SPACING: Final[str] = "grid.spacing"
CONF_SIGMA_T: Final[str] = "pulse.sigma_t"
CONF_CENTER: Final[str] = "pulse.center"
CONF_AREA: Final[str] = "pulse.area"
CONF_AREA_FACTOR: Final[str] = "pulse.area_factor"
CONF_DT: Final[str] = "integrator.dt"
CONF_T_START: Final[str] = "integrator.t_start"
CONF_T_END: Final[str] = "integrator.t_end"
CONF_T_MAX: Final[str] = "integrator.t_max"
CONF_SNAPSHOT_STRIDE: Final[str] = "integrator.snapshot_stride"
CONF_SWEEP_POINTS: Final[str] = "sweep.points"
CONF_SWEEP_MAX_FACTOR: Final[str] = "sweep.max_factor"
CONF_OMEGA_MAX: Final[str] = "response.omega_max"
CONF_RESPONSE_POINTS: Final[str] = "response.n_points"
CONF_INVERSIONS: Final[str] = "response.inversions"
CONF_OUTPUT_DIR: Final[str] = "output.directory"

# Default values (finesse 500, D = 3 GHz, matched cavity)
DEFAULT_FINESSE: Final[float] = 500.0
DEFAULT_KAPPA: Final[float] = 2.0 * math.pi / DEFAULT_FINESSE
DEFAULT_FSR: Final[float] = 3.0e9
# Recurrence 2pi/spacing = 503 us stays beyond t_max; half-span 6.4e6 rad/s.
DEFAULT_GRID_N: Final[int] = 1025
DEFAULT_GRID_SPACING: Final[float] = 1.25e4
DEFAULT_SIGMA_T: Final[float] = 2.0e-6
DEFAULT_CENTER: Final[float] = 15.0e-6
DEFAULT_AREA_FACTOR: Final[float] = 1.0
DEFAULT_DT: Final[float] = 2.0e-9
DEFAULT_T_START: Final[float] = 0.0
DEFAULT_T_END: Final[float] = 100.0e-6
DEFAULT_T_MAX: Final[float] = 450.0e-6
DEFAULT_SNAPSHOT_STRIDE: Final[int] = 0
DEFAULT_SWEEP_POINTS: Final[int] = 20
DEFAULT_SWEEP_MAX_FACTOR: Final[float] = 2.0
DEFAULT_RESPONSE_POINTS: Final[int] = 2001
DEFAULT_OMEGA_MAX_LINEWIDTHS: Final[float] = 2.0
DEFAULT_INVERSIONS: Final[tuple[float, ...]] = (-1.0, -0.5, 0.0, 0.5)
DEFAULT_OUTPUT_DIR: Final[str] = "."

# Tolerances
MATCHING_TOL: Final[float] = 1e-9
AREA_SOLVER_XTOL: Final[float] = 1e-13
AREA_RESIDUAL_TOL: Final[float] = 1e-12
QUIESCENT_RTOL: Final[float] = 1e-6
ZERO_AREA_ATOL: Final[float] = 1e-12
ZERO_AREA_RTOL: Final[float] = 1e-2
SIGN_CHANGE_RTOL: Final[float] = 1e-3

# Resolution rules for the integrator and the detuning grid
GAUSSIAN_SUPPORT_SIGMAS: Final[float] = 6.0
CAVITY_RESOLUTION: Final[float] = 0.1
DETUNING_RESOLUTION: Final[float] = 0.05
PULSE_RESOLUTION: Final[float] = 0.01
GRID_COVERAGE: Final[float] = 8.0
FINITE_CHECK_STRIDE: Final[int] = 1000
SETTLE_CHECK_STRIDE: Final[int] = 1000

# Output files
TIMESERIES_FILE: Final[str] = "timeseries.csv"
DIAGNOSTICS_FILE: Final[str] = "diagnostics.csv"
SNAPSHOTS_FILE: Final[str] = "snapshots.csv"
SWEEP_FILE: Final[str] = "sweep.csv"
RESPONSE_FILE: Final[str] = "response.csv"
GROUP_DELAY_FILE: Final[str] = "group_delay.csv"
RESPONSE_SUMMARY_FILE: Final[str] = "response_summary.csv"
AREA_CURVE_FILE: Final[str] = "area_curve.csv"

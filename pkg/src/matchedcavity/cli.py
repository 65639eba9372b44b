"""Command line scenario runner."""

from __future__ import annotations

import argparse
import logging
import math
from collections.abc import Callable, Sequence
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from .analysis import diagnose, figure2_sweep
from .area_theorem import area_curve
from .config import ScenarioConfig, load_scenario
from .const import (
    AREA_CURVE_FILE,
    DIAGNOSTICS_FILE,
    DOMAIN,
    GROUP_DELAY_FILE,
    RESPONSE_FILE,
    RESPONSE_SUMMARY_FILE,
    SNAPSHOTS_FILE,
    SWEEP_FILE,
    TIMESERIES_FILE,
)
from .exceptions import (
    IntegrationError,
    InvalidParameterError,
    MatchedCavityError,
    ScenarioConfigError,
    SweepPointError,
)
from .export import Table, header_lines, write_tables
from .linear_response import (
    dip_fwhm,
    group_delay,
    group_delay_numeric,
    group_delay_quoted,
    reflection,
    reflection_generalized,
)
from .models import cavity_linewidth
from .pulse import pi_pulse_area
from .simulator import simulate

UTC = timezone.utc  # datetime.UTC alias (3.11+)

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTEGRATION = 4

Command = Callable[[ScenarioConfig, argparse.Namespace], dict[str, Table]]


def cmd_simulate(scenario: ScenarioConfig, _: argparse.Namespace) -> dict[str, Table]:
    """Integrate the scenario pulse and tabulate fields and diagnostics."""
    config = scenario.simulation_config()
    record = simulate(config)
    diag = diagnose(record, config.params, config.grid)
    _LOGGER.info(
        "Theta_in=%.6g Theta=%.6g Theta_out=%.6g rad, quanta residual %.3e",
        diag.theta_in,
        diag.theta_cav,
        diag.theta_out,
        diag.quanta_residual,
    )

    tables = {
        TIMESERIES_FILE: Table.from_columns(
            {
                "t_s": record.times,
                "omega_in": np.real(record.omega_in.samples),
                "omega_cav_re": np.real(record.omega_cav.samples),
                "omega_cav_im": np.imag(record.omega_cav.samples),
                "omega_out": np.real(record.omega_out.samples),
            }
        ),
        DIAGNOSTICS_FILE: Table.from_columns(dict(diag.items())),
    }
    if record.snapshots:
        rows = [
            (snap.time, k, u, v, w)
            for snap in record.snapshots
            for k, (u, v, w) in enumerate(
                zip(snap.state.u, snap.state.v, snap.state.w, strict=True)
            )
        ]
        data = np.array(rows, dtype=np.float64)
        tables[SNAPSHOTS_FILE] = Table(("t_s", "detuning_index", "u", "v", "w"), data)
    return tables


def cmd_sweep_area(scenario: ScenarioConfig, args: argparse.Namespace) -> dict[str, Table]:
    """Sweep the input area and compare every point with the area theorem."""
    base = scenario.simulation_config(theta_in=pi_pulse_area(scenario.params))
    table = figure2_sweep(scenario.sweep_areas(), base, workers=args.threads)
    _LOGGER.info("Largest deviation from the area theorem: %.3e rad", table.max_deviation)
    rows = table.rows
    return {
        SWEEP_FILE: Table.from_columns(
            {
                "theta_in": [r.theta_in for r in rows],
                "theta_cav_sim": [r.theta_cav_sim for r in rows],
                "theta_cav_theory": [r.theta_cav_theory for r in rows],
                "theta_out_sim": [r.theta_out_sim for r in rows],
                "theta_out_theory": [r.theta_out_theory for r in rows],
                "sigma_out_s": [r.sigma_out for r in rows],
                "elongation": [r.elongation for r in rows],
                "quanta_residual": [r.quanta_residual for r in rows],
            }
        )
    }


def _inversion_label(w: float) -> str:
    return f"r_w{w:g}"


def cmd_response(scenario: ScenarioConfig, _: argparse.Namespace) -> dict[str, Table]:
    """Tabulate the reflection coefficients and group delays."""
    params = scenario.params
    omegas = scenario.response_omegas()
    r = reflection(omegas, params)
    columns: dict[str, ArrayLike] = {
        "omega_rad_s": omegas,
        "r_re": r.real,
        "r_im": r.imag,
        "r_abs2": np.abs(r) ** 2,
    }
    for w in scenario.inversions:
        r_w = reflection_generalized(omegas, w, params)
        columns[f"{_inversion_label(w)}_re"] = r_w.real
        columns[f"{_inversion_label(w)}_im"] = r_w.imag

    delays = {
        "w": list(scenario.inversions),
        "r_w0": [float(reflection_generalized(0.0, w, params).real) for w in scenario.inversions],
        "tg_s": [group_delay(w, params) for w in scenario.inversions],
        "tg_numeric_s": [group_delay_numeric(w, params) for w in scenario.inversions],
        "tg_quoted_s": [group_delay_quoted(w, params) for w in scenario.inversions],
    }

    try:
        fwhm = dip_fwhm(params, scenario.omega_max, scenario.response_points)
    except InvalidParameterError as err:
        _LOGGER.warning("Reflection dip width undefined: %s", err)
        fwhm = math.nan

    return {
        RESPONSE_FILE: Table.from_columns(columns),
        GROUP_DELAY_FILE: Table.from_columns(delays),
        RESPONSE_SUMMARY_FILE: Table.from_columns(
            {
                "dip_fwhm_rad_s": fwhm,
                "cavity_linewidth_rad_s": cavity_linewidth(params),
            }
        ),
    }


def cmd_area_theorem(scenario: ScenarioConfig, _: argparse.Namespace) -> dict[str, Table]:
    """Tabulate the analytic area curve on the sweep abscissae."""
    areas = scenario.sweep_areas()
    curve = area_curve(float(areas[-1]), scenario.sweep_points, scenario.params)
    return {
        AREA_CURVE_FILE: Table.from_columns(
            {
                "theta_in": [s.theta_in for s in curve],
                "theta_cav": [s.theta_cav for s in curve],
                "theta_out": [s.theta_out for s in curve],
                "branch": [s.branch for s in curve],
                "residual": [s.residual for s in curve],
            }
        )
    }


COMMANDS: dict[str, tuple[Command, str]] = {
    "simulate": (cmd_simulate, "integrate one pulse and write time series"),
    "sweep-area": (cmd_sweep_area, "sweep the input area and compare with the theorem"),
    "response": (cmd_response, "tabulate reflection coefficients and group delays"),
    "area-theorem": (cmd_area_theorem, "tabulate the analytic area curve"),
}


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with one subcommand per scenario."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        default=None,
        help="scenario file of key = value lines (defaults when omitted)",
    )
    common.add_argument(
        "--out",
        type=Path,
        default=None,
        help="output directory (overrides output.directory)",
    )
    common.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit the generation time from file headers",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker processes for sweeps",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog=DOMAIN,
        description="Strong-pulse dynamics of an impedance-matched ring cavity.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def run(args: argparse.Namespace) -> list[Path]:
    """Load the scenario, run the command and write its tables."""
    if args.threads < 1:
        raise ScenarioConfigError([f"--threads: must be at least 1, got {args.threads}"])
    scenario = load_scenario(args.config)
    command, _ = COMMANDS[args.command]
    tables = command(scenario, args)
    timestamp = None if args.no_timestamp else datetime.now(UTC)
    header = header_lines(args.command, scenario.resolved_items(), timestamp)
    return write_tables(args.out or scenario.output_dir, tables, header)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT
    )
    try:
        run(args)
    except ScenarioConfigError as err:
        for message in err.errors:
            _LOGGER.error("Invalid scenario: %s", message)
        return EXIT_CONFIG
    except OSError as err:
        _LOGGER.error("Cannot write output: %s", err)
        return EXIT_IO
    except (IntegrationError, SweepPointError) as err:
        cause = f" ({err.__cause__})" if err.__cause__ else ""
        _LOGGER.error("%s%s", err, cause)
        return EXIT_INTEGRATION
    except MatchedCavityError as err:
        _LOGGER.error("%s", err)
        return EXIT_FAILURE
    return EXIT_OK

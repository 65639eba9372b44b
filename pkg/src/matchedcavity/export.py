"""Self-describing CSV tables."""

from __future__ import annotations

import logging
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from .const import DOMAIN
from .exceptions import DimensionMismatchError
from .models import FloatArray

_LOGGER = logging.getLogger(__name__)

# 17 significant digits round-trip every float64 exactly.
_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False, slots=True)
class Table:
    """Named numeric columns of one output file."""

    columns: tuple[str, ...]
    data: FloatArray

    @classmethod
    def from_columns(cls, columns: Mapping[str, ArrayLike]) -> Table:
        """Stack equally long columns into a table."""
        arrays = [np.atleast_1d(np.asarray(col, dtype=np.float64)) for col in columns.values()]
        lengths = {arr.shape[0] for arr in arrays}
        if len(lengths) > 1:
            raise DimensionMismatchError(f"columns differ in length: {sorted(lengths)}")
        return cls(tuple(columns), np.column_stack(arrays))

    @property
    def n_rows(self) -> int:
        """Return the number of data rows."""
        return int(self.data.shape[0])


def header_lines(
    command: str,
    provenance: Sequence[tuple[str, str]],
    timestamp: datetime | None,
) -> list[str]:
    """Return the comment lines written above every table."""
    lines = [f"{DOMAIN} {command}"]
    if timestamp is not None:
        lines.append(f"generated {timestamp.isoformat(timespec='seconds')}")
    lines.extend(f"{key} = {value}" for key, value in provenance)
    return lines


def write_table(
    path: Path,
    table: Table,
    header: Sequence[str],
) -> None:
    """Write one table; the column names form the last header line."""
    text = "\n".join([*header, ",".join(table.columns)])
    np.savetxt(
        path,
        table.data,
        fmt=_FLOAT_FORMAT,
        delimiter=",",
        header=text,
        comments="# ",
        encoding="utf-8",
    )


def write_tables(
    directory: Path,
    tables: Mapping[str, Table],
    header: Sequence[str],
) -> list[Path]:
    """Write every table into directory, or none of them.

    Each file is written to a temporary name first and moved into place only
    once all of them were written. Files that already exist are kept aside
    until every move succeeded and are put back if one fails.
    """
    directory.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[Path, Path]] = []
    try:
        for name, table in tables.items():
            target = directory / name
            temporary = directory / f".{name}.tmp"
            staged.append((temporary, target))
            write_table(temporary, table, header)
    except OSError:
        _discard(temporary for temporary, _ in staged)
        raise

    backups: list[tuple[Path, Path]] = []
    moved: list[Path] = []
    try:
        for _, target in staged:
            if target.exists():
                backup = target.with_name(f".{target.name}.bak")
                os.replace(target, backup)
                backups.append((backup, target))
        for temporary, target in staged:
            os.replace(temporary, target)
            moved.append(target)
    except OSError:
        _LOGGER.error("Could not move tables into %s; restoring previous files", directory)
        _discard(moved)
        _discard(temporary for temporary, _ in staged)
        for backup, target in backups:
            os.replace(backup, target)
        raise

    _discard(backup for backup, _ in backups)
    for target in moved:
        _LOGGER.info("Wrote %s", target)
    return moved


def _discard(paths: Iterable[Path]) -> None:
    for path in paths:
        path.unlink(missing_ok=True)

"""service/report_writer.py: CSV output of reports and grids."""

import csv
import os
from collections.abc import Iterable

from pydantic import BaseModel

from ..logger import get_logger
from ..schema.exceptions import ToolkitError
from ..schema.path_types import GridObservations
from ..schema.report_types import ROW_FIELDS, SUMMARY_FIELDS, ExperimentReport
from ..simulation.workload import grid_to_rows

GRID_FIELDS = ("i", "t", "v")


def format_value(value) -> str:
    """Floats at 17 significant digits, None as the empty string."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def companion_path(out: str, suffix: str) -> str:
    """`runs/a.csv` -> `runs/a.<suffix>.csv`."""
    stem, ext = os.path.splitext(out)
    return f"{stem}.{suffix}{ext or '.csv'}"


def _model_rows(models: Iterable[BaseModel], fields: tuple[str, ...]) -> Iterable[dict[str, str]]:
    for model in models:
        values = model.model_dump()
        yield {field: format_value(values[field]) for field in fields}


def _write_csv(path: str, fields: tuple[str, ...], rows: Iterable[dict[str, str]]) -> None:
    directory = os.path.dirname(path)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.DictWriter(file, fieldnames=fields, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        get_logger().error(f"Error writing {path}: {e}.")
        raise ToolkitError(f"Error writing {path}: {e}") from e


def write_report(report: ExperimentReport, out: str) -> list[str]:
    """Writes the rows to `out`, the summary block and the metadata next to it.

    Returns:
        The paths written, rows first.

    Raises:
        - ToolkitError: If a file cannot be written.
    """
    log = get_logger()

    written = [out]
    _write_csv(out, ROW_FIELDS, _model_rows(report.rows, ROW_FIELDS))
    if report.summary:
        summary_path = companion_path(out, "summary")
        _write_csv(summary_path, SUMMARY_FIELDS, _model_rows(report.summary, SUMMARY_FIELDS))
        written.append(summary_path)
    meta_path = companion_path(out, "meta")
    _write_csv(meta_path, ("key", "value"), ({"key": k, "value": v} for k, v in report.metadata.items()))
    written.append(meta_path)

    log.info(f"Wrote {len(report.rows)} rows and {len(report.summary)} summary entries to {', '.join(written)}.")
    return written


def write_grid(grid: GridObservations, metadata: dict[str, str], out: str) -> list[str]:
    """Writes the grid observations `i,t,v` to `out` and the metadata next to it.

    Raises:
        - ToolkitError: If a file cannot be written.
    """
    log = get_logger()

    _write_csv(out, GRID_FIELDS, grid_to_rows(grid))
    meta_path = companion_path(out, "meta")
    _write_csv(meta_path, ("key", "value"), ({"key": k, "value": v} for k, v in metadata.items()))

    log.info(f"Wrote {grid.m + 1} grid points to {out}.")
    return [out, meta_path]

"""CSV output schemas shared by the CLI and the tests.

Every CSV the tool emits has a fixed header registered here; the checker
validates header and row shapes so downstream plotting scripts can rely on
them.  Floats are written with ``repr`` (shortest round-trip form), which
keeps reruns byte-identical.  Unattained recall levels leave their numeric
cells empty.
"""

import csv

import numpy as np

__all__ = ["SCHEMAS", "write_csv", "check_csv"]

SCHEMAS = {
    # cosine bound envelope
    "bounds": ("cosine", "lower_bound", "upper_bound"),
    # rho curves: threshold column then one column per method label
    "rho": ("s0",),
    # balance histogram over all query x train pairs
    "z_histogram": ("bin_lo", "bin_hi", "count"),
    # median similarity per rank
    "rank_profile": ("rank", "median_cosine", "median_resemblance",
                     "lower_bound", "upper_bound"),
    # resemblance of the two rankings' top-T sets
    "ranklist_overlap": ("depth", "mean_overlap"),
    # full (K, L) sweep grid
    "sweep_grid": ("k", "l", "recall", "fraction"),
    # minimum fraction retrieved per recall level
    "recall_levels": ("recall_level", "min_fraction", "best_k", "best_l"),
    # index query results
    "candidates": ("query_id", "candidate_id"),
}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, schema: str, rows, extra_columns: tuple[str, ...] = ()) -> None:
    """Write rows under a registered schema; extra_columns extends the
    header for schemas with variable method columns (rho)."""
    header = SCHEMAS[schema] + tuple(extra_columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(
                    f"{schema} row has {len(row)} cells, header has {len(header)}"
                )
            writer.writerow([_format_cell(v) for v in row])


def check_csv(path, schema: str, allow_extra_columns: bool = False) -> int:
    """Validate a file against its schema; returns the data row count."""
    base = SCHEMAS[schema]
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if allow_extra_columns:
            if header[:len(base)] != base:
                raise ValueError(f"{path}: header {header} does not extend {base}")
        elif header != base:
            raise ValueError(f"{path}: header {header} != {base}")
        count = 0
        for row in reader:
            if len(row) != len(header):
                raise ValueError(f"{path}: row {count + 2} has {len(row)} cells")
            count += 1
    return count

"""Input side of the figures: the results CSV and the curves JSON."""

import csv
import json

CSV_COLUMNS = [
    "instance_id",
    "seed",
    "algorithm",
    "env",
    "status",
    "nodes_total",
    "nodes_high_level",
    "solution_len",
    "subgoals_on_path",
    "wall_ms",
    "dead_end_fraction",
]

STATUSES = {"solved", "budget_exhausted", "frontier_empty", "step_limit"}


class SchemaMismatch(ValueError):
    def __init__(self, column, reason):
        super().__init__(f"column `{column}`: {reason}")
        self.column = column


def read_results(path):
    """Rows of a results CSV, with the counters as ints."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for i, want in enumerate(CSV_COLUMNS):
            got = header[i] if i < len(header) else None
            if got != want:
                raise SchemaMismatch(want, f"expected at position {i}, found {got!r}")
        if len(header) > len(CSV_COLUMNS):
            raise SchemaMismatch(header[len(CSV_COLUMNS)], "unexpected column")
        rows = []
        for row in reader:
            if row["status"] not in STATUSES:
                raise SchemaMismatch("status", f"unknown value {row['status']!r}")
            for col in ("nodes_total", "nodes_high_level", "solution_len"):
                try:
                    row[col] = int(row[col])
                except ValueError:
                    raise SchemaMismatch(col, f"not an integer: {row[col]!r}") from None
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty result set")
    return rows


def read_curves(path):
    with open(path) as f:
        curves = json.load(f)["curves"]
    if not curves:
        raise ValueError(f"{path}: no curves")
    return curves

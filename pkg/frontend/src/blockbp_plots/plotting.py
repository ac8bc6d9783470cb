"""Render logical-error-rate curves from harness result CSVs.

Two figure layouts: P_L against the physical noise rate (one curve per
decoder configuration at fixed d is obtained with a filter), and P_L
against the code distance.  Series are keyed by (decoder, k, chi); error
bars show +-1 standard error straight from the CSV.  Rendering is
deterministic: fixed style, no timestamps, stripped PNG metadata.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = ["decoder", "d", "k", "chi", "epsilon", "p_l", "stderr"]

MODES = {
    "pl-vs-epsilon": ("epsilon", "physical error rate"),
    "pl-vs-d": ("d", "code distance d"),
}


class SchemaError(ValueError):
    """The CSV lacks required columns."""


class EmptySelectionError(ValueError):
    """No rows survive the filters."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    mode: str
    out_path: str
    filters: tuple[tuple[str, str], ...] = ()
    log_y: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {sorted(MODES)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _load_rows(paths: tuple[str, ...]) -> list[dict]:
    rows: list[dict] = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise SchemaError(
                    f"{path}: missing required columns: {', '.join(missing)}"
                )
            rows.extend(reader)
    return rows


def _matches(row: dict, column: str, wanted: str) -> bool:
    value = row.get(column, "")
    if value == wanted:
        return True
    try:
        return float(value) == float(wanted)
    except (TypeError, ValueError):
        return False


def _apply_filters(rows: list[dict], filters) -> list[dict]:
    for column, wanted in filters:
        rows = [row for row in rows if _matches(row, column, wanted)]
    return rows


def render(spec: PlotSpec) -> None:
    """Write one figure for the spec; raises on schema or empty selection."""
    rows = _apply_filters(_load_rows(spec.inputs), spec.filters)
    if not rows:
        raise EmptySelectionError("no CSV rows match the requested filters")
    x_col, x_label = MODES[spec.mode]

    series: dict[tuple, list[tuple[float, float, float]]] = {}
    for row in rows:
        key = (row["decoder"], row["k"], row["chi"])
        point = (float(row[x_col]), float(row["p_l"]), float(row["stderr"]))
        series.setdefault(key, []).append(point)

    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=130)
    markers = ["o", "s", "^", "v", "D", "p", "*", "X"]
    for i, (key, points) in enumerate(sorted(series.items())):
        decoder, k, chi = key
        points.sort()
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        errs = [p[2] for p in points]
        ax.errorbar(
            xs, ys, yerr=errs,
            marker=markers[i % len(markers)], markersize=4.5,
            linewidth=1.2, capsize=2.5,
            label=f"{decoder}[{k},{chi}]",
        )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel("logical error rate $P_L$")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    # metadata stripped so identical inputs give identical bytes
    fig.savefig(spec.out_path, metadata={"Software": None})
    plt.close(fig)

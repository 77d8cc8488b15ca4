"""Result files: one record family per file, CSV or JSON lines.

The column lists below are the file contract. Numbers are written with 9
significant digits, booleans as true/false and enums as their tokens, so
two runs with the same inputs produce byte-identical files.
"""

import json
import logging
import os
from dataclasses import dataclass
from enum import Enum
from functools import singledispatch
from pathlib import Path

import pandas as pd

from leontief.aggregate import Break, BreakFrequency, CurvePoint, ProfilePoint, TFPRecord
from leontief.config import SIGNIFICANT_DIGITS
from leontief.core import Establishment, eval_leontief
from leontief.dynamics import MarginalProductivity, TraceRow
from leontief.errors import OutputError
from leontief.fit import CobbDouglasFit, QuadraticFit

logger = logging.getLogger("leontief")

FAMILY_COLUMNS: dict[str, list[str]] = {
    "establishments": ["id", "a", "b", "k", "l", "y", "regime"],
    "aggregates": ["scenario", "K", "L", "Y", "alpha", "Z"],
    "traces": ["moment", "k", "l", "mp_k", "mp_l", "gap_k", "gap_l", "action", "confirmed"],
    "fits": ["scenario", "model", "alpha", "Z", "r_squared", "n_obs",
             "c0", "c1", "c2", "slope_min", "slope_max"],
    "curves": ["index", "x", "y"],
    "profiles": ["index", "id", "y", "regime"],
    "breaks": ["index", "before", "after"],
    "frequencies": ["scenario", "runs", "mean_breaks", "share_with_break"],
    "marginals": ["label", "factor", "increment", "y_now", "y_expected", "value"],
}

FORMATS = ("csv", "jsonl")


@dataclass(frozen=True)
class LabeledMarginal:
    label: str
    mp: MarginalProductivity


# ─── Record → row ────────────────────────────────────────────────────────────


@singledispatch
def to_row(record) -> tuple[str, dict]:
    """Return (family, {column: value}) for one record."""
    raise OutputError(f"no result family for {type(record).__name__}")


@to_row.register
def _(record: Establishment):
    rec = eval_leontief(record)
    return "establishments", {"id": record.id, "a": record.a, "b": record.b, "k": record.k,
                              "l": record.l, "y": rec.y, "regime": rec.regime}


@to_row.register
def _(record: TFPRecord):
    src = record.source
    return "aggregates", {"scenario": src.label, "K": src.K, "L": src.L, "Y": src.Y,
                          "alpha": record.alpha, "Z": record.Z}


@to_row.register
def _(record: TraceRow):
    return "traces", {"moment": record.moment, "k": record.k, "l": record.l,
                      "mp_k": record.mp_k, "mp_l": record.mp_l, "gap_k": record.gap_k,
                      "gap_l": record.gap_l, "action": record.action,
                      "confirmed": record.confirmed}


@to_row.register
def _(record: CobbDouglasFit):
    return "fits", {"scenario": record.label, "model": "CobbDouglas", "alpha": record.alpha,
                    "Z": record.Z, "r_squared": record.r_squared, "n_obs": record.n_obs}


@to_row.register
def _(record: QuadraticFit):
    return "fits", {"scenario": record.label, "model": "Quadratic",
                    "r_squared": record.r_squared, "n_obs": record.n_obs,
                    "c0": record.c0, "c1": record.c1, "c2": record.c2,
                    "slope_min": record.slope_range[0], "slope_max": record.slope_range[1]}


@to_row.register
def _(record: CurvePoint):
    return "curves", {"index": record.index, "x": record.x, "y": record.y}


@to_row.register
def _(record: ProfilePoint):
    return "profiles", {"index": record.index, "id": record.id, "y": record.y,
                        "regime": record.regime}


@to_row.register
def _(record: Break):
    return "breaks", {"index": record.index, "before": record.before, "after": record.after}


@to_row.register
def _(record: BreakFrequency):
    return "frequencies", {"scenario": record.label, "runs": record.runs,
                           "mean_breaks": record.mean_breaks,
                           "share_with_break": record.share_with_break}


@to_row.register
def _(record: LabeledMarginal):
    mp = record.mp
    return "marginals", {"label": record.label, "factor": mp.factor, "increment": mp.increment,
                         "y_now": mp.output_now, "y_expected": mp.output_expected,
                         "value": mp.value}


# ─── Cell formatting ─────────────────────────────────────────────────────────


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def _json_cell(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not isinstance(value, bool):
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return value


def _rows(records: list, family: str | None) -> tuple[str, list[dict]]:
    rows = []
    for record in records:
        rec_family, row = to_row(record)
        if family is None:
            family = rec_family
        elif rec_family != family:
            raise OutputError(f"cannot mix {rec_family} records into a {family} file")
        rows.append(row)
    if family is None:
        raise OutputError("empty record list needs an explicit family")
    if family not in FAMILY_COLUMNS:
        raise OutputError(f"unknown result family {family!r}")
    return family, rows


def _render(family: str, rows: list[dict], fmt: str) -> str:
    columns = FAMILY_COLUMNS[family]
    if fmt == "csv":
        frame = pd.DataFrame([[_csv_cell(row.get(c)) for c in columns] for row in rows],
                             columns=columns, dtype=str)
        return frame.to_csv(index=False, lineterminator="\n")
    return "".join(json.dumps({c: _json_cell(row.get(c)) for c in columns}) + "\n"
                   for row in rows)


# ─── Public API ──────────────────────────────────────────────────────────────


def write_results(records: list, fmt: str, path: str | Path, *, family: str | None = None) -> Path:
    """Write one family of records to `path`, replacing any previous file."""
    if fmt not in FORMATS:
        raise OutputError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    family, rows = _rows(list(records), family)
    text = _render(family, rows, fmt)

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}") from e
    logger.info(f"Wrote {len(rows)} {family} row(s) to {path}")
    return path


def read_results(path: str | Path) -> pd.DataFrame:
    """Load a result file back; blank CSV cells stay empty strings."""
    path = Path(path)
    try:
        if path.suffix == ".jsonl":
            if path.stat().st_size == 0:
                return pd.DataFrame()
            return pd.read_json(path, lines=True)
        return pd.read_csv(path, keep_default_na=False)
    except (OSError, ValueError) as e:
        raise OutputError(f"cannot read {path}: {e}") from e

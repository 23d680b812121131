"""Loaders and validators for the harness file formats.

Every loader checks shape before any figure work starts and raises
SchemaError naming the first missing column or key, so a format drift
surfaces as a one-line diagnostic instead of a matplotlib traceback.
Loading is read-only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path


class SchemaError(Exception):
    """Input file does not match the documented schema."""


# trace CSV: t,x0,y0[,z0],step_x,step_y,gs_primal,gs_dual,os,psi with
# blank stationarity cells on rows the run did not audit
TRACE_COLUMNS = ("t", "gs_primal", "gs_dual", "os")
LYAPUNOV_COLUMNS = ("t", "psi")
REPORT_KEYS = ("slope", "intercept", "r2", "predicted_slope", "points")
POINT_KEYS = ("eps", "first_hit_T", "censored")
SPECTRAL_KEYS = ("points", "worst_rel_deviation", "all_ok")
SPECTRAL_POINT_KEYS = ("closed_value", "rel_deviation")


@dataclass
class Trace:
    label: str
    columns: dict[str, list[float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.columns.get("t", ()))


@dataclass
class SweepReport:
    label: str
    slope: float
    intercept: float
    r2: float
    predicted_slope: float | None
    eps: list[float]
    first_hit: list[int]

    def sorted_points(self) -> tuple[list[float], list[int]]:
        order = sorted(range(len(self.eps)), key=lambda i: self.eps[i])
        return [self.eps[i] for i in order], [self.first_hit[i] for i in order]


@dataclass
class SpectralReport:
    label: str
    closed_values: list[float]
    rel_deviations: list[float]
    worst: float
    all_ok: bool


def _label(path: Path) -> str:
    return path.stem


def load_trace(path: Path, required: tuple[str, ...]) -> Trace:
    """Read a trace CSV keeping rows where every required cell is set."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path.name}: trace CSV missing column: {col}")
        rows = list(reader)
    out = Trace(label=_label(path), columns={col: [] for col in required})
    for row in rows:
        cells = [row.get(col, "") for col in required]
        if any(cell in ("", None) for cell in cells):
            continue  # unaudited row
        try:
            values = [float(cell) for cell in cells]
        except ValueError as exc:
            raise SchemaError(f"{path.name}: non-numeric cell: {exc}") from exc
        for col, val in zip(required, values):
            out.columns[col].append(val)
    return out


def load_report(path: Path) -> SweepReport:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path.name}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path.name}: sweep report must be a JSON object")
    for key in REPORT_KEYS:
        if key not in doc:
            raise SchemaError(f"{path.name}: sweep report missing key: {key}")
    eps: list[float] = []
    hits: list[int] = []
    for i, point in enumerate(doc["points"]):
        for key in POINT_KEYS:
            if key not in point:
                raise SchemaError(
                    f"{path.name}: sweep point {i} missing key: {key}"
                )
        if point["censored"]:
            continue  # the fit excluded it; the figure does too
        eps.append(float(point["eps"]))
        hits.append(int(point["first_hit_T"]))
    return SweepReport(
        label=_label(path),
        slope=float(doc["slope"]),
        intercept=float(doc["intercept"]),
        r2=float(doc["r2"]),
        predicted_slope=(
            None if doc["predicted_slope"] is None
            else float(doc["predicted_slope"])
        ),
        eps=eps,
        first_hit=hits,
    )


def load_spectral(path: Path) -> SpectralReport:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path.name}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path.name}: spectral report must be a JSON object")
    for key in SPECTRAL_KEYS:
        if key not in doc:
            raise SchemaError(f"{path.name}: spectral report missing key: {key}")
    closed: list[float] = []
    devs: list[float] = []
    for i, point in enumerate(doc["points"]):
        for key in SPECTRAL_POINT_KEYS:
            if key not in point:
                raise SchemaError(
                    f"{path.name}: spectral point {i} missing key: {key}"
                )
        closed.append(float(point["closed_value"]))
        devs.append(float(point["rel_deviation"]))
    return SpectralReport(
        label=_label(path),
        closed_values=closed,
        rel_deviations=devs,
        worst=float(doc["worst_rel_deviation"]),
        all_ok=bool(doc["all_ok"]),
    )

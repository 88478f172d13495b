"""Solve reports: canonical JSON serialization and CSV exports for plotting.

Wall-clock timings live only on the in-memory object (and the CLI's console
output); the serialized report is fully deterministic so that identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .instances import SCHEMA_VERSION, dump_json


@dataclass
class SolveReport:
    """Everything one solve run produced, plus diagnostics."""

    method: str | None
    plan: dict | None
    schedule: list[list[int]]
    control: np.ndarray | None
    verified: bool
    residuals: list[float]
    occupancy_histogram: list[list[int]]
    state_norms: list[list[float]] | None
    warnings: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def report_to_dict(rep: SolveReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": rep.method,
        "plan": rep.plan,
        "schedule": rep.schedule,
        "control": None if rep.control is None else np.asarray(rep.control).tolist(),
        "verified": rep.verified,
        "residuals": [float(r) for r in rep.residuals],
        "occupancy_histogram": rep.occupancy_histogram,
        "state_norms": rep.state_norms,
        "warnings": rep.warnings,
        "diagnostics": rep.diagnostics,
    }


def report_from_dict(data: dict) -> SolveReport:
    try:
        if data["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {data['schema_version']}")
        control = data["control"]
        return SolveReport(
            method=data["method"],
            plan=data["plan"],
            schedule=[list(map(int, slot)) for slot in data["schedule"]],
            control=None if control is None else np.asarray(control, dtype=float),
            verified=bool(data["verified"]),
            residuals=[float(r) for r in data["residuals"]],
            occupancy_histogram=[list(map(int, row)) for row in data["occupancy_histogram"]],
            state_norms=data["state_norms"],
            warnings=list(data.get("warnings", [])),
            diagnostics=list(data.get("diagnostics", [])),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed report file: {exc}") from exc


def write_report(path, rep: SolveReport) -> None:
    Path(path).write_text(dump_json(report_to_dict(rep)))


def read_report(path) -> SolveReport:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return report_from_dict(data)


def export_plots(report_path, out_dir) -> list[Path]:
    """Write control.csv, schedule.csv, trajectories.csv next to any plot tool.

    Plant columns are 1-based; time columns are 0-based steps. schedule.csv
    has one row per active slot member, so empty slots and always-silent
    plants simply contribute no rows.
    """
    rep = read_report(report_path)
    if rep.control is None:
        raise SchemaError("report has no control matrix to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    control = np.asarray(rep.control)
    n, horizon = control.shape

    control_path = out / "control.csv"
    with control_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "plant", "u"])
        for t in range(horizon):
            for i in range(n):
                w.writerow([t, i + 1, repr(float(control[i, t]))])

    schedule_path = out / "schedule.csv"
    with schedule_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "plant"])
        for t, slot in enumerate(rep.schedule):
            for plant in sorted(slot):
                w.writerow([t, plant])

    traj_path = out / "trajectories.csv"
    if rep.state_norms is None:
        raise SchemaError("report has no state norms to export")
    with traj_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "plant", "state_norm_2"])
        for i, series in enumerate(rep.state_norms):
            for t, norm in enumerate(series):
                w.writerow([t, i + 1, repr(float(norm))])

    return [control_path, schedule_path, traj_path]

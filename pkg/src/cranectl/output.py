"""
Project: cranectl
Module: cranectl
Created Date: 18 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import io
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

from cranectl.core import RECORD_FIELDS, ComparisonReport, RunResult, Scenario, SweepRow
from cranectl.errors import SimulationError
from cranectl.helpers import NUMBER_FORMAT, write_atomic
from cranectl.metrics import METRIC_NAMES, RESIDUAL_WINDOW, SETTLING_BAND, SETTLING_FLOOR

RECORDS_FILE = "records.csv"
METRICS_FILE = "metrics.json"
LOG_FILE = "run.log"
LOG_FORMAT = "%(levelname)s: %(message)s"


def records_csv(result: RunResult, decimate: int = 1) -> str:
    """Serializes every `decimate`-th record (always starting at t = 0) with 9 significant digits."""
    table = result.table.copy()
    table[:, RECORD_FIELDS.index("v_dot")] = result.reported_v_dot()
    buf = io.StringIO()
    np.savetxt(buf, table[::decimate], fmt=NUMBER_FORMAT, delimiter=",", header=",".join(RECORD_FIELDS), comments="")
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _header(scenario: Scenario) -> dict:
    return {
        "label": scenario.label,
        "controller": scenario.controller_kind.kind,
        "x_d": scenario.x_d,
        "dt": scenario.integrator.dt,
        "t_end": scenario.integrator.t_end,
        "settling_band": SETTLING_BAND,
        "settling_floor_m": SETTLING_FLOOR,
        "residual_window_s": RESIDUAL_WINDOW,
    }


class OutputBundle:
    """The files written for one command: records.csv, metrics.json and run.log, plus comparison and sweep tables.

    Every file is written to a temporary name first and renamed into place.
    """
    
    def __init__(self, out_dir: Path | str):
        self.out_dir = Path(out_dir)
    
    def subdir(self, name: str) -> "OutputBundle":
        return OutputBundle(self.out_dir / name)
    
    @contextmanager
    def capture_log(self):
        """Copies every log record emitted inside the block into run.log."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{LOG_FILE}.", dir=self.out_dir)
        os.close(fd)
        handler = logging.FileHandler(tmp, mode="w", encoding="utf-8")
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root = logging.getLogger()
        root.addHandler(handler)
        try:
            yield self
        finally:
            root.removeHandler(handler)
            handler.close()
            os.replace(tmp, self.out_dir / LOG_FILE)
    
    def write_run(self, result: RunResult, decimate: int = 1):
        write_atomic(self.out_dir / RECORDS_FILE, records_csv(result, decimate))
        metrics = {
            "status": "ok",
            **_header(result.scenario),
            "metrics": result.metrics.to_dict(),
            "lyapunov": result.lyapunov.to_dict() if result.lyapunov else None,
            "records": len(result.table[::decimate]),
        }
        write_atomic(self.out_dir / METRICS_FILE, _dump(metrics))
    
    def write_failure(self, err: SimulationError, scenario: Scenario, decimate: int = 1):
        """Keeps whatever was recorded before the run stopped and marks metrics.json as failed."""
        partial = err.partial
        if partial is not None:
            write_atomic(self.out_dir / RECORDS_FILE, records_csv(partial, decimate))
        failure = {
            "status": "failed",
            **_header(scenario),
            "error": f"{type(err).__name__}: {err}",
            "t": err.t,
            "metrics": partial.metrics.to_dict() if partial is not None else None,
        }
        write_atomic(self.out_dir / METRICS_FILE, _dump(failure))
    
    def write_comparison(self, report: ComparisonReport):
        write_atomic(self.out_dir / "comparison.json", _dump(report.to_dict()))
        write_atomic(self.out_dir / "comparison.txt", comparison_text(report))
    
    def write_sweep(self, rows: list[SweepRow]):
        write_atomic(self.out_dir / "sweep.csv", sweep_csv(rows))


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, (int, np.integer)):
        return str(value)
    return f"{value:.4g}"


def comparison_text(report: ComparisonReport) -> str:
    width = max(12, *(len(label) for label in report.labels)) + 2
    lines = [
        f"# reference: {report.labels[0]}; settling band {SETTLING_BAND:.0%} of x_d (at least {SETTLING_FLOOR * 1e3:g} mm); residual swing over the final {RESIDUAL_WINDOW:g} s; angles in deg",
        "# the pd_baseline controller is a plain PD substitute for a published anti-sway law",
        "metric".ljust(20) + "".join(label.rjust(width) for label in report.labels) + "  winner",
    ]
    for name in METRIC_NAMES:
        values = "".join(_cell(getattr(m, name)).rjust(width) for m in report.metrics)
        lines.append(name.ljust(20) + values + f"  {report.winners[name] or 'tie'}")
    lines.append("")
    lines.append("delta vs reference")
    for name in METRIC_NAMES:
        lines.append(name.ljust(20) + "".join(_cell(d[name]).rjust(width) for d in report.deltas))
    return "\n".join(lines) + "\n"


SWEEP_FIELDS = ("axis", "value", "status", *METRIC_NAMES, "v_dot_max", "min_kp", "min_kd", "min_kl", "error")


def sweep_frame(rows: list[SweepRow]) -> pd.DataFrame:
    """One row per sweep point. Cells a failed point has no value for are left empty."""
    records = []
    for row in rows:
        record = {"axis": row.axis, "value": row.value, "status": "ok" if row.ok else "failed", "error": row.error}
        if row.metrics is not None:
            record.update(row.metrics.to_dict())
        if row.lyapunov is not None:
            record["v_dot_max"] = row.lyapunov.v_dot_max
        if row.min_gains is not None:
            record.update(min_kp=row.min_gains.kp, min_kd=row.min_gains.kd, min_kl=row.min_gains.kl)
        records.append(record)
    return pd.DataFrame.from_records(records, columns=SWEEP_FIELDS)


def sweep_csv(rows: list[SweepRow]) -> str:
    return sweep_frame(rows).to_csv(index=False, float_format=NUMBER_FORMAT, lineterminator="\n")

"""Byte-stable CSV writers and the run manifest."""
from __future__ import annotations

import datetime as _dt
import hashlib
import io
import json
import math
import os
import shutil
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .dynamics import body_points
from .model import ArticulatedModel

TRIALS_COLUMNS = (
    "trial_id", "tip_mass_fraction", "commanded_speed_mps", "measured_impact_speed_mps",
    "lateral_offset_m", "approach_angle_rad", "outcome", "wrap_angle_left_rad",
    "wrap_angle_right_rad", "settle_time_s", "settled", "hold_capacity_N", "holds",
)
SWEEP_COLUMNS = (
    "tip_mass_fraction", "n_trials", "successes", "success_rate", "ci_lo", "ci_hi",
    "min_speed_nominal_mps", "min_speed_empirical_mps", "overlap_share", "non_monotone_flag",
)
SEARCH_COLUMNS = (
    "tip_mass_fraction", "v_lo_mps", "v_hi_mps", "tol_mps", "min_speed_nominal_mps",
    "non_monotone_flag", "evaluations",
)


def fmt(x) -> str:
    """Decimal text with 9 significant digits; never scientific notation."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    s = np.format_float_positional(x, precision=9, unique=False, fractional=False, trim="-")
    return s


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def trial_row(trial_id: int, fraction: float, result) -> list:
    c = result.conditions
    return [trial_id, fraction, c.impact_speed, result.impact_speed, c.lateral_offset,
            c.approach_angle, result.outcome.value, result.wrap_angle_left,
            result.wrap_angle_right, result.settle_time, result.settled,
            result.hold_capacity, result.holds]


def trials_csv(entries: Iterable) -> str:
    """``entries`` are ``(trial_id, tip_mass_fraction, TrialResult)`` triples."""
    return csv_text(TRIALS_COLUMNS, (trial_row(i, f, r) for i, f, r in entries))


def sweep_csv(rows) -> str:
    return csv_text(SWEEP_COLUMNS, (
        [r.tip_mass_fraction, r.n_trials, r.successes, r.success_rate, r.ci_lo, r.ci_hi,
         r.min_speed_nominal, r.min_speed_empirical, r.overlap_share, r.flag]
        for r in rows))


def search_csv(fraction: float, bracket, tol: float, search) -> str:
    return csv_text(SEARCH_COLUMNS, [[fraction, bracket[0], bracket[1], tol, search.speed,
                                      "non_monotone" if search.non_monotone else "ok",
                                      search.evaluations]])


def trajectory_columns(model: ArticulatedModel) -> List[str]:
    n = model.n_segments
    cols = ["trial_id", "tip_mass_fraction", "t_s", "fuselage_x_m", "fuselage_y_m", "heading_rad"]
    for side in ("left", "right"):
        for b in range(1, n + 1):
            cols.append(f"phi_{side}_{b}_rad")
    return cols


def trajectory_rows(model: ArticulatedModel, trial_id: int, fraction: float,
                    traj: np.ndarray) -> List[list]:
    """Rows of fuselage pose plus fold angles; welded joints read 0."""
    rows = []
    for rec in traj:
        t, q = rec[0], rec[1:]
        fus = body_points(model, q)[0]
        phis = [q[k] if k >= 0 else 0.0 for k in model.qindex[1:]]
        rows.append([trial_id, fraction, t, fus[0], fus[1], q[2], *phis])
    return rows


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_outputs(out_dir, files: Dict[str, str], manifest: Dict) -> Dict:
    """Write every file, then the manifest, into ``out_dir``.

    Files are staged in a sibling temporary directory and moved in only
    once all of them are written, so a failure leaves no partial outputs.
    """
    out = Path(out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["files"] = {name: sha256_text(text) for name, text in sorted(files.items())}
    stage = Path(tempfile.mkdtemp(prefix=".wingwrap-", dir=out.parent))
    try:
        for name, text in files.items():
            (stage / name).write_text(text, newline="")
        (stage / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        out.mkdir(exist_ok=True)
        for p in stage.iterdir():
            os.replace(p, out / p.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return manifest


def base_manifest(command: str, config_hash: str, version: str, master_seed: int,
                  timestamp: Optional[str] = None) -> Dict:
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    return {"command": command, "config_hash": config_hash, "version": version,
            "master_seed": master_seed, "timestamp": timestamp}

"""CSV / JSON contracts between pipeline stages.

Floats are written with ``repr`` so every value round-trips exactly.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Sequence

import numpy as np

from .errors import DataError
from .kinematics import FIELDS, KinematicSeries, ShotEvent
from .tracker import TrackPoint, TrackStatus

TRACK_COLUMNS = ("frame_idx", "t_sec", "x_px", "y_px", "score", "status")
METRICS_COLUMNS = ("frame_idx", "t_sec", "dx", "dy", "r", "vx", "vy", "speed", "ax", "ay", "amag",
                   "acc_w", "prec_w", "valid", "shot_flag")


def _f(v: float) -> str:
    return repr(float(v))


def _read(path, required: Sequence[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def _parse(path, line: int, column: str, raw: str, kind=float):
    try:
        v = kind(raw)
    except (TypeError, ValueError):
        raise DataError(f"{path}:{line}: column {column}: cannot parse {raw!r}") from None
    if kind is float and not math.isfinite(v):
        raise DataError(f"{path}:{line}: column {column}: non-finite value {raw!r}")
    return v


def write_track(path, track: Sequence[TrackPoint], fps: float) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACK_COLUMNS)
        for p in track:
            w.writerow([p.frame_index, _f(p.frame_index / fps), _f(p.x), _f(p.y), _f(p.score), p.status.value])


def read_track(path) -> list[TrackPoint]:
    rows = _read(path, TRACK_COLUMNS)
    out = []
    for k, r in enumerate(rows):
        line = k + 2
        try:
            status = TrackStatus(r["status"])
        except ValueError:
            raise DataError(f"{path}:{line}: column status: unknown value {r['status']!r}") from None
        out.append(TrackPoint(
            _parse(path, line, "frame_idx", r["frame_idx"], int),
            (_parse(path, line, "x_px", r["x_px"]), _parse(path, line, "y_px", r["y_px"])),
            _parse(path, line, "score", r["score"]),
            status,
        ))
    for k in range(1, len(out)):
        if out[k].frame_index <= out[k - 1].frame_index:
            raise DataError(f"{path}:{k + 2}: frame_idx must increase")
    return out


def write_metrics(path, series: KinematicSeries, shot_flag=None) -> None:
    c = series.columns
    flags = np.zeros(len(series), dtype=bool) if shot_flag is None else np.asarray(shot_flag, dtype=bool)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_COLUMNS)
        for i in range(len(series)):
            row = [int(c["frame_index"][i])] + [_f(c[name][i]) for name in FIELDS[1:-1]]
            w.writerow(row + [int(c["valid"][i]), int(flags[i])])


def read_metrics(path, fps: float, window_s: float = 1.0) -> tuple[KinematicSeries, np.ndarray]:
    """Series plus the per-row shot flag column."""
    rows = _read(path, METRICS_COLUMNS)
    cols: dict[str, list] = {name: [] for name in FIELDS}
    flags = []
    for k, r in enumerate(rows):
        line = k + 2
        cols["frame_index"].append(_parse(path, line, "frame_idx", r["frame_idx"], int))
        cols["t"].append(_parse(path, line, "t_sec", r["t_sec"]))
        for name in FIELDS[2:-1]:
            cols[name].append(_parse(path, line, name, r[name]))
        cols["valid"].append(_parse(path, line, "valid", r["valid"], int) != 0)
        flags.append(_parse(path, line, "shot_flag", r["shot_flag"], int) != 0)
    series = KinematicSeries({k: np.array(v) for k, v in cols.items()}, fps, window_s)
    return series, np.array(flags, dtype=bool)


def shots_to_json(shots: Sequence[ShotEvent]) -> str:
    doc = [{"frame_index": ev.frame_index, "t": ev.t, "peak_amag": ev.peak_amag} for ev in shots]
    return json.dumps(doc, indent=2) + "\n"


def write_shots(path, shots: Sequence[ShotEvent]) -> None:
    with open(path, "w") as fh:
        fh.write(shots_to_json(shots))


def read_shots(path) -> list[ShotEvent]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise DataError(f"{path}: expected a JSON list of shot events")
    try:
        return [ShotEvent(int(d["frame_index"]), float(d["t"]), float(d.get("peak_amag", 0.0))) for d in doc]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed shot event ({exc})") from None


def shots_from_flags(series: KinematicSeries, flags) -> list[ShotEvent]:
    return [ShotEvent(int(series.frame_index[i]), float(series.t[i]), float(series.amag[i]))
            for i in np.flatnonzero(np.asarray(flags, dtype=bool))]

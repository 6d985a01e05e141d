"""Aim kinematics derived from a marker track.

Offsets are target center minus aimpoint, in pixels (or mrad when
``px_per_mrad`` is configured). Derivatives are causal backward differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, EmptyInputError, InputError
from .frame_io import ClipHeader
from .tracker import TrackPoint, TrackStatus

MAD_SCALE = 1.4826


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class MetricsConfig:
    window_s: float = 1.0
    smooth_alpha: float | None = None
    recoil_threshold: float | None = None   # None selects the MAD-based automatic threshold
    recoil_mad_k: float = 8.0
    refractory_s: float = 0.5
    aimpoint: tuple[float, float] | None = None
    px_per_mrad: float | None = None

    def __post_init__(self):
        if not self.window_s > 0:
            raise InputError(f"window_s must be positive, got {self.window_s}")
        if self.smooth_alpha is not None and not 0 < self.smooth_alpha <= 1:
            raise InputError(f"smooth_alpha must lie in (0, 1], got {self.smooth_alpha}")
        if self.recoil_threshold is not None and not self.recoil_threshold > 0:
            raise InputError(f"recoil_threshold must be positive, got {self.recoil_threshold}")
        if not self.refractory_s >= 0:
            raise InputError(f"refractory_s must be non-negative, got {self.refractory_s}")
        if self.px_per_mrad is not None and not self.px_per_mrad > 0:
            raise InputError(f"px_per_mrad must be positive, got {self.px_per_mrad}")


@dataclass(frozen=True)
class AimSample:
    frame_index: int
    t: float
    dx: float
    dy: float
    r: float
    vx: float
    vy: float
    speed: float
    ax: float
    ay: float
    amag: float
    acc_w: float
    prec_w: float
    valid: bool

    @property
    def offset(self) -> tuple[float, float]:
        return self.dx, self.dy


CHANNELS = ("dx", "dy", "mean_dx", "mean_dy", "r", "amag", "acc_w", "prec_w")
FIELDS = ("frame_index", "t", "dx", "dy", "r", "vx", "vy", "speed", "ax", "ay", "amag", "acc_w", "prec_w", "valid")


class KinematicSeries(Sequence[AimSample]):
    """Column-oriented aim samples; indexing yields :class:`AimSample` rows."""

    def __init__(self, columns: dict[str, np.ndarray], fps: float, window_s: float = 1.0):
        n = len(columns["t"])
        for name in FIELDS:
            if name not in columns:
                raise InputError(f"missing kinematics column {name!r}")
            if len(columns[name]) != n:
                raise InputError(f"column {name!r} has {len(columns[name])} rows, expected {n}")
        self.columns = {
            name: np.asarray(columns[name], dtype=bool if name == "valid" else int if name == "frame_index" else float)
            for name in FIELDS
        }
        self.fps = float(fps)
        self.window_s = float(window_s)

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        c = self.columns
        return AimSample(
            int(c["frame_index"][i]), *(float(c[f][i]) for f in FIELDS[1:-1]), bool(c["valid"][i])
        )

    def __getattr__(self, name):
        cols = self.__dict__.get("columns")
        if cols is not None and name in cols:
            return cols[name]
        raise AttributeError(name)

    @classmethod
    def from_samples(cls, samples: Sequence[AimSample], fps: float, window_s: float = 1.0) -> "KinematicSeries":
        cols = {name: np.array([getattr(s, name) for s in samples]) for name in FIELDS}
        return cls(cols, fps, window_s)

    def channel(self, name: str) -> np.ndarray:
        """Plot channel by name; windowed means are computed once and cached."""
        if name not in CHANNELS:
            raise ConfigError(f"unknown channel {name!r}; expected one of {', '.join(CHANNELS)}")
        if name in self.columns:
            return self.columns[name]
        cache = self.__dict__.setdefault("_derived", {})
        if name not in cache:
            cache["mean_dx"], cache["mean_dy"] = self.windowed_mean_offset()
        return cache[name]

    def channel_range(self, names) -> tuple[float, float]:
        """Global (lo, hi) over whole-clip channel values, always spanning zero."""
        lo, hi = 0.0, 0.0
        for name in names:
            values = self.channel(name)
            if len(values):
                lo = min(lo, float(np.min(values)))
                hi = max(hi, float(np.max(values)))
        if hi == lo:
            return -1.0, 1.0
        return lo, hi

    def window_length(self) -> int:
        return window_samples(self.window_s, self.fps)

    def windowed_mean_offset(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.window_length()
        dx, dy = self.columns["dx"], self.columns["dy"]
        mx = np.array([math.fsum(dx[max(0, i - k + 1):i + 1]) / (i + 1 - max(0, i - k + 1)) for i in range(len(self))])
        my = np.array([math.fsum(dy[max(0, i - k + 1):i + 1]) / (i + 1 - max(0, i - k + 1)) for i in range(len(self))])
        return mx, my


def window_samples(window_s: float, fps: float) -> int:
    """Samples in the trailing window ``(t - W, t]`` at a fixed frame rate."""
    return max(1, math.ceil(window_s * fps - 1e-9))


def window_stats(dx: np.ndarray, dy: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """Mean distance and RMS spread about the centroid.

    Exactly-rounded sums keep both statistics independent of sample order.
    """
    k = len(r)
    acc = math.fsum(r) / k
    if np.ptp(dx) == 0 and np.ptp(dy) == 0:
        return acc, 0.0
    cx = math.fsum(dx) / k
    cy = math.fsum(dy) / k
    ex, ey = dx - cx, dy - cy
    # scale before squaring so tiny spreads cannot underflow to zero
    scale = max(float(np.abs(ex).max()), float(np.abs(ey).max()))
    ex, ey = ex / scale, ey / scale
    prec = scale * math.sqrt(math.fsum(ex * ex + ey * ey) / k)
    return acc, max(prec, math.ulp(0.0))


def derive_series(track: Sequence[TrackPoint], header: ClipHeader, cfg: MetricsConfig | None = None) -> KinematicSeries:
    cfg = cfg or MetricsConfig()
    if len(track) == 0:
        raise EmptyInputError("track is empty")
    fps = header.fps
    n = len(track)
    aim = cfg.aimpoint if cfg.aimpoint is not None else header.frame_center
    scale = 1.0 / cfg.px_per_mrad if cfg.px_per_mrad else 1.0

    px = np.array([p.center[0] for p in track], dtype=float)
    py = np.array([p.center[1] for p in track], dtype=float)
    valid = np.array([p.status is not TrackStatus.LOST for p in track])
    frame_index = np.array([p.frame_index for p in track], dtype=int)
    t = np.array([header.pts(int(i)) for i in frame_index])

    dx = (px - aim[0]) * scale
    dy = (py - aim[1]) * scale
    r = np.sqrt(dx * dx + dy * dy)

    sx, sy = dx.copy(), dy.copy()
    if cfg.smooth_alpha is not None and cfg.smooth_alpha < 1:
        a = cfg.smooth_alpha
        for i in range(1, n):
            sx[i] = a * dx[i] + (1 - a) * sx[i - 1]
            sy[i] = a * dy[i] + (1 - a) * sy[i - 1]

    vx, vy = np.zeros(n), np.zeros(n)
    vx[1:] = (sx[1:] - sx[:-1]) * fps
    vy[1:] = (sy[1:] - sy[:-1]) * fps
    ax, ay = np.zeros(n), np.zeros(n)
    ax[2:] = (vx[2:] - vx[1:-1]) * fps
    ay[2:] = (vy[2:] - vy[1:-1]) * fps

    k = window_samples(cfg.window_s, fps)
    acc_w, prec_w = np.zeros(n), np.zeros(n)
    for i in range(n):
        lo = max(0, i - k + 1)
        acc_w[i], prec_w[i] = window_stats(dx[lo:i + 1], dy[lo:i + 1], r[lo:i + 1])

    cols = dict(
        frame_index=frame_index, t=t, dx=dx, dy=dy, r=r, vx=vx, vy=vy,
        speed=np.sqrt(vx * vx + vy * vy), ax=ax, ay=ay, amag=np.sqrt(ax * ax + ay * ay),
        acc_w=acc_w, prec_w=prec_w, valid=valid,
    )
    return KinematicSeries(cols, fps, cfg.window_s)


@dataclass(frozen=True)
class ShotEvent:
    frame_index: int
    t: float
    peak_amag: float


def recoil_threshold(amag: np.ndarray, cfg: MetricsConfig) -> float:
    if cfg.recoil_threshold is not None:
        return float(cfg.recoil_threshold)
    med = float(np.median(amag))
    mad = float(np.median(np.abs(amag - med)))
    return max(cfg.recoil_mad_k * MAD_SCALE * mad, 1e-6)


def detect_shots(series: KinematicSeries, cfg: MetricsConfig | None = None) -> list[ShotEvent]:
    """Recoil spikes in acceleration magnitude.

    Accelerations that touch a LOST sample are ignored, since a carried-forward
    center jumps on reacquisition.
    """
    cfg = cfg or MetricsConfig()
    n = len(series)
    if n < 3:
        return []
    amag = np.array(series.amag, dtype=float)
    valid = np.asarray(series.valid, dtype=bool)
    usable = valid.copy()
    usable[1:] &= valid[:-1]
    usable[2:] &= valid[:-2]
    amag = np.where(usable, amag, 0.0)
    t = np.asarray(series.t, dtype=float)
    thr = recoil_threshold(amag[2:], cfg)

    events: list[ShotEvent] = []
    i = 0
    blocked_until = -math.inf
    while i < n:
        if amag[i] > thr and t[i] >= blocked_until:
            j = i
            while j < n and amag[j] > thr:
                j += 1
            peak = i + int(np.argmax(amag[i:j]))
            events.append(ShotEvent(int(series.frame_index[peak]), float(t[peak]), float(amag[peak])))
            blocked_until = t[peak] + cfg.refractory_s
            i = j
        else:
            i += 1
    return events


def shot_flags(series: KinematicSeries, shots: Sequence[ShotEvent]) -> np.ndarray:
    flags = np.zeros(len(series), dtype=bool)
    pos = {int(f): k for k, f in enumerate(series.frame_index)}
    for ev in shots:
        if ev.frame_index in pos:
            flags[pos[ev.frame_index]] = True
    return flags


@dataclass(frozen=True)
class StabilizationOffset:
    frame_index: int
    shift: tuple[int, int]


def stabilization_offsets(track: Sequence[TrackPoint], header: ClipHeader) -> list[StabilizationOffset]:
    """Integer shifts moving the tracked center onto the frame center (half-up rounding)."""
    cx, cy = header.frame_center
    out = []
    prev = (0, 0)
    for p in track:
        if p.status is TrackStatus.LOST:
            shift = prev
        else:
            shift = (round_half_up(cx - p.center[0]), round_half_up(cy - p.center[1]))
        out.append(StabilizationOffset(p.frame_index, shift))
        prev = shift
    return out


def apply_shift(plane: np.ndarray, shift: tuple[int, int], fill) -> np.ndarray:
    """Translate an image by integer ``(sx, sy)``; uncovered pixels get ``fill``."""
    sx, sy = shift
    h, w = plane.shape[:2]
    out = np.empty_like(plane)
    out[...] = fill
    dst_x0, dst_x1 = max(sx, 0), min(w + sx, w)
    dst_y0, dst_y1 = max(sy, 0), min(h + sy, h)
    if dst_x0 < dst_x1 and dst_y0 < dst_y1:
        out[dst_y0:dst_y1, dst_x0:dst_x1] = plane[dst_y0 - sy:dst_y1 - sy, dst_x0 - sx:dst_x1 - sx]
    return out

"""Synthetic scope footage with exact ground truth.

A high-contrast marker is rasterized on a flat background and driven by a
parametric aiming model: low-pass tremor, breathing sway, linear drift and
recoil kicks with exponential recovery.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import prng
from .errors import ScenarioError
from .frame_io import ClipHeader, Frame, PixelFormat, fps_rational
from .tracker import Template

MARKER_DARK = 16
MARKER_LIGHT = 240


@dataclass(frozen=True)
class MarkerSpec:
    size_px: int = 33
    style: str = "squares"   # "squares" or "rings"
    band_px: int | None = None


@dataclass(frozen=True)
class TremorSpec:
    rms_px: float = 0.0
    bandwidth_hz: float = 2.0
    seed: int | None = None


@dataclass(frozen=True)
class BreathingSpec:
    amplitude_px: float = 0.0
    freq_hz: float = 0.25
    axis_deg: float = 90.0


@dataclass(frozen=True)
class ShotSpec:
    t: float
    recoil_px: float = 60.0
    recover_s: float = 0.4
    angle_deg: float = 90.0


@dataclass(frozen=True)
class ScenarioSpec:
    duration_s: float = 10.0
    fps: float = 30.0
    width: int = 320
    height: int = 240
    seed: int = 0
    background: int = 128
    marker: MarkerSpec = field(default_factory=MarkerSpec)
    tremor: TremorSpec = field(default_factory=TremorSpec)
    breathing: BreathingSpec = field(default_factory=BreathingSpec)
    shots: tuple[ShotSpec, ...] = ()
    drift_px_s: tuple[float, float] = (0.0, 0.0)
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shots", tuple(self.shots))
        object.__setattr__(self, "drift_px_s", tuple(float(v) for v in self.drift_px_s))
        validate(self)

    @property
    def frame_count(self) -> int:
        return int(math.floor(self.duration_s * self.fps + 1e-9))

    @property
    def tremor_seed(self) -> int:
        return self.seed if self.tremor.seed is None else self.tremor.seed

    @property
    def header(self) -> ClipHeader:
        num, den = fps_rational(self.fps)
        return ClipHeader(self.width, self.height, num, den, PixelFormat.YUV420, self.frame_count)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        if not isinstance(data, dict):
            raise ScenarioError("scenario", "must be a JSON object")
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ScenarioError(sorted(extra)[0], "unknown scenario field")

        def sub(name, kind):
            value = data.get(name, {})
            if not isinstance(value, dict):
                raise ScenarioError(name, "must be an object")
            bad = set(value) - set(kind.__dataclass_fields__)
            if bad:
                raise ScenarioError(f"{name}.{sorted(bad)[0]}", "unknown field")
            return kind(**value)

        shots = []
        for k, s in enumerate(data.get("shots", [])):
            if not isinstance(s, dict) or "t" not in s:
                raise ScenarioError(f"shots[{k}].t", "each shot needs a time")
            bad = set(s) - set(ShotSpec.__dataclass_fields__)
            if bad:
                raise ScenarioError(f"shots[{k}].{sorted(bad)[0]}", "unknown field")
            shots.append(ShotSpec(**s))
        data["marker"] = sub("marker", MarkerSpec)
        data["tremor"] = sub("tremor", TremorSpec)
        data["breathing"] = sub("breathing", BreathingSpec)
        data["shots"] = tuple(shots)
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ScenarioSpec":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ScenarioError("scenario", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shots"] = [asdict(s) for s in self.shots]
        d["drift_px_s"] = list(self.drift_px_s)
        return d


def _positive(name, value):
    if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
        raise ScenarioError(name, f"must be positive, got {value!r}")


def _nonneg(name, value):
    if not (isinstance(value, (int, float)) and value >= 0 and math.isfinite(value)):
        raise ScenarioError(name, f"must be non-negative, got {value!r}")


def validate(spec: ScenarioSpec) -> None:
    _positive("fps", spec.fps)
    _positive("duration_s", spec.duration_s)
    for name in ("width", "height"):
        v = getattr(spec, name)
        if not isinstance(v, int) or v <= 0 or v % 2:
            raise ScenarioError(name, f"must be a positive even integer, got {v!r}")
    if not isinstance(spec.seed, int) or spec.seed < 0:
        raise ScenarioError("seed", "must be a non-negative integer")
    if not 0 <= spec.background <= 255:
        raise ScenarioError("background", "must lie in 0..255")
    m = spec.marker
    if not isinstance(m.size_px, int) or m.size_px < 3 or m.size_px % 2 == 0:
        raise ScenarioError("marker.size_px", f"must be an odd integer >= 3, got {m.size_px!r}")
    if m.style not in ("squares", "rings"):
        raise ScenarioError("marker.style", f"unknown style {m.style!r}")
    if m.band_px is not None and m.band_px < 1:
        raise ScenarioError("marker.band_px", "must be >= 1")
    _nonneg("tremor.rms_px", spec.tremor.rms_px)
    _positive("tremor.bandwidth_hz", spec.tremor.bandwidth_hz)
    _nonneg("breathing.amplitude_px", spec.breathing.amplitude_px)
    _nonneg("breathing.freq_hz", spec.breathing.freq_hz)
    _nonneg("noise_sigma", spec.noise_sigma)
    if len(spec.drift_px_s) != 2:
        raise ScenarioError("drift_px_s", "must have two components")
    prev = -math.inf
    for k, s in enumerate(spec.shots):
        if not isinstance(s.t, (int, float)) or not 0 <= s.t < spec.duration_s:
            raise ScenarioError(f"shots[{k}].t", f"must lie in [0, duration_s), got {s.t!r}")
        if s.t <= prev:
            raise ScenarioError(f"shots[{k}].t", "shot times must be strictly increasing")
        prev = s.t
        _nonneg(f"shots[{k}].recoil_px", s.recoil_px)
        _positive(f"shots[{k}].recover_s", s.recover_s)
    half = m.size_px // 2
    margin = max((s.recoil_px for s in spec.shots), default=0.0) + 3 * spec.tremor.rms_px
    room = min(spec.width, spec.height) / 2 - 1 - half
    if margin > room:
        raise ScenarioError(
            "marker.size_px", f"marker needs {margin:.1f} px of margin but only {room:.1f} px fit in the frame"
        )


@dataclass
class TruthLog:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    shot_times: list[float]
    fps: float

    def __len__(self) -> int:
        return len(self.t)

    @property
    def frame_index(self) -> np.ndarray:
        return np.arange(len(self.t))

    @property
    def shot_frames(self) -> list[int]:
        """First frame at or after each shot time."""
        return [math.ceil(ts * self.fps - 1e-9) for ts in self.shot_times]

    def center(self, i: int) -> tuple[float, float]:
        return float(self.x[i]), float(self.y[i])

    def pixel_center(self, i: int) -> tuple[int, int]:
        return round_half_up(self.x[i]), round_half_up(self.y[i])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["frame_idx", "t", "true_x", "true_y"])
            for i in range(len(self)):
                w.writerow([i, repr(float(self.t[i])), repr(float(self.x[i])), repr(float(self.y[i]))])

    def shots_json(self) -> list[dict]:
        return [{"frame_index": f, "t": float(ts)} for f, ts in zip(self.shot_frames, self.shot_times)]

    @classmethod
    def from_csv(cls, path, fps: float, shot_times=()) -> "TruthLog":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            np.array([float(r["t"]) for r in rows]),
            np.array([float(r["true_x"]) for r in rows]),
            np.array([float(r["true_y"]) for r in rows]),
            list(shot_times), fps,
        )


def round_half_up(v) -> int:
    return int(math.floor(float(v) + 0.5))


def tremor_track(rms: float, bandwidth_hz: float, fps: float, n: int, state: int) -> np.ndarray:
    """First-order low-pass Gaussian noise scaled to a stationary RMS of ``rms``."""
    if rms == 0 or n == 0:
        return np.zeros(n)
    beta = 1.0 - math.exp(-2.0 * math.pi * bandwidth_hz / fps)
    gain = rms * math.sqrt((2.0 - beta) / beta)
    g = prng.normals(state, 0, n)
    out = np.empty(n)
    out[0] = rms * g[0]
    for i in range(1, n):
        out[i] = (1.0 - beta) * out[i - 1] + beta * gain * g[i]
    return out


def generate_trajectory(spec: ScenarioSpec) -> TruthLog:
    n = spec.frame_count
    fps = spec.fps
    t = np.arange(n) / fps
    cx, cy = spec.width / 2, spec.height / 2
    seed = spec.tremor_seed
    x = cx + tremor_track(spec.tremor.rms_px, spec.tremor.bandwidth_hz, fps, n, prng.substream(seed, prng.TREMOR_X))
    y = cy + tremor_track(spec.tremor.rms_px, spec.tremor.bandwidth_hz, fps, n, prng.substream(seed, prng.TREMOR_Y))

    b = spec.breathing
    if b.amplitude_px:
        wave = b.amplitude_px * np.sin(2.0 * np.pi * b.freq_hz * t)
        ang = math.radians(b.axis_deg)
        x = x + wave * math.cos(ang)
        y = y + wave * math.sin(ang)
    x = x + spec.drift_px_s[0] * t
    y = y + spec.drift_px_s[1] * t
    for s in spec.shots:
        start = math.ceil(s.t * fps - 1e-9)
        if start >= n:
            continue
        decay = np.exp(-(t[start:] - s.t) / s.recover_s)
        ang = math.radians(s.angle_deg)
        x[start:] += s.recoil_px * math.cos(ang) * decay
        y[start:] += s.recoil_px * math.sin(ang) * decay
    return TruthLog(t, x, y, [float(s.t) for s in spec.shots], fps)


def marker_raster(marker: MarkerSpec) -> np.ndarray:
    size = marker.size_px
    half = size // 2
    band = marker.band_px or max(1, size // 8)
    yy, xx = np.mgrid[-half:half + 1, -half:half + 1]
    if marker.style == "squares":
        d = np.maximum(np.abs(xx), np.abs(yy))
    else:
        d = np.floor(np.sqrt(xx * xx + yy * yy)).astype(int)
    return np.where((d // band) % 2 == 0, MARKER_DARK, MARKER_LIGHT).astype(np.uint8)


class SynthClip(Sequence[Frame]):
    """Lazily rendered frames; frame ``i`` depends only on (spec, truth, i)."""

    def __init__(self, spec: ScenarioSpec, truth: TruthLog):
        if len(truth) != spec.frame_count:
            raise ScenarioError("truth", f"has {len(truth)} frames, scenario needs {spec.frame_count}")
        self.spec = spec
        self.truth = truth
        self.header = spec.header
        self.marker = marker_raster(spec.marker)
        self._noise_state = prng.substream(spec.seed, prng.NOISE)
        self._chroma = np.full((spec.height // 2, spec.width // 2), 128, np.uint8)

    def __len__(self) -> int:
        return len(self.truth)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return Frame(
            self.spec.width, self.spec.height, PixelFormat.YUV420,
            (self.luma(i), self._chroma, self._chroma), i, self.header.pts(i),
        )

    def luma(self, i: int) -> np.ndarray:
        spec = self.spec
        w, h = spec.width, spec.height
        img = np.full((h, w), float(spec.background))
        px, py = self.truth.pixel_center(i)
        half = self.marker.shape[0] // 2
        x0, y0 = px - half, py - half
        sx0, sy0 = max(0, -x0), max(0, -y0)
        dx0, dy0 = max(0, x0), max(0, y0)
        dx1 = min(w, x0 + self.marker.shape[1])
        dy1 = min(h, y0 + self.marker.shape[0])
        if dx0 < dx1 and dy0 < dy1:
            img[dy0:dy1, dx0:dx1] = self.marker[sy0:sy0 + dy1 - dy0, sx0:sx0 + dx1 - dx0]
        if spec.noise_sigma > 0:
            img += spec.noise_sigma * prng.normals(self._noise_state, i * w * h, w * h).reshape(h, w)
        return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def render_clip(spec: ScenarioSpec, truth: TruthLog) -> tuple[SynthClip, Template]:
    clip = SynthClip(spec, truth)
    return clip, Template.from_array(clip.marker)


def synthesize(spec: ScenarioSpec) -> tuple[TruthLog, SynthClip, Template]:
    truth = generate_trajectory(spec)
    clip, template = render_clip(spec, truth)
    return truth, clip, template

"""Visualization panels: time-series charts, polar aim trail, text metrics,
and in-video overlays. All renderers return RGB24 frames and are pure.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ConfigError
from ..frame_io import Frame, to_rgb
from ..kinematics import CHANNELS, AimSample, KinematicSeries, window_samples
from ..tracker import TrackPoint, TrackStatus
from . import raster
from .font import ADVANCE, GLYPH_H
from .style import Style


class PanelKind(str, enum.Enum):
    TIMESERIES = "TIMESERIES"
    POLAR = "POLAR"
    TEXT = "TEXT"
    VIDEO = "VIDEO"


@dataclass(frozen=True)
class PanelSpec:
    kind: PanelKind
    size: tuple[int, int]
    channels: tuple[str, ...] = ()
    span_s: float = 3.0
    max_radius_px: float = 40.0
    trail_s: float = 1.0
    history_s: float | None = None
    title: str | None = None
    style: Style = field(default_factory=Style)

    def __post_init__(self):
        object.__setattr__(self, "kind", PanelKind(self.kind))
        object.__setattr__(self, "channels", tuple(self.channels))
        w, h = self.size
        if w <= 0 or h <= 0:
            raise ConfigError(f"panel size must be positive, got {w}x{h}")
        if self.kind is PanelKind.TIMESERIES:
            if not self.span_s > 0:
                raise ConfigError("time-series span_s must be positive")
            if not self.channels:
                raise ConfigError("time-series panel needs at least one channel")
            for ch in self.channels:
                if ch not in CHANNELS:
                    raise ConfigError(f"unknown channel {ch!r}; expected one of {', '.join(CHANNELS)}")
        if self.kind is PanelKind.POLAR and not self.max_radius_px > 0:
            raise ConfigError("polar max_radius_px must be positive")


def fmt1(v: float) -> str:
    s = f"{v:.1f}"
    return "0.0" if s == "-0.0" else s


def fmt_signed(v: float) -> str:
    s = f"{v:+.1f}"
    return "+0.0" if s == "-0.0" else s


def _to_px(v) -> np.ndarray:
    return np.floor(np.asarray(v, dtype=float) + 0.5).astype(np.int64)


# ----------------------------------------------------------------- time series

@dataclass(frozen=True)
class PlotRect:
    x0: int
    y0: int
    x1: int   # inclusive
    y1: int   # inclusive

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1


def _label_width(lo: float, hi: float, scale: int) -> int:
    return max(len(fmt1(lo)), len(fmt1(hi))) * ADVANCE * scale + 3


def _value_chars(lo: float, hi: float) -> int:
    return max(len(fmt1(lo)), len(fmt1(hi)))


def plot_rect(panel: PanelSpec, lo: float, hi: float) -> PlotRect:
    s = panel.style.font_scale
    gh = GLYPH_H * s
    w, h = panel.size
    x0 = min(_label_width(lo, hi, s), w - 2)
    y0 = min(2 + gh + 3, h - 2)
    x1 = max(w - 3, x0)
    y1 = max(h - 3 - gh - 2, y0)
    return PlotRect(x0, y0, x1, y1)


def sample_columns(now_index: int, n_span: int, width: int, x_right: int) -> tuple[int, np.ndarray]:
    """First visible index and the x column of every visible sample."""
    first = max(0, now_index - n_span + 1)
    back = now_index - np.arange(first, now_index + 1)
    return first, x_right - (back * (width - 1)) // max(n_span - 1, 1)


def value_rows(values, lo: float, hi: float, rect: PlotRect) -> np.ndarray:
    frac = (hi - np.asarray(values, dtype=float)) / (hi - lo)
    return rect.y0 + _to_px(frac * (rect.height - 1))


@lru_cache(maxsize=64)
def _timeseries_background(panel: PanelSpec, lo: float, hi: float) -> np.ndarray:
    st = panel.style
    s = st.font_scale
    w, h = panel.size
    canvas = raster.new_canvas(w, h, st.panel_background)
    rect = plot_rect(panel, lo, hi)
    raster.rect_outline(canvas, rect.x0 - 1, rect.y0 - 1, rect.width + 2, rect.height + 2, st.grid)
    zero_row = int(value_rows([0.0], lo, hi, rect)[0])
    raster.fill_rect(canvas, rect.x0, zero_row, rect.width, 1, st.grid)
    title = panel.title or " ".join(panel.channels)
    # leave room on the right for the current-value label
    room = (w - 2 - (_value_chars(lo, hi) + 1) * ADVANCE * s) // (ADVANCE * s)
    raster.text(canvas, 2, 2, title[:max(room, 0)], st.text, s)
    raster.text(canvas, 1, rect.y0, fmt1(hi), st.axis_text, s)
    raster.text(canvas, 1, rect.y1 - GLYPH_H * s + 1, fmt1(lo), st.axis_text, s)
    now_x = rect.x1 - 2 * ADVANCE * s + 2
    span_label = f"-{panel.span_s:g}s"
    if rect.x0 + (len(span_label) + 1) * ADVANCE * s <= now_x:
        raster.text(canvas, rect.x0, rect.y1 + 3, span_label, st.axis_text, s)
    raster.text(canvas, now_x, rect.y1 + 3, "0s", st.axis_text, s)
    canvas.flags.writeable = False
    return canvas


def render_timeseries(panel: PanelSpec, series: KinematicSeries, now_index: int) -> Frame:
    """Trailing-window chart of ``panel.channels`` ending at ``now_index``.

    The value axis uses the whole clip's range, so it never rescales
    between frames.
    """
    if panel.kind is not PanelKind.TIMESERIES:
        raise ConfigError(f"expected a TIMESERIES panel, got {panel.kind.value}")
    if not 0 <= now_index < len(series):
        raise IndexError(f"now_index {now_index} outside series of length {len(series)}")
    st = panel.style
    lo, hi = series.channel_range(panel.channels)
    canvas = _timeseries_background(panel, lo, hi).copy()
    rect = plot_rect(panel, lo, hi)
    n_span = max(2, int(math.floor(panel.span_s * series.fps + 0.5)))
    first, xs = sample_columns(now_index, n_span, rect.width, rect.x1)
    for name in panel.channels:
        values = series.channel(name)[first:now_index + 1]
        ys = value_rows(values, lo, hi, rect)
        raster.polyline(canvas, xs, ys, st.channel_color(name), st.line_width)
    lead = series.channel(panel.channels[0])
    cy = int(value_rows([lead[now_index]], lo, hi, rect)[0])
    raster.fill_rect(canvas, rect.x1 - 1, cy - 1, 3, 3, st.current)
    label = fmt1(float(lead[now_index]))
    s = st.font_scale
    raster.text(canvas, panel.size[0] - len(label) * ADVANCE * s - 1, 2, label, st.current, s)
    return Frame.rgb(canvas, now_index)


# ----------------------------------------------------------------------- polar

def polar_geometry(panel: PanelSpec) -> tuple[int, int, int]:
    w, h = panel.size
    return w // 2, h // 2, max(1, min(w, h) // 2 - 4)


def polar_points(panel: PanelSpec, dx, dy) -> tuple[np.ndarray, np.ndarray]:
    cx, cy, radius = polar_geometry(panel)
    w, h = panel.size
    k = radius / panel.max_radius_px
    xs = np.clip(cx + _to_px(np.asarray(dx, dtype=float) * k), 0, w - 1)
    ys = np.clip(cy + _to_px(np.asarray(dy, dtype=float) * k), 0, h - 1)
    return xs, ys


@lru_cache(maxsize=16)
def _polar_background(panel: PanelSpec) -> np.ndarray:
    st = panel.style
    w, h = panel.size
    canvas = raster.new_canvas(w, h, st.panel_background)
    cx, cy, radius = polar_geometry(panel)
    raster.line(canvas, cx - radius, cy, cx + radius, cy, st.grid)
    raster.line(canvas, cx, cy - radius, cx, cy + radius, st.grid)
    for k in (1, 2, 3, 4):
        raster.circle(canvas, cx, cy, (radius * k) // 4, st.grid)
    if panel.title:
        raster.text(canvas, 2, 2, panel.title, st.text, st.font_scale)
    raster.text(canvas, 2, h - GLYPH_H * st.font_scale - 2, f"r={panel.max_radius_px:g}", st.axis_text, st.font_scale)
    canvas.flags.writeable = False
    return canvas


def render_polar(panel: PanelSpec, series: KinematicSeries, now_index: int) -> Frame:
    """Aim offsets around the target: the last ``trail_s`` in color, older
    history dashed gray, current sample emphasized."""
    if panel.kind is not PanelKind.POLAR:
        raise ConfigError(f"expected a POLAR panel, got {panel.kind.value}")
    if not 0 <= now_index < len(series):
        raise IndexError(f"now_index {now_index} outside series of length {len(series)}")
    st = panel.style
    canvas = _polar_background(panel).copy()
    start = 0
    if panel.history_s is not None:
        start = max(0, now_index - window_samples(panel.history_s, series.fps) + 1)
    trail_start = max(start, now_index - window_samples(panel.trail_s, series.fps) + 1)
    xs, ys = polar_points(panel, series.dx[start:now_index + 1], series.dy[start:now_index + 1])
    split = trail_start - start
    if split > 0:
        raster.polyline(canvas, xs[:split + 1], ys[:split + 1], st.history, 1, dash=(4, 4))
    raster.polyline(canvas, xs[split:], ys[split:], st.trail, st.line_width)
    raster.fill_circle(canvas, int(xs[-1]), int(ys[-1]), 3, st.current)
    return Frame.rgb(canvas, now_index)


# ------------------------------------------------------------------------ text

def text_panel_lines(sample: AimSample, shots_so_far: int) -> list[str]:
    return [
        f"pos: {fmt_signed(sample.dx)}, {fmt_signed(sample.dy)}",
        f"dist: {fmt1(sample.r)}",
        f"acc: {fmt1(sample.acc_w)}",
        f"prec: {fmt1(sample.prec_w)}",
        f"shots: {shots_so_far}",
        f"time: {fmt1(sample.t)} s",
    ]


def render_text_panel(panel: PanelSpec, sample: AimSample, shots_so_far: int) -> Frame:
    st = panel.style
    w, h = panel.size
    lines = text_panel_lines(sample, shots_so_far)
    widest = max(len(line) for line in lines) * ADVANCE
    # largest integral scale (up to the style's) that fits the widest line
    s = max(1, min(st.text_font_scale, (w - 4) // widest))
    canvas = raster.new_canvas(w, h, st.panel_background)
    y = 4 * s
    for line in lines:
        raster.text(canvas, 3 * s, y, line, st.text, s)
        y += (GLYPH_H + 4) * s
    return Frame.rgb(canvas, sample.frame_index)


# -------------------------------------------------------------------- overlays

@dataclass(frozen=True)
class OverlaySpec:
    aimpoint: tuple[float, float] | None = None   # defaults to the frame center
    target_radius_px: int = 26
    on_target_radius_px: float = 5.0
    arm_px: int = 10
    gap_px: int = 3
    style: Style = field(default_factory=Style)


def draw_overlays(frame: Frame, spec: OverlaySpec, sample: AimSample, track: TrackPoint) -> Frame:
    """Target highlight circle at the tracked center and an aimpoint crosshair.

    LOST tracks draw a dashed circle in the stale color; the crosshair takes
    the on-target color when the aim distance is within ``on_target_radius_px``.
    """
    st = spec.style
    canvas = np.array(to_rgb(frame).planes[0])
    tx, ty = (int(v) for v in _to_px(track.center))
    if track.status is TrackStatus.LOST:
        raster.circle(canvas, tx, ty, spec.target_radius_px, st.stale, st.overlay_width, dash=(4, 4))
    else:
        raster.circle(canvas, tx, ty, spec.target_radius_px, st.target, st.overlay_width)
    aim = spec.aimpoint if spec.aimpoint is not None else (frame.width / 2, frame.height / 2)
    ax, ay = (int(v) for v in _to_px(aim))
    color = st.on_target if sample.r <= spec.on_target_radius_px else st.aim
    g, a = spec.gap_px, spec.arm_px
    for x0, y0, x1, y1 in (
        (ax - a, ay, ax - g, ay), (ax + g, ay, ax + a, ay),
        (ax, ay - a, ax, ay - g), (ax, ay + g, ax, ay + a),
    ):
        raster.line(canvas, x0, y0, x1, y1, color, st.overlay_width)
    return Frame.rgb(canvas, frame.index, frame.pts_seconds)

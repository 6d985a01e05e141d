"""Composite visualization layouts: juxtaposed panels and superimposed
overlays assembled per frame.

Layout JSON maps a preset id (VIS1..VIS5) to::

    {"canvas": [cw, ch],                 # multiples of source width/height
     "background": [r, g, b],            # optional, default style background
     "placements": [
        {"slot": str, "kind": "VIDEO"|"TIMESERIES"|"POLAR"|"TEXT",
         "rect": [x, y, w, h],           # x, w in source widths; y, h in source heights
         "z": int,                       # optional, default 0
         "align": "center",              # optional, centers the slot horizontally
         "source": "raw"|"stabilized"|"overlay",   # VIDEO only
         "channels": [...], "title": str, "span_s": float}  # panel options
     ]}

VIDEO slots are always exactly the source size.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CompositionError, ConfigError, InputError
from .frame_io import Frame, PixelFormat, to_rgb
from .kinematics import KinematicSeries, ShotEvent, apply_shift, stabilization_offsets
from .render import raster
from .render.panels import (
    OverlaySpec, PanelKind, PanelSpec, draw_overlays, render_polar, render_text_panel, render_timeseries,
)
from .render.style import Style
from .tracker import TrackPoint

PRESETS = ("VIS1", "VIS2", "VIS3", "VIS4", "VIS5")
VIDEO_SOURCES = ("raw", "stabilized", "overlay")


def default_layouts() -> dict:
    return json.loads(resources.files("scopevis").joinpath("data/layouts.json").read_text())


def load_layouts(path) -> dict:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid layout JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: layout file must be a JSON object")
    return data


@dataclass(frozen=True)
class Placement:
    slot: str
    kind: PanelKind
    rect: tuple[int, int, int, int]   # x, y, w, h in canvas pixels
    z: int = 0
    options: Mapping = field(default_factory=dict)

    @property
    def size(self) -> tuple[int, int]:
        return self.rect[2], self.rect[3]


@dataclass(frozen=True)
class LayoutPreset:
    id: str
    canvas: tuple[int, int]
    placements: tuple[Placement, ...]
    background: tuple[int, int, int]

    def __post_init__(self):
        cw, ch = self.canvas
        if cw <= 0 or ch <= 0:
            raise ConfigError(f"{self.id}: canvas must be positive, got {cw}x{ch}")
        slots = set()
        for p in self.placements:
            x, y, w, h = p.rect
            if p.slot in slots:
                raise ConfigError(f"{self.id}: duplicate slot {p.slot!r}")
            slots.add(p.slot)
            if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > cw or y + h > ch:
                raise ConfigError(f"{self.id}: slot {p.slot!r} rect {p.rect} lies outside the {cw}x{ch} canvas")
        ps = self.placements
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if ps[i].z == ps[j].z and _overlap(ps[i].rect, ps[j].rect):
                    raise ConfigError(f"{self.id}: slots {ps[i].slot!r} and {ps[j].slot!r} overlap at z={ps[i].z}")

    def placement(self, slot: str) -> Placement:
        for p in self.placements:
            if p.slot == slot:
                return p
        raise KeyError(slot)

    def is_passthrough(self) -> bool:
        """A single raw video slot covering the canvas: output equals input."""
        if len(self.placements) != 1:
            return False
        p = self.placements[0]
        return (p.kind is PanelKind.VIDEO and p.options.get("source", "raw") == "raw"
                and p.rect == (0, 0, *self.canvas))


def _overlap(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def _edge(v: float, unit: int) -> int:
    return int(math.floor(v * unit + 1e-6))


def _canvas_dim(scale: float, unit: int) -> int:
    n = int(math.floor(scale * unit + 0.5))
    # keep the canvas parity equal to the source so even sources give even canvases
    return n + ((n - unit) % 2)


def resolve_preset(preset_id: str, source_size: tuple[int, int], layouts: dict | None = None,
                   style: Style | None = None) -> LayoutPreset:
    layouts = layouts if layouts is not None else default_layouts()
    style = style or Style()
    if preset_id not in layouts:
        raise ConfigError(f"layout has no preset {preset_id!r}")
    entry = layouts[preset_id]
    W, H = source_size
    try:
        cw, ch = (float(v) for v in entry["canvas"])
        canvas = (_canvas_dim(cw, W), _canvas_dim(ch, H))
        background = tuple(entry.get("background", style.background))
        placements = []
        for k, raw in enumerate(entry["placements"]):
            opts = dict(raw)
            slot = opts.pop("slot")
            kind = PanelKind(opts.pop("kind"))
            x, y, w, h = (float(v) for v in opts.pop("rect"))
            z = int(opts.pop("z", 0))
            align = opts.pop("align", None)
            x0, y0 = _edge(x, W), _edge(y, H)
            pw, ph = _edge(x + w, W) - x0, _edge(y + h, H) - y0
            if kind is PanelKind.VIDEO:
                if (w, h) != (1.0, 1.0):
                    raise ConfigError(f"{preset_id}: video slot {slot!r} must be [.., .., 1, 1] (source size)")
                pw, ph = W, H
                if opts.setdefault("source", "raw") not in VIDEO_SOURCES:
                    raise ConfigError(f"{preset_id}: video slot {slot!r} has unknown source {opts['source']!r}")
            if align == "center":
                x0 = (canvas[0] - pw) // 2
            elif align is not None:
                raise ConfigError(f"{preset_id}: unknown align {align!r}")
            placements.append(Placement(slot, kind, (x0, y0, pw, ph), z, opts))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{preset_id}: malformed layout entry ({exc})") from None
    return LayoutPreset(preset_id, canvas, tuple(placements), background)


def compose_frame(preset: LayoutPreset, inputs: Mapping[str, Frame], index: int = 0, pts: float = 0.0) -> Frame:
    """Fill the canvas with the background, then blit slots in ascending z."""
    cw, ch = preset.canvas
    canvas = raster.new_canvas(cw, ch, preset.background)
    order = sorted(range(len(preset.placements)), key=lambda k: (preset.placements[k].z, k))
    for k in order:
        p = preset.placements[k]
        if p.slot not in inputs:
            raise CompositionError(p.slot, "no input frame supplied")
        frame = inputs[p.slot]
        if frame.size != p.size:
            raise CompositionError(p.slot, f"input is {frame.width}x{frame.height}, placement needs {p.size[0]}x{p.size[1]}")
        raster.blit(canvas, to_rgb(frame).planes[0], p.rect[0], p.rect[1])
    return Frame.rgb(canvas, index, pts)


@dataclass(frozen=True)
class RenderConfig:
    style: Style = field(default_factory=Style)
    layouts: dict | None = field(default=None, hash=False)
    span_s: float = 3.0
    max_radius_px: float | None = None   # None: a quarter of the smaller source dimension
    trail_s: float = 1.0
    history_s: float | None = None
    overlay: OverlaySpec | None = None


def panel_for(p: Placement, cfg: RenderConfig, source_size: tuple[int, int]) -> PanelSpec:
    o = p.options
    max_r = cfg.max_radius_px if cfg.max_radius_px is not None else min(source_size) / 4
    return PanelSpec(
        p.kind, p.size,
        channels=tuple(o.get("channels", ())),
        span_s=float(o.get("span_s", cfg.span_s)),
        max_radius_px=float(o.get("max_radius_px", max_r)),
        trail_s=float(o.get("trail_s", cfg.trail_s)),
        history_s=o.get("history_s", cfg.history_s),
        title=o.get("title"),
        style=cfg.style,
    )


def render_visualization(vis: str, clip: Iterable[Frame], track: Sequence[TrackPoint], series: KinematicSeries,
                         shots: Sequence[ShotEvent], cfg: RenderConfig | None = None) -> Iterator[Frame]:
    """Yield composite frames for preset ``vis``, one per clip frame.

    ``track`` and ``series`` must be aligned with the clip; a length mismatch
    raises ``InputError`` once detected.
    """
    cfg = cfg or RenderConfig()
    vis = vis.upper()
    if len(track) != len(series):
        raise InputError(f"track has {len(track)} rows but metrics have {len(series)} rows")
    n = len(series)
    shot_frames = np.array(sorted(ev.frame_index for ev in shots), dtype=int)
    preset = None
    panels: dict[str, PanelSpec] = {}
    offsets = None
    overlay = cfg.overlay

    count = 0
    for i, frame in enumerate(clip):
        if i >= n:
            raise InputError(f"clip has more frames than the {n} metrics rows")
        if preset is None:
            source = (frame.width, frame.height)
            preset = resolve_preset(vis, source, cfg.layouts, cfg.style)
            panels = {p.slot: panel_for(p, cfg, source) for p in preset.placements if p.kind is not PanelKind.VIDEO}
            if overlay is None:
                overlay = OverlaySpec(style=cfg.style)
        if preset.is_passthrough():
            yield frame
            count += 1
            continue
        inputs = {}
        for p in preset.placements:
            if p.kind is PanelKind.VIDEO:
                src = p.options["source"]
                if src == "raw":
                    inputs[p.slot] = frame
                elif src == "stabilized":
                    if offsets is None:
                        from .frame_io import ClipHeader
                        header = ClipHeader(frame.width, frame.height, 1, 1, PixelFormat.RGB24)
                        offsets = stabilization_offsets(track, header)
                    rgb = to_rgb(frame).planes[0]
                    inputs[p.slot] = Frame.rgb(apply_shift(rgb, offsets[i].shift, cfg.style.panel_background), i)
                else:
                    inputs[p.slot] = draw_overlays(frame, overlay, series[i], track[i])
            elif p.kind is PanelKind.TIMESERIES:
                inputs[p.slot] = render_timeseries(panels[p.slot], series, i)
            elif p.kind is PanelKind.POLAR:
                inputs[p.slot] = render_polar(panels[p.slot], series, i)
            else:
                shots_so_far = int(np.searchsorted(shot_frames, series.frame_index[i], side="right"))
                inputs[p.slot] = render_text_panel(panels[p.slot], series[i], shots_so_far)
        yield compose_frame(preset, inputs, frame.index, frame.pts_seconds)
        count += 1
    if count != n:
        raise InputError(f"clip has {count} frames but metrics have {n} rows")

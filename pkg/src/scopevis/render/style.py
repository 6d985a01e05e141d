"""Colors and stroke settings shared by all renderers."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace

from ..errors import ConfigError

Color = tuple[int, int, int]

# Okabe-Ito colorblind-safe palette
ORANGE = (230, 159, 0)
SKY_BLUE = (86, 180, 233)
GREEN = (0, 158, 115)
YELLOW = (240, 228, 66)
BLUE = (0, 114, 178)
VERMILLION = (213, 94, 0)
PURPLE = (204, 121, 167)

DEFAULT_CHANNEL_COLORS = (
    ("dx", ORANGE),
    ("dy", SKY_BLUE),
    ("mean_dx", VERMILLION),
    ("mean_dy", BLUE),
    ("r", GREEN),
    ("amag", PURPLE),
    ("acc_w", YELLOW),
    ("prec_w", SKY_BLUE),
)


@dataclass(frozen=True)
class Style:
    background: Color = (24, 24, 28)
    panel_background: Color = (32, 32, 38)
    grid: Color = (72, 72, 84)
    text: Color = (230, 230, 230)
    axis_text: Color = (160, 160, 172)
    channel_colors: tuple[tuple[str, Color], ...] = DEFAULT_CHANNEL_COLORS
    trail: Color = ORANGE
    history: Color = (128, 128, 128)
    current: Color = YELLOW
    target: Color = SKY_BLUE
    aim: Color = VERMILLION
    on_target: Color = GREEN
    stale: Color = (230, 230, 230)   # light so it stands out against mid-gray footage
    line_width: int = 1
    overlay_width: int = 2
    font_scale: int = 1
    text_font_scale: int = 2

    def channel_color(self, name: str) -> Color:
        for key, color in self.channel_colors:
            if key == name:
                return color
        return self.text

    @classmethod
    def from_dict(cls, data: dict) -> "Style":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown style key {key!r}")
            if key == "channel_colors":
                merged = dict(DEFAULT_CHANNEL_COLORS)
                merged.update({k: _color(f"channel_colors.{k}", v) for k, v in value.items()})
                kwargs[key] = tuple(merged.items())
            elif key in ("line_width", "overlay_width", "font_scale", "text_font_scale"):
                if not isinstance(value, int) or value < 1:
                    raise ConfigError(f"style.{key} must be a positive integer")
                kwargs[key] = value
            else:
                kwargs[key] = _color(key, value)
        return replace(cls(), **kwargs)

    @classmethod
    def from_json(cls, path) -> "Style":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _color(name, value) -> Color:
    if (not isinstance(value, (list, tuple)) or len(value) != 3
            or not all(isinstance(c, int) and 0 <= c <= 255 for c in value)):
        raise ConfigError(f"style.{name} must be an [r, g, b] triple of 0..255 integers")
    return tuple(value)

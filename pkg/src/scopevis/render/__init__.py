"""Panel rasterizers consumed by the composite layouts."""
from .panels import (
    OverlaySpec,
    PanelKind,
    PanelSpec,
    draw_overlays,
    render_polar,
    render_text_panel,
    render_timeseries,
    text_panel_lines,
)
from .style import Style

__all__ = [
    "OverlaySpec", "PanelKind", "PanelSpec", "Style", "draw_overlays", "render_polar",
    "render_text_panel", "render_timeseries", "text_panel_lines",
]

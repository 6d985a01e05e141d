"""Integer rasterization onto RGB canvases (``uint8[h, w, 3]``).

Every primitive clips to the canvas; nothing is written out of bounds.
"""
from __future__ import annotations

import numpy as np

from .. import _backend
from .font import text_mask


def new_canvas(w: int, h: int, color) -> np.ndarray:
    canvas = np.empty((h, w, 3), dtype=np.uint8)
    canvas[...] = color
    return canvas


def fill_rect(canvas, x, y, w, h, color):
    H, W = canvas.shape[:2]
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, W), min(y + h, H)
    if x0 < x1 and y0 < y1:
        canvas[y0:y1, x0:x1] = color


def rect_outline(canvas, x, y, w, h, color):
    fill_rect(canvas, x, y, w, 1, color)
    fill_rect(canvas, x, y + h - 1, w, 1, color)
    fill_rect(canvas, x, y, 1, h, color)
    fill_rect(canvas, x + w - 1, y, 1, h, color)


def polyline(canvas, xs, ys, color, thickness=1, dash=None, phase=0) -> int:
    """Bresenham polyline; ``dash=(on, off)`` counts pixels along the path.

    Returns the dash phase after the last pixel so paths can be continued.
    """
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    ys = np.ascontiguousarray(ys, dtype=np.int64)
    on, off = dash if dash else (0, 0)
    return _backend.draw_polyline(canvas, xs, ys, tuple(int(c) for c in color), int(thickness), int(on), int(off), int(phase))


def line(canvas, x0, y0, x1, y1, color, thickness=1, dash=None):
    polyline(canvas, [x0, x1], [y0, y1], color, thickness, dash)


def circle_points(cx: int, cy: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-circle pixels in angular order, without repeats."""
    if r <= 0:
        return np.array([cx]), np.array([cy])
    octant = []
    x, y, d = 0, r, 1 - r
    while x <= y:
        octant.append((x, y))
        if d < 0:
            d += 2 * x + 3
        else:
            d += 2 * (x - y) + 5
            y -= 1
        x += 1
    rev = octant[::-1]
    pts = []
    for seq, fx in (
        (octant, lambda a, b: (a, b)), (rev, lambda a, b: (b, a)),
        (octant, lambda a, b: (b, -a)), (rev, lambda a, b: (a, -b)),
        (octant, lambda a, b: (-a, -b)), (rev, lambda a, b: (-b, -a)),
        (octant, lambda a, b: (-b, a)), (rev, lambda a, b: (-a, b)),
    ):
        for a, b in seq:
            p = fx(a, b)
            if not pts or pts[-1] != p:
                pts.append(p)
    if len(pts) > 1 and pts[-1] == pts[0]:
        pts.pop()
    arr = np.array(pts, dtype=np.int64)
    return arr[:, 0] + cx, arr[:, 1] + cy


def _stamp_points(canvas, xs, ys, color, thickness=1):
    H, W = canvas.shape[:2]
    lo = -((thickness - 1) // 2)
    hi = thickness // 2
    for oy in range(lo, hi + 1):
        for ox in range(lo, hi + 1):
            px, py = xs + ox, ys + oy
            keep = (px >= 0) & (px < W) & (py >= 0) & (py < H)
            canvas[py[keep], px[keep]] = color


def circle(canvas, cx, cy, r, color, thickness=1, dash=None):
    xs, ys = circle_points(int(cx), int(cy), int(r))
    if dash:
        on, off = dash
        keep = (np.arange(len(xs)) % (on + off)) < on
        xs, ys = xs[keep], ys[keep]
    _stamp_points(canvas, xs, ys, color, thickness)


def fill_circle(canvas, cx, cy, r, color):
    H, W = canvas.shape[:2]
    x0, x1 = max(cx - r, 0), min(cx + r + 1, W)
    y0, y1 = max(cy - r, 0), min(cy + r + 1, H)
    if x0 >= x1 or y0 >= y1:
        return
    yy, xx = np.mgrid[y0:y1, x0:x1]
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    canvas[y0:y1, x0:x1][mask] = color


def text(canvas, x, y, s, color, scale=1):
    """Draw ``s`` with its top-left corner at (x, y)."""
    mask = text_mask(s, scale)
    H, W = canvas.shape[:2]
    h, w = mask.shape
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, W), min(y + h, H)
    if x0 >= x1 or y0 >= y1:
        return
    sub = mask[y0 - y:y1 - y, x0 - x:x1 - x]
    canvas[y0:y1, x0:x1][sub] = color


def blit(canvas, src, x, y):
    H, W = canvas.shape[:2]
    h, w = src.shape[:2]
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, W), min(y + h, H)
    if x0 < x1 and y0 < y1:
        canvas[y0:y1, x0:x1] = src[y0 - y:y1 - y, x0 - x:x1 - x]

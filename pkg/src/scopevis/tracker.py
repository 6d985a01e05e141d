"""Target-marker tracking by normalized cross-correlation template matching."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _backend
from .errors import GeometryError, InputError
from .frame_io import Frame, to_gray


class TrackStatus(str, enum.Enum):
    LOCKED = "LOCKED"
    REACQUIRED = "REACQUIRED"
    LOST = "LOST"


@dataclass(frozen=True, eq=False)
class Template:
    """Marker reference patch.

    ``anchor`` is the marker center inside the patch in pixel-center
    coordinates; it defaults to ``((w - 1) / 2, (h - 1) / 2)``.
    """

    patch: Frame
    anchor: tuple[float, float] | None = None

    def __post_init__(self):
        patch = to_gray(self.patch)
        object.__setattr__(self, "patch", patch)
        if patch.width < 3 or patch.height < 3:
            raise GeometryError(f"template must be at least 3x3, got {patch.width}x{patch.height}")
        if int(patch.planes[0].min()) == int(patch.planes[0].max()):
            raise GeometryError("template has zero variance")
        if self.anchor is None:
            object.__setattr__(self, "anchor", ((patch.width - 1) / 2, (patch.height - 1) / 2))

    @classmethod
    def from_array(cls, data, anchor=None) -> "Template":
        return cls(Frame.gray(np.asarray(data, dtype=np.uint8)), anchor)

    @classmethod
    def from_file(cls, path, anchor=None) -> "Template":
        from PIL import Image

        with Image.open(path) as im:
            data = np.array(im.convert("L"))
        return cls.from_array(data, anchor)

    @property
    def array(self) -> np.ndarray:
        return self.patch.planes[0]

    @property
    def size(self) -> tuple[int, int]:
        return self.patch.width, self.patch.height


@dataclass(frozen=True)
class TrackPoint:
    frame_index: int
    center: tuple[float, float]
    score: float
    status: TrackStatus

    @property
    def x(self) -> float:
        return self.center[0]

    @property
    def y(self) -> float:
        return self.center[1]


@dataclass(frozen=True)
class TrackerConfig:
    lock_threshold: float = 0.55
    search_radius_px: int = 48

    def __post_init__(self):
        if not 0 < self.lock_threshold <= 1:
            raise InputError(f"lock_threshold must lie in (0, 1], got {self.lock_threshold}")
        if self.search_radius_px <= 0:
            raise InputError(f"search_radius_px must be positive, got {self.search_radius_px}")


@dataclass(frozen=True)
class MatchResult:
    peak: tuple[int, int]           # integer argmax placement (top-left x, y)
    position: tuple[float, float]   # sub-pixel refined placement
    score: float
    map_shape: tuple[int, int]      # (rows, cols) of the score map

    def center(self, template: Template) -> tuple[float, float]:
        ax, ay = template.anchor
        return self.position[0] + ax, self.position[1] + ay


def score_map(image: np.ndarray, template: np.ndarray, u0: int = 0, v0: int = 0,
              nu: int | None = None, nv: int | None = None) -> np.ndarray:
    """NCC scores for placements with top-left in ``[u0, u0+nu) x [v0, v0+nv)``."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    template = np.ascontiguousarray(template, dtype=np.uint8)
    th, tw = template.shape
    if nu is None:
        nu = image.shape[1] - tw + 1 - u0
    if nv is None:
        nv = image.shape[0] - th + 1 - v0
    if nu <= 0 or nv <= 0 or u0 < 0 or v0 < 0 or u0 + nu + tw - 1 > image.shape[1] or v0 + nv + th - 1 > image.shape[0]:
        raise GeometryError("no valid template placement inside the search region")
    return _backend.ncc_map(image, template, int(u0), int(v0), int(nu), int(nv))


def _parabolic(sm: float, s0: float, sp: float) -> float:
    denom = sm - 2.0 * s0 + sp
    if denom >= 0.0:
        return 0.0
    return min(0.5, max(-0.5, 0.5 * (sm - sp) / denom))


def match_template(image: Frame, template: Template, search=None) -> MatchResult:
    """Best NCC placement of ``template`` inside ``image``.

    ``search`` is an image rectangle ``(x, y, w, h)`` that the template must fit
    in entirely; it is clipped to the frame. The integer argmax prefers the
    smallest (y, x) on ties and is refined per axis by a 3-point parabola.
    """
    gray = to_gray(image).planes[0] if isinstance(image, Frame) else np.asarray(image, np.uint8)
    th, tw = template.array.shape
    if search is None:
        x0, y0, x1, y1 = 0, 0, gray.shape[1], gray.shape[0]
    else:
        sx, sy, sw, sh = (int(v) for v in search)
        x0, y0 = max(sx, 0), max(sy, 0)
        x1, y1 = min(sx + sw, gray.shape[1]), min(sy + sh, gray.shape[0])
    nu, nv = x1 - x0 - tw + 1, y1 - y0 - th + 1
    if nu <= 0 or nv <= 0:
        raise GeometryError(
            f"search region {x1 - x0}x{y1 - y0} cannot hold a {tw}x{th} template placement"
        )
    scores = score_map(gray, template.array, x0, y0, nu, nv)
    flat = int(np.argmax(scores))
    py, px = divmod(flat, nu)
    best = float(scores[py, px])
    fx = _parabolic(scores[py, px - 1], best, scores[py, px + 1]) if 0 < px < nu - 1 else 0.0
    fy = _parabolic(scores[py - 1, px], best, scores[py + 1, px]) if 0 < py < nv - 1 else 0.0
    return MatchResult((x0 + px, y0 + py), (x0 + px + fx, y0 + py + fy), best, (nv, nu))


def _window(center, template: Template, radius: int):
    ax, ay = template.anchor
    cx = int(math.floor(center[0] - ax + 0.5))
    cy = int(math.floor(center[1] - ay + 0.5))
    tw, th = template.size
    return (cx - radius, cy - radius, 2 * radius + tw, 2 * radius + th)


def track_sequence(frames: Iterable[Frame], template: Template, cfg: TrackerConfig | None = None) -> list[TrackPoint]:
    """Track the marker through ``frames``.

    Frame 0 is searched in full; later frames search a window around the
    previous center and fall back to a full-frame search when the windowed
    score drops under ``cfg.lock_threshold``. After a LOST frame the next
    frame is searched in full, and a recovered lock reports REACQUIRED.
    """
    cfg = cfg or TrackerConfig()
    points: list[TrackPoint] = []
    prev = None
    for i, frame in enumerate(frames):
        gray = to_gray(frame)
        if prev is None:
            res = match_template(gray, template)
            center = res.center(template)
            status = TrackStatus.LOCKED if res.score >= cfg.lock_threshold else TrackStatus.LOST
        elif points[-1].status is TrackStatus.LOST:
            res = match_template(gray, template)
            if res.score >= cfg.lock_threshold:
                center, status = res.center(template), TrackStatus.REACQUIRED
            else:
                center, status = prev, TrackStatus.LOST
        else:
            res = match_template(gray, template, _window(prev, template, cfg.search_radius_px))
            if res.score >= cfg.lock_threshold:
                center, status = res.center(template), TrackStatus.LOCKED
            else:
                res = match_template(gray, template)
                if res.score >= cfg.lock_threshold:
                    center, status = res.center(template), TrackStatus.REACQUIRED
                else:
                    center, status = prev, TrackStatus.LOST
        center = (min(max(center[0], 0.0), frame.width - 1.0), min(max(center[1], 0.0), frame.height - 1.0))
        points.append(TrackPoint(i, center, res.score, status))
        prev = center
    return points


__all__ = [
    "MatchResult", "Template", "TrackPoint", "TrackStatus", "TrackerConfig",
    "match_template", "score_map", "track_sequence",
]

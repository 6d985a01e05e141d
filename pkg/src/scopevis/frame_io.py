"""Uncompressed video I/O: YUV4MPEG2 streams and numbered image sequences.

Frames are immutable: plane arrays are marked read-only on construction.
"""
from __future__ import annotations

import enum
import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import BinaryIO, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionError,
    FormatError,
    InputError,
    MissingFrameError,
    TruncationError,
    UnsupportedFormatError,
)

Y4M_SIGNATURE = b"YUV4MPEG2"
FRAME_MARKER = b"FRAME"
_MAX_HEADER = 4096


class PixelFormat(str, enum.Enum):
    GRAY8 = "GRAY8"
    RGB24 = "RGB24"
    YUV420 = "YUV420"


def plane_shapes(fmt: PixelFormat, width: int, height: int) -> list[tuple[int, ...]]:
    if fmt is PixelFormat.GRAY8:
        return [(height, width)]
    if fmt is PixelFormat.RGB24:
        return [(height, width, 3)]
    return [(height, width), (height // 2, width // 2), (height // 2, width // 2)]


def frame_nbytes(fmt: PixelFormat, width: int, height: int) -> int:
    return sum(int(np.prod(s)) for s in plane_shapes(fmt, width, height))


@dataclass(frozen=True, eq=False)
class Frame:
    width: int
    height: int
    pixel_format: PixelFormat
    planes: tuple[np.ndarray, ...]
    index: int = 0
    pts_seconds: float = 0.0

    def __post_init__(self):
        fmt = PixelFormat(self.pixel_format)
        object.__setattr__(self, "pixel_format", fmt)
        if self.width <= 0 or self.height <= 0:
            raise DimensionError(f"non-positive size {self.width}x{self.height}", self.index)
        if fmt is PixelFormat.YUV420 and (self.width % 2 or self.height % 2):
            raise DimensionError(f"YUV420 needs even dimensions, got {self.width}x{self.height}", self.index)
        shapes = plane_shapes(fmt, self.width, self.height)
        if len(self.planes) != len(shapes):
            raise DimensionError(f"{fmt.value} expects {len(shapes)} planes, got {len(self.planes)}", self.index)
        planes = []
        for plane, shape in zip(self.planes, shapes):
            arr = np.asarray(plane)
            if arr.shape != shape:
                raise DimensionError(f"plane shape {arr.shape} != expected {shape}", self.index)
            if arr.dtype != np.uint8:
                if arr.size and (arr.min() < 0 or arr.max() > 255):
                    raise DimensionError("sample values outside 0..255", self.index)
                arr = arr.astype(np.uint8)
            arr = np.ascontiguousarray(arr)
            if arr.flags.writeable:
                arr = arr.copy()
                arr.flags.writeable = False
            planes.append(arr)
        object.__setattr__(self, "planes", tuple(planes))

    @classmethod
    def gray(cls, data, index=0, pts_seconds=0.0) -> "Frame":
        data = np.asarray(data)
        return cls(data.shape[1], data.shape[0], PixelFormat.GRAY8, (data,), index, pts_seconds)

    @classmethod
    def rgb(cls, data, index=0, pts_seconds=0.0) -> "Frame":
        data = np.asarray(data)
        return cls(data.shape[1], data.shape[0], PixelFormat.RGB24, (data,), index, pts_seconds)

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def with_timing(self, index: int, pts_seconds: float) -> "Frame":
        return Frame(self.width, self.height, self.pixel_format, self.planes, index, pts_seconds)

    def tobytes(self) -> bytes:
        return b"".join(p.tobytes() for p in self.planes)

    def same_pixels(self, other: "Frame") -> bool:
        return (
            self.size == other.size
            and self.pixel_format is other.pixel_format
            and all(np.array_equal(a, b) for a, b in zip(self.planes, other.planes))
        )


@dataclass(frozen=True)
class ClipHeader:
    width: int
    height: int
    fps_num: int
    fps_den: int = 1
    pixel_format: PixelFormat = PixelFormat.YUV420
    frame_count: int | None = None
    extra_tags: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pixel_format", PixelFormat(self.pixel_format))
        if self.width <= 0 or self.height <= 0:
            raise DimensionError(f"non-positive clip size {self.width}x{self.height}")
        if self.fps_num <= 0 or self.fps_den <= 0:
            raise InputError(f"invalid frame rate {self.fps_num}:{self.fps_den}")

    @property
    def fps(self) -> float:
        return self.fps_num / self.fps_den

    @property
    def frame_center(self) -> tuple[float, float]:
        return self.width / 2, self.height / 2

    def pts(self, index: int) -> float:
        return index * self.fps_den / self.fps_num

    def check_frame(self, frame: Frame, index: int) -> None:
        if frame.size != (self.width, self.height) or frame.pixel_format is not self.pixel_format:
            raise DimensionError(
                f"{frame.width}x{frame.height} {frame.pixel_format.value} does not match header "
                f"{self.width}x{self.height} {self.pixel_format.value}",
                index,
            )


def fps_rational(fps: float | int | str | Fraction) -> tuple[int, int]:
    frac = Fraction(str(fps)).limit_denominator(1001000)
    return frac.numerator, frac.denominator


# --------------------------------------------------------------------------- Y4M

_COLORSPACES = {
    "420jpeg": PixelFormat.YUV420,
    "420": PixelFormat.YUV420,
    "mono": PixelFormat.GRAY8,
}


def _parse_header(line: bytes) -> ClipHeader:
    text = line.decode("ascii", errors="replace")
    tokens = text.split(" ")
    width = height = None
    fps = None
    fmt = PixelFormat.YUV420
    extra = []
    offset = len(tokens[0]) + 1
    for tok in tokens[1:]:
        if not tok:
            raise FormatError("empty header tag", offset)
        key, val = tok[0], tok[1:]
        try:
            if key == "W":
                width = int(val)
            elif key == "H":
                height = int(val)
            elif key == "F":
                num, den = val.split(":")
                fps = (int(num), int(den))
            elif key == "I":
                if val != "p":
                    raise UnsupportedFormatError(f"interlacing mode I{val} not supported (progressive only)")
            elif key == "C":
                if val not in _COLORSPACES:
                    raise UnsupportedFormatError(f"colorspace C{val} not supported")
                fmt = _COLORSPACES[val]
            elif key in "AX":
                extra.append(tok)
            else:
                raise FormatError(f"unknown header tag {tok!r}", offset)
        except ValueError:
            raise FormatError(f"malformed header tag {tok!r}", offset) from None
        offset += len(tok) + 1
    if width is None or height is None or fps is None:
        raise FormatError("header is missing one of the W, H, F tags", 0)
    if fps[0] <= 0 or fps[1] <= 0:
        raise FormatError(f"invalid frame rate F{fps[0]}:{fps[1]}", 0)
    return ClipHeader(width, height, fps[0], fps[1], fmt, None, tuple(extra))


def _read_line(stream: BinaryIO, limit: int = _MAX_HEADER) -> bytes:
    buf = bytearray()
    while len(buf) <= limit:
        ch = stream.read(1)
        if not ch:
            break
        if ch == b"\n":
            return bytes(buf)
        buf += ch
    raise EOFError(bytes(buf))


def read_y4m(stream: BinaryIO) -> tuple[ClipHeader, Iterator[Frame]]:
    """Parse a Y4M stream.

    The header is parsed eagerly; frames are decoded lazily by the returned
    iterator, which raises ``TruncationError`` on a short payload.
    """
    try:
        line = _read_line(stream)
    except EOFError:
        raise FormatError("stream ended inside the signature line", 0) from None
    if not line.startswith(Y4M_SIGNATURE) or (len(line) > len(Y4M_SIGNATURE) and line[9:10] != b" "):
        bad = next((i for i, (a, b) in enumerate(zip(line, Y4M_SIGNATURE)) if a != b), min(len(line), 9))
        raise FormatError("missing YUV4MPEG2 signature", bad)
    header = _parse_header(line)
    offset0 = len(line) + 1
    return header, _iter_frames(stream, header, offset0)


def _iter_frames(stream: BinaryIO, header: ClipHeader, offset: int) -> Iterator[Frame]:
    shapes = plane_shapes(header.pixel_format, header.width, header.height)
    nbytes = frame_nbytes(header.pixel_format, header.width, header.height)
    index = 0
    while True:
        try:
            line = _read_line(stream, 1024)
        except EOFError as exc:
            partial = exc.args[0]
            if not partial:
                return
            raise TruncationError(index, nbytes, 0) from None
        if not (line == FRAME_MARKER or line.startswith(FRAME_MARKER + b" ")):
            raise FormatError(f"expected FRAME marker for frame {index}", offset)
        offset += len(line) + 1
        payload = stream.read(nbytes)
        if len(payload) < nbytes:
            raise TruncationError(index, nbytes, len(payload))
        offset += nbytes
        buf = np.frombuffer(payload, dtype=np.uint8)
        planes, pos = [], 0
        for shape in shapes:
            size = int(np.prod(shape))
            planes.append(buf[pos:pos + size].reshape(shape))
            pos += size
        yield Frame(header.width, header.height, header.pixel_format, tuple(planes), index, header.pts(index))
        index += 1


def header_line(header: ClipHeader) -> bytes:
    if header.pixel_format is PixelFormat.YUV420:
        cs = "C420jpeg"
    elif header.pixel_format is PixelFormat.GRAY8:
        cs = "Cmono"
    else:
        raise UnsupportedFormatError("Y4M cannot carry RGB24 frames; convert to YUV420 first")
    tags = [f"W{header.width}", f"H{header.height}", f"F{header.fps_num}:{header.fps_den}", "Ip", "A1:1", cs]
    return ("YUV4MPEG2 " + " ".join(tags) + "\n").encode("ascii")


def write_y4m(header: ClipHeader, frames, sink: BinaryIO) -> int:
    head = header_line(header)
    sink.write(head)
    count = len(head)
    for i, frame in enumerate(frames):
        header.check_frame(frame, i)
        sink.write(b"FRAME\n")
        for plane in frame.planes:
            sink.write(plane.tobytes())
        count += 6 + frame_nbytes(frame.pixel_format, frame.width, frame.height)
    return count


def open_y4m(path) -> tuple[ClipHeader, Iterator[Frame]]:
    """Open a Y4M file; the file closes once the frame iterator is exhausted."""
    fh = open(path, "rb")
    try:
        header, frames = read_y4m(fh)
    except Exception:
        fh.close()
        raise

    def gen():
        with fh:
            yield from frames

    return header, gen()


def save_y4m(path, header: ClipHeader, frames) -> int:
    with open(path, "wb") as fh:
        return write_y4m(header, frames, fh)


# ------------------------------------------------------------ image sequences

def _pattern_regex(pattern: str) -> tuple[re.Pattern, int]:
    m = re.search(r"%0?(\d*)d", pattern)
    if m is None:
        raise InputError(f"image pattern {pattern!r} has no %d index field")
    width = int(m.group(1) or 0)
    rx = re.escape(pattern[:m.start()]) + r"(\d+)" + re.escape(pattern[m.end():])
    return re.compile("^" + rx + "$"), width


def read_image_sequence(directory, pattern: str = "%06d.png", meta: str | os.PathLike | dict = "frames.json"):
    """Load ``pattern``-numbered images (contiguous from 0) plus fps metadata.

    ``meta`` is either a dict or a path (relative paths resolve inside
    ``directory``) to a JSON object with ``fps`` and optional ``start_time``.
    """
    from PIL import Image

    directory = Path(directory)
    if isinstance(meta, dict):
        info = meta
    else:
        meta_path = Path(meta)
        if not meta_path.is_absolute():
            meta_path = directory / meta_path
        try:
            info = json.loads(meta_path.read_text())
        except FileNotFoundError:
            raise InputError(f"missing sidecar metadata {meta_path}") from None
    if not isinstance(info, dict) or not isinstance(info.get("fps"), (int, float)) or info["fps"] <= 0:
        raise InputError("sidecar metadata needs a positive numeric 'fps'")
    start = float(info.get("start_time", 0.0))

    rx, _ = _pattern_regex(pattern)
    found = {}
    for p in directory.iterdir():
        m = rx.match(p.name)
        if m:
            found[int(m.group(1))] = p
    if not found:
        raise InputError(f"no files matching {pattern!r} in {directory}")
    n = max(found) + 1
    for i in range(n):
        if i not in found:
            raise MissingFrameError(i, directory / (pattern % i))

    fps_num, fps_den = fps_rational(info["fps"])
    frames = []
    fmt = None
    for i in range(n):
        with Image.open(found[i]) as im:
            if im.mode == "L":
                frame = Frame.gray(np.array(im), i)
            elif im.mode in ("RGB", "RGBA", "P"):
                frame = Frame.rgb(np.array(im.convert("RGB")), i)
            else:
                raise UnsupportedFormatError(f"{found[i].name}: image mode {im.mode} is not 8-bit gray or RGB")
        frame = frame.with_timing(i, start + i * fps_den / fps_num)
        if fmt is None:
            fmt = (frame.width, frame.height, frame.pixel_format)
        elif (frame.width, frame.height, frame.pixel_format) != fmt:
            raise DimensionError(f"{found[i].name} differs from frame 0 in size or format", i)
        frames.append(frame)
    header = ClipHeader(fmt[0], fmt[1], fps_num, fps_den, fmt[2], n)
    return header, frames


def write_image_sequence(directory, header: ClipHeader, frames, pattern: str = "%06d.png") -> int:
    from PIL import Image

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    count = 0
    for i, frame in enumerate(frames):
        header_size = (header.width, header.height)
        if frame.size != header_size:
            raise DimensionError(f"{frame.width}x{frame.height} does not match header", i)
        if frame.pixel_format is PixelFormat.YUV420:
            frame = to_rgb(frame)
        mode = "L" if frame.pixel_format is PixelFormat.GRAY8 else "RGB"
        Image.fromarray(np.asarray(frame.planes[0]), mode=mode).save(directory / (pattern % i), optimize=False)
        count += 1
    meta = {"fps": header.fps_num / header.fps_den}
    (directory / "frames.json").write_text(json.dumps(meta) + "\n")
    return count


# ----------------------------------------------------------------- conversion

def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.int32)
    return ((77 * rgb[..., 0] + 150 * rgb[..., 1] + 29 * rgb[..., 2] + 128) >> 8).astype(np.uint8)


def to_gray(frame: Frame) -> Frame:
    if frame.pixel_format is PixelFormat.GRAY8:
        return frame
    if frame.pixel_format is PixelFormat.YUV420:
        luma = frame.planes[0]
    else:
        luma = rgb_to_luma(frame.planes[0])
    return Frame(frame.width, frame.height, PixelFormat.GRAY8, (luma,), frame.index, frame.pts_seconds)


def to_rgb(frame: Frame) -> Frame:
    """Full-range BT.601 integer conversion to RGB24."""
    fmt = frame.pixel_format
    if fmt is PixelFormat.RGB24:
        return frame
    if fmt is PixelFormat.GRAY8:
        y = frame.planes[0]
        rgb = np.repeat(y[:, :, None], 3, axis=2)
    else:
        y = frame.planes[0].astype(np.int32)
        cb = np.repeat(np.repeat(frame.planes[1].astype(np.int32) - 128, 2, 0), 2, 1)
        cr = np.repeat(np.repeat(frame.planes[2].astype(np.int32) - 128, 2, 0), 2, 1)
        r = y + ((359 * cr + 128) >> 8)
        g = y - ((88 * cb + 183 * cr + 128) >> 8)
        b = y + ((454 * cb + 128) >> 8)
        rgb = np.clip(np.stack([r, g, b], axis=2), 0, 255).astype(np.uint8)
    return Frame(frame.width, frame.height, PixelFormat.RGB24, (rgb,), frame.index, frame.pts_seconds)


def to_yuv420(frame: Frame) -> Frame:
    """Full-range BT.601 integer conversion to YUV420 with 2x2 chroma averaging.

    Luma uses the same weights as ``to_gray`` so gray content survives exactly.
    """
    fmt = frame.pixel_format
    if fmt is PixelFormat.YUV420:
        return frame
    if frame.width % 2 or frame.height % 2:
        raise DimensionError(f"YUV420 needs even dimensions, got {frame.width}x{frame.height}", frame.index)
    if fmt is PixelFormat.GRAY8:
        y = frame.planes[0]
        c = np.full((frame.height // 2, frame.width // 2), 128, np.uint8)
        return Frame(frame.width, frame.height, PixelFormat.YUV420, (y, c, c), frame.index, frame.pts_seconds)
    rgb = frame.planes[0].astype(np.int32)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = (77 * r + 150 * g + 29 * b + 128) >> 8
    cb = ((-43 * r - 85 * g + 128 * b + 128) >> 8) + 128
    cr = ((128 * r - 107 * g - 21 * b + 128) >> 8) + 128

    def sub(p):
        s = p[0::2, 0::2] + p[1::2, 0::2] + p[0::2, 1::2] + p[1::2, 1::2]
        return np.clip((s + 2) >> 2, 0, 255).astype(np.uint8)

    return Frame(
        frame.width, frame.height, PixelFormat.YUV420,
        (np.clip(y, 0, 255).astype(np.uint8), sub(cb), sub(cr)),
        frame.index, frame.pts_seconds,
    )


def convert(frame: Frame, fmt: PixelFormat) -> Frame:
    fmt = PixelFormat(fmt)
    if fmt is PixelFormat.GRAY8:
        return to_gray(frame)
    if fmt is PixelFormat.RGB24:
        return to_rgb(frame)
    return to_yuv420(frame)


def load_clip(path) -> tuple[ClipHeader, Sequence[Frame] | Iterator[Frame]]:
    """Open a clip by path: ``*.y4m`` files or image-sequence directories."""
    path = Path(path)
    if path.is_dir():
        return read_image_sequence(path)
    return open_y4m(path)


def save_clip(path, header: ClipHeader, frames) -> int:
    """Write a clip; ``*.y4m`` paths get YUV420/mono Y4M, anything else a PNG directory."""
    path = Path(path)
    if path.suffix.lower() == ".y4m":
        if header.pixel_format is PixelFormat.RGB24:
            header = ClipHeader(header.width, header.height, header.fps_num, header.fps_den,
                                PixelFormat.YUV420, header.frame_count)
        return save_y4m(path, header, (convert(f, header.pixel_format) for f in frames))
    return write_image_sequence(path, header, frames)

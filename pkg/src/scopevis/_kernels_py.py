"""Pure-Python/numpy fallback for the compiled kernels in ``_kernels.pyx``.

Integer sums are exact in int64, and the final float expression matches the
compiled kernel operation for operation, so both backends agree bit for bit.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def ncc_map(image, templ, u0, v0, nu, nv):
    th, tw = templ.shape
    n = th * tw
    t = templ.astype(np.int64)
    st = int(t.sum())
    dt = n * int((t * t).sum()) - st * st
    out = np.zeros((nv, nu), dtype=np.float64)
    if dt == 0:
        return out

    region = image[v0:v0 + nv + th - 1, u0:u0 + nu + tw - 1].astype(np.int64)
    # window sums of I and I^2 from integral images
    ii = np.zeros((region.shape[0] + 1, region.shape[1] + 1), dtype=np.int64)
    ii2 = np.zeros_like(ii)
    ii[1:, 1:] = region.cumsum(0).cumsum(1)
    ii2[1:, 1:] = (region * region).cumsum(0).cumsum(1)

    def box(s):
        return s[th:th + nv, tw:tw + nu] - s[:nv, tw:tw + nu] - s[th:th + nv, :nu] + s[:nv, :nu]

    si = box(ii)
    sii = box(ii2)
    sti = np.zeros((nv, nu), dtype=np.int64)
    for r in range(th):
        windows = sliding_window_view(region[r:r + nv], tw, axis=1)[:, :nu]
        sti += windows @ t[r]

    di = n * sii - si * si
    num = n * sti - st * si
    ok = di != 0
    score = num[ok].astype(np.float64) / np.sqrt(float(dt) * di[ok].astype(np.float64))
    out[ok] = np.clip(score, -1.0, 1.0)
    return out


def _stamp(canvas, x, y, color, lo, hi):
    h, w = canvas.shape[:2]
    y0, y1 = max(y + lo, 0), min(y + hi + 1, h)
    x0, x1 = max(x + lo, 0), min(x + hi + 1, w)
    if y0 < y1 and x0 < x1:
        canvas[y0:y1, x0:x1] = color


def draw_polyline(canvas, xs, ys, color, thickness=1, dash_on=0, dash_off=0, phase=0):
    color = tuple(int(c) for c in color[:3])
    lo = -((thickness - 1) // 2)
    hi = thickness // 2
    period = dash_on + dash_off
    counter = int(phase)
    xs = [int(v) for v in xs]
    ys = [int(v) for v in ys]
    if not xs:
        return counter
    if len(xs) == 1:
        if dash_on == 0 or counter % period < dash_on:
            _stamp(canvas, xs[0], ys[0], color, lo, hi)
        return counter + 1

    first = True
    for k in range(len(xs) - 1):
        x, y, x1, y1 = xs[k], ys[k], xs[k + 1], ys[k + 1]
        dx = abs(x1 - x)
        dy = -abs(y1 - y)
        sx = 1 if x < x1 else -1
        sy = 1 if y < y1 else -1
        err = dx + dy
        while True:
            if first:
                if dash_on == 0 or counter % period < dash_on:
                    _stamp(canvas, x, y, color, lo, hi)
                counter += 1
            first = True
            if x == x1 and y == y1:
                break
            e2 = 2 * err
            if e2 >= dy:
                err += dy
                x += sx
            if e2 <= dx:
                err += dx
                y += sy
        first = False
    return counter

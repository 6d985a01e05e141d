# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: NCC score maps and polyline rasterization.

Both functions mirror ``_kernels_py`` exactly, including the order of the
floating point operations, so either backend yields bit-identical output.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def ncc_map(const unsigned char[:, ::1] image, const unsigned char[:, ::1] templ,
            Py_ssize_t u0, Py_ssize_t v0, Py_ssize_t nu, Py_ssize_t nv):
    cdef Py_ssize_t th = templ.shape[0], tw = templ.shape[1]
    cdef Py_ssize_t rh = nv + th - 1, rw = nu + tw - 1
    cdef long long n = th * tw
    cdef long long st = 0, stt = 0
    cdef Py_ssize_t r, c, u, v
    cdef long long t, p, si, sii, num, di, dt
    cdef long long sti
    cdef int acc
    cdef const unsigned char* irow
    cdef const unsigned char* trow
    cdef double score
    out = np.zeros((nv, nu), dtype=np.float64)
    cdef double[:, ::1] res = out

    for r in range(th):
        for c in range(tw):
            t = templ[r, c]
            st += t
            stt += t * t
    dt = n * stt - st * st
    if dt == 0:
        return out

    # integral images of the search region for window sums of I and I^2
    ii_arr = np.zeros((rh + 1, rw + 1), dtype=np.int64)
    ii2_arr = np.zeros((rh + 1, rw + 1), dtype=np.int64)
    cdef long long[:, ::1] ii = ii_arr
    cdef long long[:, ::1] ii2 = ii2_arr
    cdef long long rs, rs2
    for r in range(rh):
        rs = 0
        rs2 = 0
        for c in range(rw):
            p = image[v0 + r, u0 + c]
            rs += p
            rs2 += p * p
            ii[r + 1, c + 1] = ii[r, c + 1] + rs
            ii2[r + 1, c + 1] = ii2[r, c + 1] + rs2

    with nogil:
        for v in range(nv):
            for u in range(nu):
                si = ii[v + th, u + tw] - ii[v, u + tw] - ii[v + th, u] + ii[v, u]
                sii = ii2[v + th, u + tw] - ii2[v, u + tw] - ii2[v + th, u] + ii2[v, u]
                di = n * sii - si * si
                if di == 0:
                    continue
                sti = 0
                for r in range(th):
                    irow = &image[v0 + v + r, u0 + u]
                    trow = &templ[r, 0]
                    # a row sum fits in int: tw * 255 * 255 < 2**31 for tw < 33000
                    acc = 0
                    for c in range(tw):
                        acc = acc + irow[c] * trow[c]
                    sti += acc
                num = n * sti - st * si
                score = <double>num / sqrt(<double>dt * <double>di)
                if score > 1.0:
                    score = 1.0
                elif score < -1.0:
                    score = -1.0
                res[v, u] = score
    return out


cdef inline void _stamp(unsigned char[:, :, ::1] canvas, Py_ssize_t x, Py_ssize_t y,
                        unsigned char cr, unsigned char cg, unsigned char cb,
                        Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t h = canvas.shape[0], w = canvas.shape[1]
    cdef Py_ssize_t yy, xx
    for yy in range(y + lo, y + hi + 1):
        if yy < 0 or yy >= h:
            continue
        for xx in range(x + lo, x + hi + 1):
            if xx < 0 or xx >= w:
                continue
            canvas[yy, xx, 0] = cr
            canvas[yy, xx, 1] = cg
            canvas[yy, xx, 2] = cb


def draw_polyline(unsigned char[:, :, ::1] canvas, const long long[::1] xs,
                  const long long[::1] ys, color, int thickness=1,
                  int dash_on=0, int dash_off=0, long long phase=0):
    cdef unsigned char cr = color[0], cg = color[1], cb = color[2]
    cdef Py_ssize_t lo = -((thickness - 1) // 2)
    cdef Py_ssize_t hi = thickness // 2
    cdef long long period = dash_on + dash_off
    cdef long long counter = phase
    cdef Py_ssize_t npts = xs.shape[0], k
    cdef long long x, y, x1, y1, dx, dy, sx, sy, err, e2
    cdef bint first = True
    if npts == 0:
        return counter
    if npts == 1:
        if dash_on == 0 or counter % period < dash_on:
            _stamp(canvas, xs[0], ys[0], cr, cg, cb, lo, hi)
        return counter + 1
    for k in range(npts - 1):
        x = xs[k]
        y = ys[k]
        x1 = xs[k + 1]
        y1 = ys[k + 1]
        dx = x1 - x if x1 >= x else x - x1
        dy = -(y1 - y if y1 >= y else y - y1)
        sx = 1 if x < x1 else -1
        sy = 1 if y < y1 else -1
        err = dx + dy
        while True:
            if first:
                if dash_on == 0 or counter % period < dash_on:
                    _stamp(canvas, x, y, cr, cg, cb, lo, hi)
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
        # the shared vertex was already drawn as this segment's last pixel
        first = False
    return counter

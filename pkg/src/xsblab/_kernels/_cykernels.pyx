# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pybackend: identical segmentation and quadrature logic,
plain C loops instead of per-node NumPy array work.  Keep the two in sync;
the agreement tests compare them to rounding."""

import numpy as np

from libc.math cimport copysign, exp, fabs, log1p, pow as cpow, sqrt
from libc.stdlib cimport free, malloc, qsort

cdef int PEAK_SLOW_LEVELS = 6
cdef double PEAK_GROWTH = 4.0
cdef double KINK_GROWTH = 4.0
cdef int MAX_LEVELS = 96
cdef double DEDUPE_REL = 1e-13


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double da = (<const double*> a)[0]
    cdef double db = (<const double*> b)[0]
    if da < db:
        return -1
    if da > db:
        return 1
    return 0


cdef Py_ssize_t _build_points(double lo, double hi,
                              double* pp, double* pw, Py_ssize_t npk,
                              double* kp, double* kw, Py_ssize_t nkk,
                              double* buf, Py_ssize_t cap) noexcept nogil:
    cdef double span = hi - lo
    cdef double tol = span * DEDUPE_REL
    cdef Py_ssize_t cnt = 0, i, lvl, outc, lvl2
    cdef double d, p, k, r
    buf[cnt] = lo; cnt += 1
    buf[cnt] = hi; cnt += 1
    for i in range(nkk):
        k = kp[i]
        if k - lo < -2.0 * span or k - hi > 2.0 * span:
            continue
        if lo < k < hi and cnt < cap:
            buf[cnt] = k; cnt += 1
        d = kw[i]
        if d < tol:
            d = tol
        if d > span:
            d = span
        for lvl in range(MAX_LEVELS):
            p = k - d
            if lo < p < hi and cnt < cap:
                buf[cnt] = p; cnt += 1
            p = k + d
            if lo < p < hi and cnt < cap:
                buf[cnt] = p; cnt += 1
            if d > 2.0 * span:
                break
            d *= KINK_GROWTH
    for i in range(npk):
        r = pp[i]
        if r - lo < -2.0 * span or r - hi > 2.0 * span:
            continue
        if lo < r < hi and cnt < cap:
            buf[cnt] = r; cnt += 1
        d = pw[i]
        if d < tol:
            d = tol
        if d > span:
            d = span
        lvl2 = 0
        for lvl in range(MAX_LEVELS):
            p = r - d
            if lo < p < hi and cnt < cap:
                buf[cnt] = p; cnt += 1
            p = r + d
            if lo < p < hi and cnt < cap:
                buf[cnt] = p; cnt += 1
            if d > 2.0 * span:
                break
            d *= 2.0 if lvl2 < PEAK_SLOW_LEVELS else PEAK_GROWTH
            lvl2 += 1
    qsort(buf, cnt, sizeof(double), _cmp_double)
    outc = 1
    for i in range(1, cnt):
        if buf[i] - buf[outc - 1] > tol:
            buf[outc] = buf[i]
            outc += 1
    if outc == 1:
        buf[outc] = hi
        outc += 1
    return outc


def inner_sweep(double[::1] A, double[::1] B, double[::1] C,
                double lo, double hi,
                double[:, ::1] term_off, double[::1] term_slope,
                double[::1] term_pow, signed char[::1] term_kind,
                double b2, double[::1] glx, double[::1] glw):
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t m = term_off.shape[0]
    cdef Py_ssize_t g = glx.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double span = hi - lo
    cdef double inv_span = 1.0 / span
    cdef Py_ssize_t cap = 2 + (2 + m) * (2 * MAX_LEVELS + 2) + 8
    cdef double* buf = <double*> malloc(cap * sizeof(double))
    cdef double* kp = <double*> malloc((m if m > 0 else 1) * sizeof(double))
    cdef double* kw = <double*> malloc((m if m > 0 else 1) * sizeof(double))
    cdef double pp[2]
    cdef double pw[2]
    cdef Py_ssize_t i, j, seg, q, cnt, npk, nkk
    cdef int mode
    cdef double a, bq, cc, qa, qb, qc, scale, disc, sq, qq, r1, r2, dsl
    cdef double mid, half, x, w, num, v, av, pj, dval, acc, sl
    if buf == NULL or kp == NULL or kw == NULL:
        free(buf); free(kp); free(kw)
        raise MemoryError()
    with nogil:
        for i in range(n):
            a = A[i]; bq = B[i]; cc = C[i]
            qa = fabs(a) * span * span
            qb = fabs(bq) * span
            qc = fabs(cc)
            scale = qa
            if qb > scale: scale = qb
            if qc > scale: scale = qc
            if scale < 1e-300: scale = 1e-300
            npk = 0
            mode = 3
            r1 = 0.0; r2 = 0.0
            if qa > 1e-12 * scale:
                disc = bq * bq - 4.0 * a * cc
                if disc > 0.0:
                    mode = 0
                    sq = sqrt(disc)
                    if bq != 0.0:
                        qq = -0.5 * (bq + copysign(sq, bq))
                    else:
                        qq = 0.5 * sq
                    r1 = qq / a
                    r2 = cc / qq if qq != 0.0 else -r1
                    dsl = fabs(2.0 * a * r1 + bq)
                    pp[0] = r1; pw[0] = 1.0 / (dsl + sqrt(2.0 * fabs(a)) + inv_span)
                    dsl = fabs(2.0 * a * r2 + bq)
                    pp[1] = r2; pw[1] = 1.0 / (dsl + sqrt(2.0 * fabs(a)) + inv_span)
                    npk = 2
                else:
                    mode = 1
                    r1 = -bq / (2.0 * a)
                    r2 = -disc / (4.0 * a * a)
                    pp[0] = r1; pw[0] = 1.0 / (sqrt(2.0 * fabs(a)) + inv_span)
                    npk = 1
            elif qb > 1e-12 * scale:
                mode = 2
                r1 = -cc / bq
                pp[0] = r1; pw[0] = 1.0 / (fabs(bq) + inv_span)
                npk = 1
            nkk = 0
            for j in range(m):
                sl = term_slope[j]
                if sl != 0.0:
                    kp[nkk] = -term_off[j, i] / sl
                    kw[nkk] = 1.0 / (fabs(sl) + inv_span)
                    nkk += 1
            cnt = _build_points(lo, hi, pp, pw, npk, kp, kw, nkk, buf, cap)
            acc = 0.0
            for seg in range(cnt - 1):
                mid = 0.5 * (buf[seg + 1] + buf[seg])
                half = 0.5 * (buf[seg + 1] - buf[seg])
                for q in range(g):
                    x = mid + half * glx[q]
                    w = half * glw[q]
                    num = 1.0
                    for j in range(m):
                        v = term_off[j, i] + term_slope[j] * x
                        av = fabs(v)
                        if term_kind[j] == 0:
                            av += 1.0
                        pj = term_pow[j]
                        if pj != 0.0:
                            num *= cpow(av, pj)
                    if mode == 0:
                        dval = a * (x - r1) * (x - r2)
                    elif mode == 1:
                        dval = a * ((x - r1) * (x - r1) + r2)
                    elif mode == 2:
                        dval = bq * (x - r1)
                    else:
                        dval = cc
                    acc += w * num * exp(-b2 * log1p(fabs(dval)))
            out[i] = acc
    free(buf); free(kp); free(kw)
    return out_arr


def conv_counts(double[::1] xi1, double[::1] mu1,
                double[::1] xi2, double[::1] mu2,
                double[::1] xi_t, double[::1] tau_t,
                double N, double delta, double alpha, double beta):
    cdef Py_ssize_t n = xi1.shape[0]
    cdef Py_ssize_t nt = xi_t.shape[0]
    counts_arr = np.zeros(nt, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    sig_arr = np.empty(n)
    base_arr = np.empty(n)
    cdef double[::1] sig = sig_arr
    cdef double[::1] tau_base = base_arr
    cdef Py_ssize_t i, j
    cdef double hixi = N + delta
    cdef double xs, mod
    cdef long long cj
    with nogil:
        for i in range(n):
            sig[i] = xi1[i] + xi2[i]
            tau_base[i] = (alpha * xi1[i] * xi1[i] + beta * xi1[i] * xi1[i] * xi1[i] + mu1[i]
                           + alpha * xi2[i] * xi2[i] + beta * xi2[i] * xi2[i] * xi2[i] + mu2[i])
        for j in range(nt):
            cj = 0
            for i in range(n):
                xs = sig[i] - xi_t[j]
                if xs < N or xs > hixi:
                    continue
                mod = tau_base[i] - tau_t[j] - (alpha * xs * xs + beta * xs * xs * xs)
                if mod <= 1.0 and mod >= -1.0:
                    cj += 1
            counts[j] = cj
    return counts_arr

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: bump evaluation, theta sums, lattice box scans.

Mirrors backends._ref exactly; see that module for the reference semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log, cos, sin, pi

cnp.import_array()

NAME = "ext"

cdef double _EXP_CUTOFF = 50.0


def bump_profile(x):
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    cdef double[::1] xv = x
    out = np.zeros(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double t
    for i in range(xv.shape[0]):
        t = xv[i]
        if t > -1.0 and t < 1.0:
            ov[i] = exp(-1.0 / (1.0 - t * t))
    return out


def theta_sum_batch(xw, lsq):
    xw2 = np.ascontiguousarray(np.atleast_2d(np.asarray(xw, dtype=np.float64)))
    lsq2 = np.ascontiguousarray(np.asarray(lsq, dtype=np.float64))
    cdef double[:, ::1] X = xw2
    cdef double[:, ::1] L = lsq2
    cdef Py_ssize_t nb = X.shape[0], nl = L.shape[0], n = X.shape[1]
    out = np.zeros(nb)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, p, k
    cdef double q, acc
    for i in range(nb):
        acc = 0.0
        for p in range(nl):
            q = 0.0
            for k in range(n):
                q += X[i, k] * L[p, k]
            q *= pi
            if q <= _EXP_CUTOFF:
                acc += exp(-q)
        ov[i] = acc
    return out


def norm_char_scan(w, long a_lo, long a_hi, long b_lo, long b_hi,
                   double log_eps1, double norm_bound):
    wa = np.ascontiguousarray(np.asarray(w, dtype=np.float64))
    cdef double[:, ::1] W = wa
    cdef double w00 = W[0, 0], w01 = W[0, 1], w10 = W[1, 0], w11 = W[1, 1]
    cdef Py_ssize_t cap = 1024
    absn_buf = np.empty(cap)
    c_buf = np.empty(cap)
    cdef double[::1] av = absn_buf
    cdef double[::1] cv = c_buf
    cdef Py_ssize_t count = 0
    cdef long a, b
    cdef double e1, e2, nrm, absn, c
    for a in range(a_lo, a_hi + 1):
        for b in range(b_lo, b_hi + 1):
            e1 = w00 * a + w01 * b
            e2 = w10 * a + w11 * b
            nrm = e1 * e2
            absn = fabs(nrm)
            if absn <= 1e-12 or absn > norm_bound:
                continue
            c = (log(fabs(e1)) - 0.5 * log(absn)) / log_eps1
            if c < -1e-9 or c >= 1.0 - 1e-9:
                continue
            if count == cap:
                cap *= 2
                absn_buf = np.resize(absn_buf, cap)
                c_buf = np.resize(c_buf, cap)
                av = absn_buf
                cv = c_buf
            av[count] = absn
            cv[count] = c
            count += 1
    return absn_buf[:count].copy(), c_buf[:count].copy()


def power_char_sum(absn, c, s, double m):
    a = np.ascontiguousarray(np.asarray(absn, dtype=np.float64))
    cc = np.ascontiguousarray(np.asarray(c, dtype=np.float64))
    cdef double[::1] av = a
    cdef double[::1] cv = cc
    cdef double sr = s.real if isinstance(s, complex) else float(s)
    cdef double si = s.imag if isinstance(s, complex) else 0.0
    cdef Py_ssize_t i, n = av.shape[0]
    cdef double ln, mag, ph, re = 0.0, im = 0.0
    for i in range(n):
        ln = log(av[i])
        mag = exp(-sr * ln)
        ph = -si * ln - 2.0 * pi * m * cv[i]
        re += mag * cos(ph)
        im += mag * sin(ph)
    return complex(re, im)

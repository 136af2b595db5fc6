"""NumPy reference implementations of the hot numerical kernels.

Functionally identical to the compiled backend in _hot.pyx; selected at
import time when the extension is unavailable (or HMFTRACE_NO_EXT is set).
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_EXP_CUTOFF = 50.0


def bump_profile(x):
    """exp(-1/(1-x^2)) on |x| < 1, zero elsewhere (elementwise)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mask = np.abs(x) < 1.0
    t = x[mask]
    out[mask] = np.exp(-1.0 / (1.0 - t * t))
    return out


def theta_sum_batch(xw, lsq):
    """Sum of exp(-pi * xw . lsq_row) over lattice rows, for each weight row.

    xw: (B, n) positive weights; lsq: (P, n) squared embedded coordinates.
    Terms with exponent above the cutoff are dropped (they are < 2e-22).
    """
    xw = np.atleast_2d(np.asarray(xw, dtype=float))
    lsq = np.asarray(lsq, dtype=float)
    out = np.empty(xw.shape[0])
    chunk = max(1, int(4e6 // max(1, lsq.shape[0])))
    for i0 in range(0, xw.shape[0], chunk):
        q = np.pi * (xw[i0:i0 + chunk] @ lsq.T)
        np.clip(q, None, _EXP_CUTOFF + 1.0, out=q)
        out[i0:i0 + chunk] = np.exp(-q).sum(axis=1)
    return out


def norm_char_scan(w, a_lo, a_hi, b_lo, b_hi, log_eps1, norm_bound):
    """Scan integer coordinates (a, b) and keep multiplier-reduced lattice points.

    w is the 2x2 embedding matrix (rows = embeddings); a point is kept when
    both embeddings are nonzero, |N| = |e1*e2| <= norm_bound, and the
    log-reduction coordinate c = (log|e1| - log|N|/2)/log_eps1 lies in [0, 1).
    Returns (absN, c) arrays covering each multiplier orbit exactly once
    (both signs of the point are kept; they are distinct orbits).
    """
    absn_parts = []
    c_parts = []
    a_vals = np.arange(a_lo, a_hi + 1, dtype=float)
    b_vals = np.arange(b_lo, b_hi + 1, dtype=float)
    chunk = max(1, int(4e6 // max(1, b_vals.size)))
    for i0 in range(0, a_vals.size, chunk):
        a = a_vals[i0:i0 + chunk, None]
        b = b_vals[None, :]
        e1 = w[0, 0] * a + w[0, 1] * b
        e2 = w[1, 0] * a + w[1, 1] * b
        norm = e1 * e2
        absn = np.abs(norm)
        keep = (absn > 1e-12) & (absn <= norm_bound)
        e1k = np.abs(e1[keep])
        absnk = absn[keep]
        c = (np.log(e1k) - 0.5 * np.log(absnk)) / log_eps1
        # half-open cell with the shared 1e-9 boundary tolerance
        inside = (c >= -1e-9) & (c < 1.0 - 1e-9)
        absn_parts.append(absnk[inside])
        c_parts.append(c[inside])
    return np.concatenate(absn_parts), np.concatenate(c_parts)


def power_char_sum(absn, c, s, m):
    """Sum |N|^{-s} exp(-2*pi*i*m*c) over scanned points."""
    phase = np.exp(-2j * np.pi * m * c) if m else 1.0
    return complex(np.sum(absn ** (-s) * phase))

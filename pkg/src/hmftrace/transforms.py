"""Compactly supported product test functions and their transform chain.

psi is an amplitude times a product of scaled bumps exp(-1/(1-x^2)); the
chain Q -> g -> h and its inverses operate axis by axis, which the product
structure makes exact.  Q removes its square-root endpoint singularity by the
substitution t = w + tau^2, g evaluates Q at 4 sinh^2(u/2), and h is the
Fourier transform of g (a cosine transform per axis since g is even).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np

from .backends import bump_profile
from .errors import AccuracyError, DomainError
from .quadrature import adaptive_gk, composite_gl


@dataclass(frozen=True)
class TestFunction:
    """amplitude * prod_k phi((t_k - c_k)/w_k) with phi the standard bump.

    Support of axis k is [max(0, c_k - w_k), c_k + w_k]; when c_k < w_k the
    axis profile is multiplied by a smooth step so the support stays inside
    [0, inf) with the function C-infinity across 0.
    """

    __test__ = False  # keep pytest from collecting the class by its name

    centers: tuple[float, ...]
    widths: tuple[float, ...]
    amplitude: float = 1.0

    def __post_init__(self):
        if len(self.centers) != len(self.widths):
            raise DomainError("centers and widths must have equal length")
        if any(w <= 0 for w in self.widths):
            raise DomainError("widths must be positive")
        if any(c < 0 for c in self.centers):
            raise DomainError("centers must be nonnegative")

    @classmethod
    def default(cls, n: int = 2) -> "TestFunction":
        return cls(centers=(4.5,) * n, widths=(4.5,) * n, amplitude=1.0)

    @property
    def n(self) -> int:
        return len(self.centers)

    def lo(self, k: int) -> float:
        return max(0.0, self.centers[k] - self.widths[k])

    def hi(self, k: int) -> float:
        return self.centers[k] + self.widths[k]

    def axis_profile(self, k: int, t) -> np.ndarray:
        """Unit bump of axis k (amplitude excluded), vectorized."""
        t = np.asarray(t, dtype=float)
        x = (t - self.centers[k]) / self.widths[k]
        out = bump_profile(x.ravel()).reshape(x.shape)
        if self.centers[k] < self.widths[k]:
            out = out * _smooth_step(t / (0.25 * self.hi(k)))
        return out

    def __call__(self, t) -> np.ndarray:
        """psi on points of shape (..., n)."""
        t = np.asarray(t, dtype=float)
        vals = self.amplitude * np.ones(t.shape[:-1])
        for k in range(self.n):
            vals = vals * self.axis_profile(k, t[..., k])
        return vals


@dataclass(frozen=True)
class TransformTriple:
    """A test function together with the quadrature tolerance of its transforms."""

    source: TestFunction
    quadrature_tol: float = 1e-9


def _smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    lo = np.exp(-1.0 / np.maximum(x, 1e-300), where=x > 0, out=np.zeros_like(x))
    hi = np.exp(-1.0 / np.maximum(1.0 - x, 1e-300), where=x < 1, out=np.zeros_like(x))
    lo[x <= 0] = 0.0
    hi[x >= 1] = 0.0
    with np.errstate(invalid="ignore"):
        out = np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, lo / (lo + hi)))
    return out


class _TransformSuite:
    """Per-axis transform machinery cached for one test function.

    Axis quantities exclude the amplitude; every product over axes multiplies
    it back exactly once.
    """

    def __init__(self, psi: TestFunction, rtol: float = 1e-9):
        self.psi = psi
        self.rtol = rtol
        self.u_support = tuple(2.0 * math.asinh(math.sqrt(psi.hi(k)) / 2.0)
                               for k in range(psi.n))
        # 512 panels resolve the cosine transform up to |r| ~ pi*512/U;
        # the bump transform decays only like exp(-c sqrt(r)), so large r matter.
        self._h_panels = 512
        self._h_nodes = []
        self._h_gvals = []
        for k in range(psi.n):
            nodes, weights = composite_gl(0.0, self.u_support[k], panels=self._h_panels, order=10)
            gvals = self.g_axis_many(k, nodes)
            self._h_nodes.append((nodes, weights))
            self._h_gvals.append(gvals)

    def h_r_max(self, k: int) -> float:
        """Largest |r| at which the cosine-transform nodes stay accurate."""
        return math.pi * self._h_panels / self.u_support[k]

    # -- axis transforms ----------------------------------------------------

    def q_axis_adaptive(self, k: int, w: float) -> float:
        """Adaptive-GK evaluation of the axis integral (cross-check path)."""
        hi = self.psi.hi(k)
        lo = self.psi.lo(k)
        if w >= hi:
            return 0.0
        t0 = math.sqrt(max(0.0, lo - w))
        t1 = math.sqrt(hi - w)
        return adaptive_gk(lambda tau: 2.0 * self.psi.axis_profile(k, w + tau * tau),
                           t0, t1, rtol=self.rtol, atol=1e-14)

    def q_axis(self, k: int, w: float) -> float:
        return float(self.q_axis_many(k, np.array([w]))[0])

    def q_axis_many(self, k: int, w) -> np.ndarray:
        """Vectorized axis integral 2 * int phi_k(w + tau^2) dtau.

        The tau-range [sqrt(max(0, lo-w)), sqrt(hi-w)] is mapped onto fixed
        composite Gauss-Legendre nodes, so the whole batch is one bump
        evaluation; agrees with the adaptive path to ~1e-12.
        """
        w = np.asarray(w, dtype=float)
        shape = w.shape
        w = np.atleast_1d(w.ravel())
        hi = self.psi.hi(k)
        lo = self.psi.lo(k)
        sigma, wts = composite_gl(0.0, 1.0, panels=40, order=10)
        t_lo = np.sqrt(np.maximum(0.0, lo - w))
        t_hi = np.sqrt(np.maximum(0.0, hi - w))
        span = t_hi - t_lo
        tau = t_lo[:, None] + span[:, None] * sigma[None, :]
        vals = self.psi.axis_profile(k, w[:, None] + tau * tau)
        out = 2.0 * span * (vals @ wts)
        return out.reshape(shape)

    def g_axis(self, k: int, u: float) -> float:
        return self.q_axis(k, 4.0 * math.sinh(0.5 * u) ** 2)

    def g_axis_many(self, k: int, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        w = 4.0 * np.sinh(0.5 * u) ** 2
        return self.q_axis_many(k, w)

    def h_axis(self, k: int, r) -> np.ndarray:
        """Cosine transform 2 * int_0^U g_k(u) cos(r u) du (unit profile)."""
        r = np.asarray(r, dtype=float)
        nodes, weights = self._h_nodes[k]
        gv = self._h_gvals[k]
        # dense nodes resolve the oscillation up to |r| ~ h_r_max
        return 2.0 * np.cos(np.multiply.outer(r, nodes)) @ (weights * gv)

    def g_integral_axis(self, k: int) -> float:
        nodes, weights = self._h_nodes[k]
        return 2.0 * float(weights @ self._h_gvals[k])


@lru_cache(maxsize=32)
def _suite_cached(psi: TestFunction, rtol: float) -> _TransformSuite:
    return _TransformSuite(psi, rtol)


def get_suite(psi: TestFunction, rtol: float = 1e-9) -> _TransformSuite:
    return _suite_cached(psi, rtol)


# -- public transform operations ---------------------------------------------


def Q_of(psi: TestFunction, w, *, rtol: float = 1e-9) -> float | np.ndarray:
    """Iterated integral of psi(t)/prod sqrt(t_k - w_k) over t > w.

    Accepts a single point (n,) or a stack (..., n); absolutely convergent for
    every real w and zero once some w_k clears the support.
    """
    suite = get_suite(psi, rtol)
    w = np.asarray(w, dtype=float)
    single = w.ndim == 1
    w2 = np.atleast_2d(w)
    vals = psi.amplitude * np.ones(w2.shape[0])
    for k in range(psi.n):
        vals = vals * suite.q_axis_many(k, w2[:, k])
    return float(vals[0]) if single else vals.reshape(w.shape[:-1])


def g_of(psi: TestFunction, u, *, rtol: float = 1e-9) -> float | np.ndarray:
    """g(u) = Q(e^u + e^-u - 2) coordinate-wise; even and compactly supported."""
    u = np.asarray(u, dtype=float)
    return Q_of(psi, 4.0 * np.sinh(0.5 * u) ** 2, rtol=rtol)


def h_of(psi: TestFunction, r, *, rtol: float = 1e-9) -> float | np.ndarray:
    """Fourier transform of g; real and even in each coordinate for real r."""
    suite = get_suite(psi, rtol)
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    r2 = np.atleast_2d(r)
    vals = psi.amplitude * np.ones(r2.shape[0])
    for k in range(psi.n):
        vals = vals * suite.h_axis(k, r2[:, k])
    return float(vals[0]) if single else vals.reshape(r.shape[:-1])


@dataclass(frozen=True)
class HGrid:
    """Uniform per-axis samples of h, spaced for alias-free inversion.

    Spacing pi/(U_k + 1) guarantees the periodized reconstruction is exact on
    the support |u_k| <= U_k; the stored tail bound reflects the truncation of
    the sampled Fourier integral.
    """

    spacings: tuple[float, ...]
    samples: tuple[tuple[float, ...], ...]   # unit-profile h_k at j*spacing
    amplitude: float
    tail_bound: float


def make_h_grid(psi: TestFunction, *, rtol: float = 1e-9,
                tail: float = 3e-8) -> HGrid:
    suite = get_suite(psi, rtol)
    spacings = []
    samples = []
    worst_tail = 0.0
    for k in range(psi.n):
        dr = math.pi / (suite.u_support[k] + 1.0)
        max_samples = int(suite.h_r_max(k) / dr)
        vals = []
        j = 0
        scale = abs(suite.h_axis(k, 0.0)) + 1e-300
        block = np.zeros(1)
        while j < max_samples:
            block = suite.h_axis(k, dr * np.arange(j, j + 64))
            vals.extend(block.tolist())
            j += 64
            if np.max(np.abs(block)) < tail * scale:
                break
        else:
            raise AccuracyError("h tail does not decay below the requested bound")
        worst_tail = max(worst_tail, float(np.abs(block).max()))
        spacings.append(dr)
        samples.append(tuple(vals))
    return HGrid(tuple(spacings), tuple(s for s in samples),
                 psi.amplitude, worst_tail)


def g_from_h(hgrid: HGrid, u) -> float | np.ndarray:
    """Fourier inversion (2 pi)^{-n} int h(r) e^{-i r.u} dr from the sample grid."""
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    u2 = np.atleast_2d(u)
    vals = hgrid.amplitude * np.ones(u2.shape[0])
    for k, (dr, samp) in enumerate(zip(hgrid.spacings, hgrid.samples)):
        h = np.asarray(samp)
        r = dr * np.arange(h.size)
        # trapezoid = exact periodization for band-limited-by-support g
        contrib = (dr / math.pi) * (np.cos(np.multiply.outer(u2[:, k], r)) @ h
                                    - 0.5 * h[0])
        vals = vals * contrib
    return float(vals[0]) if single else vals.reshape(u.shape[:-1])


def psi_from_Q(q_callable, t, *, support, step_scale: float = 1e-3,
               panels: int = 12, order: int = 8) -> float:
    """Inversion psi(t) = (-1)^n/pi^n int_t^inf (d^n Q/dw_1..dw_n)/prod sqrt(w-t) dw.

    `support` bounds the t-domain of psi per axis (scalar or length-n); the
    mixed partial is taken by nested central differences with per-axis step
    step_scale * (support - t).  Accuracy is limited by the differencing, on
    the order of 1e-3 relative at interior points.
    """
    t = np.asarray(t, dtype=float)
    n = t.size
    hi = np.broadcast_to(np.asarray(support, dtype=float), (n,))
    if np.any(t >= hi):
        return 0.0
    steps = step_scale * (hi - t)
    axes_nodes = []
    axes_weights = []
    for k in range(n):
        nodes, weights = composite_gl(0.0, math.sqrt(hi[k] - t[k]), panels, order)
        axes_nodes.append(nodes)
        axes_weights.append(weights)
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    w = t[None, :] + pts * pts
    # 2^n-point central-difference stencil for the mixed partial, one batch
    signs = np.array(list(_iproduct((1.0, -1.0), repeat=n)))
    shifted = (w[None, :, :] + signs[:, None, :] * steps[None, None, :]).reshape(-1, n)
    qvals = np.asarray(q_callable(shifted)).reshape(signs.shape[0], w.shape[0])
    deriv = (np.prod(signs, axis=1) @ qvals) / math.prod(2.0 * steps)
    weight = axes_weights[0]
    for wts in axes_weights[1:]:
        weight = np.multiply.outer(weight, wts)
    integral = float(weight.ravel() @ deriv)
    return (-2.0 / math.pi) ** n * integral

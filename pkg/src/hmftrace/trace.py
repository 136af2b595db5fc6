"""Conjugacy-class contribution terms of the truncated weighted trace.

Four families enter: totally elliptic, mixed/totally hyperbolic, totally
parabolic, and norm-coherent classes fixing a cusp pair.  Each closed-form
term is built from the transform chain, the two ODE profiles and the lattice
zeta function; the brute-force counterparts (raw kernel integrals over the
centralizer fundamental domain) live here as well so the two routes can be
compared at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (DegenerateAngleError, DomainError, NonIntegrableError,
                     PoleError)
from .lattice import CuspFrame, MultiplierGroup, exponents_from
from .modgroup import GroupElementN, classify
from .quadrature import adaptive_gk, composite_gl, tensor_gl_grid
from .specfun import angular_f, complex_gamma, gamma_ratio, spherical_g
from .transforms import TestFunction, Q_of, get_suite
from .zeta import ZetaContext, zeta_continued


@dataclass(frozen=True)
class AutomorphicFormData:
    """Eigen-data of the weight form: exponent, character index, cusp terms.

    cusp_data pairs each cusp frame with the coefficients (eta, phi) of its
    leading term; evaluator computes u(z) on stacked points.  Assembly
    requires 0 < Re s < 1; Eisenstein sanity runs on Re s > 1 must set
    nonconforming=True to say so explicitly.
    """

    s: complex
    m_u: tuple[int, ...]
    cusp_data: tuple
    multipliers: MultiplierGroup
    evaluator: object = None
    nonconforming: bool = False

    def __post_init__(self):
        if all(abs(e) == 0 and abs(p) == 0 for _, e, p in self.cusp_data):
            if any(v != 0 for v in self.m_u):
                raise DomainError("cusp forms carry the trivial character index")
        s = complex(self.s)
        if not self.nonconforming and not 0.0 < s.real < 1.0:
            raise DomainError("trace assembly needs 0 < Re s < 1 "
                              "(set nonconforming=True to override)")

    @property
    def eigen_exponents(self) -> np.ndarray:
        return exponents_from(self.multipliers, complex(self.s), self.m_u)

    @property
    def mu_vector(self) -> np.ndarray:
        s_k = self.eigen_exponents
        return s_k * (s_k - 1.0)

    def is_cusp_form(self) -> bool:
        return all(abs(e) == 0 and abs(p) == 0 for _, e, p in self.cusp_data)


@dataclass(frozen=True)
class TermResult:
    """One contribution term: value, cutoff-power coefficients, diagnostics."""

    value: complex
    a_dependence: dict | None
    error_estimate: float
    components: dict = dc_field(default_factory=dict)

    def a_power_value(self, a_cutoff: float) -> complex:
        if not self.a_dependence:
            return 0.0 + 0j
        s = self.a_dependence["s"]
        return (self.a_dependence["A_s_coeff"] * a_cutoff ** s
                + self.a_dependence["A_1ms_coeff"] * a_cutoff ** (1.0 - s))


@dataclass(frozen=True)
class LogParallelotope:
    """Half-open cell anchor + sum_i t_i v_i, t in [0,1)^d, in log coordinates.

    With unbounded_trace_axis set, the cell is extended by the full diagonal
    line R*(1,..,1)/sqrt(n) and integrals over it are truncated adaptively.
    """

    anchor: tuple[float, ...]
    vectors: tuple[tuple[float, ...], ...]
    unbounded_trace_axis: bool = False

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.vectors, dtype=float).T  # columns = spanning vectors

    @property
    def cell_volume(self) -> float:
        m = self.matrix
        return abs(np.linalg.det(m.T @ m)) ** 0.5


# -- totally elliptic ----------------------------------------------------------


def _elliptic_axis_integral(psi: TestFunction, k: int, theta: float,
                            mu: complex, rtol: float = 1e-10) -> complex:
    """int_0^R psi_k((2 sinh r sin th)^2) g_mu(r) sinh r dr."""
    hi = psi.hi(k)
    s_t = math.sin(theta)
    r_max = math.asinh(math.sqrt(hi) / (2.0 * s_t))
    suite = get_suite(psi)

    def integrand(r):
        arg = (2.0 * np.sinh(r) * s_t) ** 2
        prof = suite.psi.axis_profile(k, arg)
        gvals = np.array([spherical_g(mu, float(x)) for x in r])
        return prof * gvals * np.sinh(r)

    return adaptive_gk(integrand, 0.0, r_max, rtol=rtol, atol=1e-14)


def elliptic_term(psi: TestFunction, angles, m_order: int, u_at_fixed_point: complex,
                  mu) -> TermResult:
    """Closed-form contribution of one totally elliptic class.

    (2 pi)^n / m_order * u(fixed point) * iterated profile integral; no
    cutoff dependence.
    """
    angles = np.asarray(angles, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    if m_order < 1:
        raise DomainError("class order must be a positive integer")
    if np.any(np.sin(angles) <= 1e-12):
        raise DegenerateAngleError("rotation angle too close to 0 or pi")
    n = angles.size
    axes = [_elliptic_axis_integral(psi, k, float(angles[k]), complex(mu[k]))
            for k in range(n)]
    prod = psi.amplitude + 0j
    for a in axes:
        prod *= a
    value = (2.0 * math.pi) ** n / m_order * complex(u_at_fixed_point) * prod
    return TermResult(value=value, a_dependence=None,
                      error_estimate=1e-9 * abs(value),
                      components={"axis_integrals": [complex(a) for a in axes],
                                  "order": m_order})


def _plane_grid(psi: TestFunction, k: int, gamma_k, panels: int, order: int = 8):
    """Weighted z-plane grid of one coordinate for the brute-force integrals.

    Returns (z_points, weights) where the weights already carry the bump
    factor of this coordinate's kernel argument and the measure 1/y^2; points
    cover the Cartesian support box of the moved-point distance.
    """
    a, b, c, d = gamma_k
    tr = abs(a + d)
    angle = math.acos(min(1.0, tr / 2.0))
    r0 = math.asinh(math.sqrt(psi.hi(k)) / (2.0 * math.sin(angle))) + 1e-9
    y_lo, y_hi = math.exp(-r0) / 1.05, math.exp(r0) * 1.05
    x_max = math.sqrt(2.0 * y_hi * (math.cosh(r0) - 1.0)) * 1.05
    pts, wts = tensor_gl_grid([(-x_max, x_max), (y_lo, y_hi)],
                              [panels, panels], order=order)
    z = pts[:, 0] + 1j * pts[:, 1]
    gz = (a * z + b) / (c * z + d)
    rho = np.abs(z - gz) ** 2 / (z.imag * gz.imag)
    w = wts * psi.axis_profile(k, rho) / z.imag ** 2
    keep = w != 0.0
    return z[keep], w[keep]


def _joint_weight_sum(z_grids, w_grids, u_evaluator, amplitude: float,
                      chunk: int = 512) -> complex:
    """sum_i sum_j W1_i W2_j u(z1_i, z2_j), chunked over the first grid."""
    z1, w1 = z_grids[0], w_grids[0]
    z2, w2 = z_grids[1], w_grids[1]
    total = 0.0 + 0j
    for i0 in range(0, z1.size, chunk):
        zz1 = z1[i0:i0 + chunk]
        ww1 = w1[i0:i0 + chunk]
        stacked = np.empty((zz1.size, z2.size, 2), dtype=complex)
        stacked[:, :, 0] = zz1[:, None]
        stacked[:, :, 1] = z2[None, :]
        uvals = np.asarray(u_evaluator(stacked.reshape(-1, 2))).reshape(zz1.size,
                                                                        z2.size)
        total += complex(ww1 @ uvals @ w2)
    return amplitude * total


def elliptic_oracle(psi: TestFunction, gamma_prime: GroupElementN, u_evaluator,
                    *, n_coarse: int = 9, n_fine: int = 12):
    """Raw kernel integral over the whole upper half-space product.

    Tensor Gauss-Legendre quadrature in Cartesian coordinates over the
    compact support box of k(z, gamma' z); no polar coordinates and no ODE
    profiles enter.  Returns (value, error_estimate) with the error taken
    from two resolutions (n_* are panels per axis, 8 nodes each).
    """
    res = classify(gamma_prime)
    if res.kind != "totally-elliptic":
        raise DomainError("oracle expects a totally elliptic element")
    angles = np.asarray(res.angles, dtype=float)
    if np.any(np.sin(angles) <= 1e-9):
        raise DomainError("degenerate rotation angle")
    n = angles.size
    if n != 2:
        raise DomainError("brute-force oracle implemented for n = 2")
    mats = [(gamma_prime.a[k], gamma_prime.b[k], gamma_prime.c[k], gamma_prime.d[k])
            for k in range(n)]

    def integrate(panels: int) -> complex:
        grids = [_plane_grid(psi, k, mats[k], panels) for k in range(n)]
        return _joint_weight_sum([g[0] for g in grids], [g[1] for g in grids],
                                 u_evaluator, psi.amplitude)

    coarse = integrate(n_coarse)
    fine = integrate(n_fine)
    return fine, abs(fine - coarse)


# -- mixed / totally hyperbolic -------------------------------------------------


def _hyperbolic_axis_integral(psi: TestFunction, k: int, norm: float,
                              mu: complex, rtol: float = 1e-10) -> complex:
    """2 int_0^Th psi_k((N + 1/N - 2)/cos^2 th) f_mu(th) / cos^2 th dth."""
    gap = norm + 1.0 / norm - 2.0
    hi = psi.hi(k)
    if gap >= hi:
        return 0.0 + 0j
    th_max = math.acos(math.sqrt(gap / hi))
    suite = get_suite(psi)

    def integrand(th):
        c2 = np.cos(th) ** 2
        prof = suite.psi.axis_profile(k, gap / c2)
        fvals = np.array([angular_f(mu, float(t)) for t in th])
        return prof * fvals / c2

    return 2.0 * adaptive_gk(integrand, 0.0, th_max, rtol=rtol, atol=1e-14)


def mixed_term(psi: TestFunction, norms, angles, f0_value: complex, mu) -> TermResult:
    """Closed-form contribution of a class with hyperbolic and elliptic parts.

    Hyperbolic coordinates come first; mu is the full eigen-constant vector in
    the same order.  f0_value is the centralizer-cell integral of the weight
    (see F0_of_centralizer).
    """
    norms = np.asarray(norms, dtype=float)
    angles = np.asarray(angles, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    if np.any(norms <= 1.0):
        raise DomainError("hyperbolic norms must exceed 1")
    m = norms.size
    n = m + angles.size
    hyp = [_hyperbolic_axis_integral(psi, k, float(norms[k]), complex(mu[k]))
           for k in range(m)]
    ell = [_elliptic_axis_integral(psi, m + j, float(angles[j]), complex(mu[m + j]))
           for j in range(angles.size)]
    if angles.size and np.any(np.sin(angles) <= 1e-12):
        raise DegenerateAngleError("rotation angle too close to 0 or pi")
    prod = psi.amplitude + 0j
    for v in hyp + ell:
        prod *= v
    value = (2.0 * math.pi) ** (n - m) * complex(f0_value) * prod
    return TermResult(value=value, a_dependence=None,
                      error_estimate=1e-9 * abs(value),
                      components={"hyperbolic_axis": [complex(v) for v in hyp],
                                  "elliptic_axis": [complex(v) for v in ell],
                                  "f0": complex(f0_value)})


def mixed_oracle_hyp_ell(psi: TestFunction, norm: float, angle: float,
                         *, n_coarse: int = 10, n_fine: int = 14):
    """Brute-force centralizer-domain integral for one hyperbolic + one
    elliptic coordinate and constant weight u = 1.

    Coordinate 1 in polar form over the annulus 1 <= |z| < norm, coordinate 2
    in Cartesian form over the kernel support; returns (value, error).  n_*
    count panels per axis (8 nodes each).
    """
    if norm <= 1.0:
        raise DomainError("norm must exceed 1")
    gap = norm + 1.0 / norm - 2.0
    if gap >= psi.hi(0):
        return 0.0, 0.0
    th_max = math.acos(math.sqrt(gap / psi.hi(0)))

    def integrate(panels: int) -> float:
        pts1, wts1 = tensor_gl_grid([(1.0, norm), (-th_max, th_max)],
                                    [max(2, panels // 2), panels], order=8)
        r1, th1 = pts1[:, 0], pts1[:, 1]
        z1 = r1 * np.exp(1j * (math.pi / 2 + th1))
        w1 = norm * z1
        rho1 = np.abs(z1 - w1) ** 2 / (z1.imag * w1.imag)
        wgt1 = wts1 * psi.axis_profile(0, rho1) / (r1 * np.cos(th1) ** 2)
        z2, wgt2 = _plane_grid(psi, 1, (0.0, -1.0, 1.0, 0.0), panels)
        return psi.amplitude * float(np.sum(wgt1) * np.sum(wgt2))

    coarse = integrate(n_coarse)
    fine = integrate(n_fine)
    return fine, abs(fine - coarse)


def F0_of_centralizer(u_evaluator, conjugator: GroupElementN,
                      cell: LogParallelotope, hyperbolic_count: int,
                      *, panels: int = 24, order: int = 10) -> complex:
    """Centralizer-cell integral of the weight in log-radial coordinates.

    Integrates u over log r in the half-open cell (the remaining coordinates
    pinned at i), with measure prod dr_k/r_k = |cell| dt.
    """
    m = cell.dim
    if m == 0 or abs(np.linalg.det(cell.matrix.T @ cell.matrix)) < 1e-14:
        raise DomainError("degenerate integration cell")
    nodes, weights = composite_gl(0.0, 1.0, panels, order)
    grids = np.meshgrid(*([nodes] * m), indexing="ij")
    t = np.stack([g.ravel() for g in grids], axis=-1)
    logr = np.asarray(cell.anchor) + t @ np.asarray(cell.vectors)
    r = np.exp(logr)
    n = conjugator.n
    z = np.empty((r.shape[0], n), dtype=complex)
    for k in range(n):
        a, b = conjugator.a[k], conjugator.b[k]
        c, d = conjugator.c[k], conjugator.d[k]
        base = (r[:, k] * 1j) if k < hyperbolic_count else np.full(r.shape[0], 1j)
        z[:, k] = (a * base + b) / (c * base + d)
    uvals = np.asarray(u_evaluator(z))
    wt = weights
    for _ in range(m - 1):
        wt = np.multiply.outer(wt, weights)
    vol = abs(np.linalg.det(np.asarray(cell.vectors, dtype=float))) if m == len(
        cell.anchor) else cell.cell_volume
    return vol * complex(np.sum(wt.ravel() * uvals))


# -- cusp-pair (norm-coherent) classes -------------------------------------------


def multiplier_log_supports(psi: TestFunction, mult: MultiplierGroup,
                            max_shell: int = 64) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Indices m != 0 whose unit u_m keeps g(log u_m) inside the support.

    Walks shells of the index lattice until a full shell is dead; per ray the
    support argument 4 sinh^2(log(u_m)_k / 2) grows monotonically.
    """
    hi = np.array([psi.hi(k) for k in range(psi.n)])
    out = []
    rank = mult.rank
    if rank != 1:
        raise DomainError("index walking implemented for rank 1")
    for shell in range(1, max_shell + 1):
        alive = False
        for mv in ((shell,), (-shell,)):
            u = mult.power(np.asarray(mv, dtype=float))
            arg = 4.0 * np.sinh(0.5 * np.log(u)) ** 2
            if np.all(arg < hi):
                out.append((mv, u))
                alive = True
        if not alive:
            break
    return out


def hyp_par_main_term(a_cutoff: float, mult: MultiplierGroup, psi: TestFunction,
                      form: AutomorphicFormData) -> TermResult:
    """Divergent main part of the cusp-pair classes at truncation height A.

    (|det E|/n) sum_cusps (eta A^s/s + phi A^(1-s)/(1-s)) sum_{m != 0}
    g(log u_m), present only for trivial character index.
    """
    if a_cutoff <= 0:
        raise DomainError("cutoff must be positive")
    s = complex(form.s)
    n = mult.n
    det_e = abs(mult.det_E)
    if any(v != 0 for v in form.m_u) or form.is_cusp_form():
        return TermResult(0.0 + 0j,
                          {"s": s, "A_s_coeff": 0.0 + 0j, "A_1ms_coeff": 0.0 + 0j},
                          0.0, {"g_sum": 0.0, "contributing_indices": []})
    contributing = multiplier_log_supports(psi, mult)
    g_sum = 0.0
    for _, u in contributing:
        g_sum += float(np.real(Q_of(psi, 4.0 * np.sinh(0.5 * np.log(u)) ** 2)))
    eta_sum = sum(e for _, e, _ in form.cusp_data)
    phi_sum = sum(p for _, _, p in form.cusp_data)
    coeff_s = det_e / n * eta_sum / s * g_sum
    coeff_1ms = det_e / n * phi_sum / (1.0 - s) * g_sum
    value = coeff_s * a_cutoff ** s + coeff_1ms * a_cutoff ** (1.0 - s)
    return TermResult(value=value,
                      a_dependence={"s": s, "A_s_coeff": coeff_s,
                                    "A_1ms_coeff": coeff_1ms},
                      error_estimate=1e-9 * abs(value),
                      components={"g_sum": g_sum,
                                  "contributing_indices":
                                      [list(mv) for mv, _ in contributing]})


def hyp_par_theta_factor(psi: TestFunction, e_m, mu, *, fold: bool = True) -> complex:
    """Angular factor int psi(E_m^2 / cos^2 th) prod f_mu(th) dth / cos^2 th.

    The integrand is even per axis; fold=True uses 2^n times the [0, pi/2)
    quadrant (the default), fold=False integrates the full cube directly.
    """
    e_m = np.asarray(e_m, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    if np.any(e_m == 0.0):
        raise DomainError("E_m has a zero coordinate")
    suite = get_suite(psi)
    total = psi.amplitude + 0j
    for k in range(psi.n):
        esq = e_m[k] ** 2
        hi = psi.hi(k)
        if esq >= hi:
            return 0.0 + 0j
        th_max = math.acos(math.sqrt(esq / hi))
        mu_k = complex(mu[k])

        def axis(th):
            c2 = np.cos(th) ** 2
            prof = suite.psi.axis_profile(k, esq / c2)
            fvals = np.array([angular_f(mu_k, float(t)) for t in th])
            return prof * fvals / c2

        if fold:
            val = 2.0 * adaptive_gk(axis, 0.0, th_max, rtol=1e-10, atol=1e-14)
        else:
            val = adaptive_gk(axis, -th_max, th_max, rtol=1e-10, atol=1e-14)
        total *= val
    return total


def hyp_par_C_term(theta_factor: complex, regularized_form, cell: LogParallelotope,
                   *, rtol: float = 1e-6, panels: int = 16, order: int = 10,
                   t_start: float = 2.0, max_doublings: int = 12) -> TermResult:
    """Convergent part of one cusp-pair class: 1/2 * cell integral * theta factor.

    regularized_form maps positive radial vectors (stacked (N, n)) to complex
    values; it must decay along the diagonal direction, which the adaptive
    truncation verifies (NonIntegrableError otherwise).
    """
    n = len(cell.anchor)
    nodes, weights = composite_gl(0.0, 1.0, panels, order)
    if cell.dim:
        grids = np.meshgrid(*([nodes] * cell.dim), indexing="ij")
        t_cell = np.stack([g.ravel() for g in grids], axis=-1)
        w_cell = weights
        for _ in range(cell.dim - 1):
            w_cell = np.multiply.outer(w_cell, weights)
        w_cell = w_cell.ravel()
        vol = cell.cell_volume
    else:
        t_cell = np.zeros((1, 0))
        w_cell = np.ones(1)
        vol = 1.0

    base = np.asarray(cell.anchor) + (t_cell @ np.asarray(cell.vectors)
                                      if cell.dim else 0.0)

    def seg_integral(t_lo: float, t_hi: float) -> complex:
        t_nodes, t_wts = composite_gl(t_lo, t_hi, max(4, panels // 2), order)
        diag = np.ones(n) / math.sqrt(n)
        total = 0.0 + 0j
        with np.errstate(over="ignore", under="ignore"):
            for tv, tw in zip(t_nodes, t_wts):
                logr = base + tv * diag
                vals = np.asarray(regularized_form(np.exp(logr)))
                total += tw * complex(np.sum(w_cell * vals))
        return vol * total

    if not cell.unbounded_trace_axis:
        logr = base
        vals = np.asarray(regularized_form(np.exp(logr)))
        integral = vol * complex(np.sum(w_cell * vals))
        value = 0.5 * integral * theta_factor
        return TermResult(value, None, rtol * abs(value),
                          {"cell_integral": integral,
                           "theta_factor": complex(theta_factor)})

    total = seg_integral(-t_start, t_start)
    t_edge = t_start
    for _ in range(max_doublings):
        inc = seg_integral(t_edge, 2.0 * t_edge) + seg_integral(-2.0 * t_edge, -t_edge)
        total += inc
        if abs(inc) <= rtol * max(abs(total), 1e-30):
            break
        t_edge *= 2.0
    else:
        raise NonIntegrableError("cell integral keeps growing under extension")
    value = 0.5 * total * theta_factor
    return TermResult(value, None, rtol * abs(value),
                      {"cell_integral": total, "theta_factor": complex(theta_factor)})


# -- totally parabolic -----------------------------------------------------------


def _axis_monomial_integral(psi: TestFunction, k: int, exponent: complex) -> complex:
    """int_0^inf psi_k(t^2) t^exponent dt with graded dyadic panels at 0.

    Integrable for Re(exponent) > -1; the bump vanishes to all orders at the
    origin so the dyadic grading converges quickly.
    """
    if exponent.real <= -1.0:
        raise DomainError("monomial exponent out of the integrable range")
    x_hi = math.sqrt(psi.hi(k))
    suite = get_suite(psi)

    def f(t):
        return suite.psi.axis_profile(k, t * t) * np.exp(exponent * np.log(t))

    total = 0.0 + 0j
    upper = x_hi
    for _ in range(80):
        lower = upper / 2.0
        total += adaptive_gk(f, lower, upper, rtol=1e-11, atol=1e-16)
        upper = lower
        probe = abs(f(np.array([upper]))[0]) * upper
        if probe < 1e-17:
            break
    return total


def F0_direct(psi: TestFunction, s_k) -> complex:
    """F(0) = int psi(t^2) prod t_k^{-s_k} dt over the positive cone."""
    s_k = np.asarray(s_k, dtype=complex)
    if np.any(s_k.real <= 0.0) or np.any(s_k.real >= 1.0):
        raise DomainError("exponents must satisfy 0 < Re s_k < 1")
    total = psi.amplitude + 0j
    for k in range(psi.n):
        total *= _axis_monomial_integral(psi, k, -s_k[k])
    return total


def F0tilde_direct(psi: TestFunction, s_k) -> complex:
    """F~(0) = int psi(t^2) prod t_k^{s_k - 1} dt over the positive cone."""
    s_k = np.asarray(s_k, dtype=complex)
    if np.any(s_k.real <= 0.0) or np.any(s_k.real >= 1.0):
        raise DomainError("exponents must satisfy 0 < Re s_k < 1")
    total = psi.amplitude + 0j
    for k in range(psi.n):
        total *= _axis_monomial_integral(psi, k, s_k[k] - 1.0)
    return total


def _gamma_weight_integral(psi: TestFunction, k: int, a: complex, b: complex,
                           tail: float = 1e-10) -> complex:
    """int_R h_k(r) r Gamma(a + ir)/Gamma(b + ir) dr, truncated by h decay."""
    suite = get_suite(psi)
    r_lim = suite.h_r_max(k)
    scale = abs(suite.h_axis(k, 0.0)) + 1e-300
    r_cut = r_lim
    for r_try in np.arange(40.0, r_lim, 20.0):
        if abs(suite.h_axis(k, float(r_try))) < tail * scale:
            r_cut = float(r_try)
            break

    def f(r):
        hv = suite.h_axis(k, np.abs(r))
        ratio = np.array([gamma_ratio(a + 1j * rv, b + 1j * rv) for rv in r])
        return hv * r * ratio

    return adaptive_gk(f, -r_cut, r_cut, rtol=1e-10, atol=1e-13, limit=600)


def F0_gamma_formula(psi: TestFunction, s_k) -> complex:
    """F(0) through the spherical transform: Gamma ratios against h.

    Per axis: (i / (2^{2 + s_k} pi^2)) Gamma((1-s_k)/2)^2
              int_R h(r) r Gamma(s_k/2 + ir)/Gamma((2-s_k)/2 + ir) dr.
    The power of two follows from the beta-function identity
    B((1-s)/2, 1/2) = 2^{-s} Gamma((1-s)/2)^2 / Gamma(1-s); cross-checked
    against the direct quadrature of F(0) to 1e-4.
    """
    s_k = np.asarray(s_k, dtype=complex)
    total = psi.amplitude + 0j
    for k in range(psi.n):
        sk = complex(s_k[k])
        const = 1j * 2.0 ** (-sk - 2.0) / math.pi ** 2 * complex_gamma((1.0 - sk) / 2.0) ** 2
        total *= const * _gamma_weight_integral(psi, k, sk / 2.0, 1.0 - sk / 2.0)
    return total


def F0tilde_gamma_formula(psi: TestFunction, s_k) -> complex:
    """F~(0) through the spherical transform (dual exponent pattern).

    Per axis: (i 2^{s_k - 3} / pi^2) Gamma(s_k/2)^2
              int_R h(r) r Gamma((1-s_k)/2 + ir)/Gamma((1+s_k)/2 + ir) dr,
    with the power of two from B(s/2, 1/2) = 2^{s-1} Gamma(s/2)^2 / Gamma(s).
    """
    s_k = np.asarray(s_k, dtype=complex)
    total = psi.amplitude + 0j
    for k in range(psi.n):
        sk = complex(s_k[k])
        const = 1j * 2.0 ** (sk - 3.0) / math.pi ** 2 * complex_gamma(sk / 2.0) ** 2
        total *= const * _gamma_weight_integral(psi, k, (1.0 - sk) / 2.0,
                                                (sk + 1.0) / 2.0)
    return total


def parabolic_term(a_cutoff: float, psi: TestFunction,
                   form: AutomorphicFormData) -> TermResult:
    """Contribution of the translation classes at every cusp.

    Per cusp: delta_{m_u} (|det E|/n)(eta A^s/s + phi A^(1-s)/(1-s)) g(0)
    + vol(R^n/L) (eta Z(1-s, -m_u) F(0) + phi Z(s, m_u) F~(0)).
    """
    if a_cutoff <= 0:
        raise DomainError("cutoff must be positive")
    s = complex(form.s)
    m_u = form.m_u
    m_zero = all(v == 0 for v in m_u)
    if m_zero and (min(abs(s), abs(1.0 - s)) < 1e-6) and not form.is_cusp_form():
        raise PoleError("zeta factor evaluated at its pole")
    mult = form.multipliers
    n = mult.n
    det_e = abs(mult.det_E)
    g0 = float(np.real(Q_of(psi, np.zeros(psi.n)))) if not form.is_cusp_form() else 0.0
    s_k = form.eigen_exponents
    coeff_s = 0.0 + 0j
    coeff_1ms = 0.0 + 0j
    const_part = 0.0 + 0j
    per_cusp = []
    for frame, eta, phi in form.cusp_data:
        if eta == 0 and phi == 0:
            per_cusp.append({"eta": eta, "phi": phi, "constant": 0.0 + 0j})
            continue
        if m_zero:
            coeff_s += det_e / n * eta / s * g0
            coeff_1ms += det_e / n * phi / (1.0 - s) * g0
        vol = frame.lattice.covolume
        ctx_minus = ZetaContext(frame.lattice, mult, tuple(-v for v in m_u))
        ctx_plus = ZetaContext(frame.lattice, mult, tuple(m_u))
        const = 0.0 + 0j
        if eta != 0:
            const += eta * zeta_continued(ctx_minus, 1.0 - s) * F0_direct(psi, s_k)
        if phi != 0:
            const += phi * zeta_continued(ctx_plus, s) * F0tilde_direct(psi, s_k)
        const *= vol
        const_part += const
        per_cusp.append({"eta": eta, "phi": phi, "constant": const})
    value = coeff_s * a_cutoff ** s + coeff_1ms * a_cutoff ** (1.0 - s) + const_part
    return TermResult(value=value,
                      a_dependence={"s": s, "A_s_coeff": coeff_s,
                                    "A_1ms_coeff": coeff_1ms},
                      error_estimate=1e-8 * (abs(value) + 1.0e-30),
                      components={"constant_part": const_part, "g0": g0,
                                  "per_cusp": per_cusp})


# -- assembly ---------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticClassData:
    angles: tuple[float, ...]
    order: int
    u_at_fixed_point: complex


@dataclass(frozen=True)
class MixedClassData:
    norms: tuple[float, ...]
    angles: tuple[float, ...]
    f0_value: complex


@dataclass(frozen=True)
class CuspPairClassData:
    index: tuple[int, ...]
    e_m: tuple[float, ...]
    regularized_form: object
    cell: LogParallelotope


@dataclass(frozen=True)
class ClassInventory:
    elliptic: tuple[EllipticClassData, ...] = ()
    mixed: tuple[MixedClassData, ...] = ()
    cusp_pair: tuple[CuspPairClassData, ...] = ()


def assemble_geometric_trace(a_cutoff: float, psi: TestFunction,
                             form: AutomorphicFormData,
                             inventory: ClassInventory) -> dict:
    """Assemble the four geometric contribution families into one report.

    The report carries each term with components, the total, and the exact
    cutoff-power coefficients (A^s and A^(1-s)) so the cutoff dependence can
    be studied without re-running quadrature.
    """
    mu = form.mu_vector
    terms: dict[str, TermResult] = {}

    ell_total = 0.0 + 0j
    ell_parts = []
    for cls in inventory.elliptic:
        t = elliptic_term(psi, cls.angles, cls.order, cls.u_at_fixed_point, mu)
        ell_parts.append(t)
        ell_total += t.value
    terms["elliptic"] = TermResult(
        ell_total, None, sum(t.error_estimate for t in ell_parts),
        {"classes": [t.components for t in ell_parts]})

    mix_total = 0.0 + 0j
    mix_parts = []
    for cls in inventory.mixed:
        t = mixed_term(psi, cls.norms, cls.angles, cls.f0_value, mu)
        mix_parts.append(t)
        mix_total += t.value
    terms["mixed"] = TermResult(
        mix_total, None, sum(t.error_estimate for t in mix_parts),
        {"classes": [t.components for t in mix_parts]})

    main = hyp_par_main_term(a_cutoff, form.multipliers, psi, form)
    c_total = 0.0 + 0j
    c_err = 0.0
    c_parts = []
    for cls in inventory.cusp_pair:
        theta_fac = hyp_par_theta_factor(psi, cls.e_m, mu)
        t = hyp_par_C_term(theta_fac, cls.regularized_form, cls.cell)
        c_parts.append(t)
        c_total += t.value
        c_err += t.error_estimate
    terms["hyp_par"] = TermResult(
        main.value + c_total, main.a_dependence,
        main.error_estimate + c_err,
        {"main": main.components, "classes": [t.components for t in c_parts]})

    terms["parabolic"] = parabolic_term(a_cutoff, psi, form)

    total = sum(t.value for t in terms.values())
    a_s = sum(t.a_dependence["A_s_coeff"] for t in terms.values() if t.a_dependence)
    a_1ms = sum(t.a_dependence["A_1ms_coeff"] for t in terms.values() if t.a_dependence)
    return {
        "A": a_cutoff,
        "s": complex(form.s),
        "terms": terms,
        "total": total,
        "A_s_coeff": a_s,
        "A_1ms_coeff": a_1ms,
        "error_estimate": sum(t.error_estimate for t in terms.values()),
    }


# -- demo data --------------------------------------------------------------------


def demo_form(field, s: complex = 0.8, *, cusp_form: bool = False,
              nonconforming: bool = False) -> AutomorphicFormData:
    """Leading-term model of the cusp-expansion weight over one cusp.

    The evaluator returns (prod y_k)^s, the dominant part of the expansion at
    the built-in cusp; coefficients are eta = 1, phi = 0 (or all zero for the
    cusp-form variant).
    """
    frame = CuspFrame.at_infinity(field)
    s = complex(s)
    if cusp_form:
        data = ((frame, 0.0 + 0j, 0.0 + 0j),)
    else:
        data = ((frame, 1.0 + 0j, 0.0 + 0j),)

    def evaluator(z):
        z = np.asarray(z, dtype=complex)
        ny = np.prod(z.imag, axis=-1)
        return ny ** s

    return AutomorphicFormData(s=s, m_u=(0,), cusp_data=data,
                               multipliers=frame.multipliers,
                               evaluator=evaluator, nonconforming=nonconforming)


def demo_inventory(field, psi: TestFunction, form: AutomorphicFormData) -> ClassInventory:
    """Small synthetic class inventory over the field for end-to-end runs.

    One order-2 rotation class fixing (i, i); one mixed class with norm 4 and
    a quarter-turn elliptic coordinate; the index +-1 cusp-pair classes with a
    synthetic decaying regularized weight.
    """
    from .lattice import EmbeddedLattice, quotient_reps_mod_units

    u_fp = complex(np.asarray(form.evaluator(np.array([1j, 1j]))))
    elliptic = (EllipticClassData(angles=(math.pi / 2, math.pi / 2), order=2,
                                  u_at_fixed_point=u_fp),)

    cell_mixed = LogParallelotope(anchor=(0.0,), vectors=((math.log(4.0),),))
    f0 = F0_of_centralizer(form.evaluator, GroupElementN.identity(2), cell_mixed, 1)
    mixed = (MixedClassData(norms=(4.0,), angles=(math.pi / 2,), f0_value=f0),)

    mult = form.multipliers
    lattice = EmbeddedLattice.from_field(field)

    def synthetic(r):
        r = np.asarray(r, dtype=float)
        nr = np.prod(r, axis=-1)
        return np.exp(-(nr + 1.0 / nr))

    pairs = []
    for mv, u in multiplier_log_supports(psi, mult):
        e_m = 1.0 / np.sqrt(u) - np.sqrt(u)
        log_eps = mult.log_generators[0]
        for rep, orbit in quotient_reps_mod_units(lattice, u, mult):
            vec = (float(orbit) * log_eps[0], float(orbit) * log_eps[1])
            # cell centered at the origin (half-open, symmetric choice)
            cell = LogParallelotope(anchor=(-0.5 * vec[0], -0.5 * vec[1]),
                                    vectors=(vec,),
                                    unbounded_trace_axis=True)
            pairs.append(CuspPairClassData(index=tuple(mv), e_m=tuple(e_m),
                                           regularized_form=synthetic, cell=cell))
    return ClassInventory(elliptic=elliptic, mixed=mixed, cusp_pair=tuple(pairs))

"""Complex Gamma, modified Bessel K of complex order, and the two ODE profiles.

The radial profile solves  g'' + coth(r) g' = mu g  with g(0) = 1 (regular at
the singular origin), the angular one  f'' = (mu / cos^2 th) f  with f(0) = 1,
f'(0) = 0.  Both are integrated twice: by an embedded 5(4) Runge-Kutta pair
with dense output and by an independent Taylor-series continuation; the two
must agree to 1e-8, which the tests enforce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, PoleError
from .quadrature import adaptive_gk

# Lanczos coefficients, g = 7, n = 9 (double-precision standard set)
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z: complex) -> complex:
    """Gamma function by Lanczos approximation, reflection for Re z < 1/2.

    Relative accuracy about 1e-13 away from the poles at 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"gamma pole at z = {z.real:g}")
    if z.real < 0.5:
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.pi / (np.sin(np.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * np.exp(-t) * x


def complex_log_gamma(z: complex) -> complex:
    """log Gamma(z) via Lanczos, stable for large |Im z| (log-space reflection)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"gamma pole at z = {z.real:g}")
    if z.real < 0.5:
        # log sin(pi z) without overflow: factor out the dominant exponential
        iz = 1j * math.pi * z
        if z.imag > 0:
            log_sin = -iz + np.log1p(-np.exp(2.0 * iz)) - math.log(2.0) + 1j * math.pi / 2
        else:
            log_sin = iz + np.log1p(-np.exp(-2.0 * iz)) - math.log(2.0) - 1j * math.pi / 2
        return math.log(math.pi) - log_sin - complex_log_gamma(1.0 - z)
    z -= 1.0
    x = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return (0.5 * math.log(2.0 * math.pi) + (z + 0.5) * np.log(t) - t
            + np.log(x))


def gamma_ratio(a: complex, b: complex) -> complex:
    """Gamma(a)/Gamma(b) computed in log space (no overflow at large |Im|)."""
    return complex(np.exp(complex_log_gamma(a) - complex_log_gamma(b)))


def bessel_k(nu: complex, x: float) -> complex:
    """Modified Bessel K_nu(x) for complex order and real x > 0.

    Integral representation int_0^inf exp(-x cosh t) cosh(nu t) dt, truncated
    where the integrand falls below 1e-19; even in nu.
    """
    if x <= 0.0:
        raise DomainError("argument must be positive")
    nu = complex(nu)
    re = abs(nu.real)
    # truncation: x cosh T - re*T = 45 (integrand below ~ e^-45)
    t_hi = 1.0
    for _ in range(80):
        val = x * math.cosh(t_hi) - re * t_hi - 45.0
        if val > 0:
            break
        t_hi *= 1.5
    lo = 0.0
    hi = t_hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if x * math.cosh(mid) - re * mid - 45.0 > 0:
            hi = mid
        else:
            lo = mid
    t_max = hi

    def integrand(t):
        return np.exp(-x * np.cosh(t)) * np.cosh(nu * t)

    return adaptive_gk(integrand, 0.0, t_max, rtol=1e-13, atol=1e-16)


@dataclass(frozen=True)
class SphericalSolution:
    """Sampled ODE solution: value and derivative on an increasing grid."""

    eigen_mu: complex
    grid: tuple[float, ...]
    values: tuple[complex, ...]
    derivatives: tuple[complex, ...]


def _split_complex_system(rhs_complex):
    """Wrap a complex 2-vector ODE right-hand side as a real 4-vector one."""

    def rhs(t, y):
        g = complex(y[0], y[1])
        gp = complex(y[2], y[3])
        d1, d2 = rhs_complex(t, g, gp)
        return [d1.real, d1.imag, d2.real, d2.imag]

    return rhs


class _RadialProfile:
    """g'' + coth(r) g' = mu g, g(0) = 1; dense-output evaluator."""

    SERIES_R0 = 1e-3

    def __init__(self, mu: complex, r_max: float):
        self.mu = complex(mu)
        self.r_max = float(r_max)
        mu_c = self.mu
        c1 = mu_c / 4.0
        c2 = c1 * (mu_c - 2.0 / 3.0) / 16.0
        c3 = (c2 * (mu_c - 4.0 / 3.0) + (2.0 / 45.0) * c1) / 36.0
        self._series = (1.0 + 0j, c1, c2, c3)
        r0 = self.SERIES_R0
        g0 = 1.0 + c1 * r0 ** 2 + c2 * r0 ** 4 + c3 * r0 ** 6
        gp0 = 2.0 * c1 * r0 + 4.0 * c2 * r0 ** 3 + 6.0 * c3 * r0 ** 5

        def rhs(r, g, gp):
            return (gp, mu_c * g - gp / math.tanh(r))

        sol = solve_ivp(_split_complex_system(rhs), (r0, max(self.r_max, 2 * r0)),
                        [g0.real, g0.imag, gp0.real, gp0.imag],
                        method="RK45", rtol=1e-11, atol=1e-11, dense_output=True)
        if not sol.success:
            raise DomainError(f"radial ODE integration failed: {sol.message}")
        self._sol = sol

    def value(self, r: float) -> complex:
        if r < 0.0:
            raise DomainError("radius must be nonnegative")
        if r <= self.SERIES_R0:
            c0, c1, c2, c3 = self._series
            return c0 + c1 * r ** 2 + c2 * r ** 4 + c3 * r ** 6
        y = self._sol.sol(r)
        return complex(y[0], y[1])

    def derivative(self, r: float) -> complex:
        if r <= self.SERIES_R0:
            _, c1, c2, c3 = self._series
            return 2.0 * c1 * r + 4.0 * c2 * r ** 3 + 6.0 * c3 * r ** 5
        y = self._sol.sol(r)
        return complex(y[2], y[3])


@lru_cache(maxsize=256)
def _radial_cached(mu: complex, r_max: float) -> _RadialProfile:
    return _RadialProfile(mu, r_max)


def spherical_g(mu: complex, r: float, *, r_max: float = 8.0) -> complex:
    """Regular radial profile g_mu(r) with g_mu(0) = 1.

    mu = 0 gives the constant solution 1; the eigenvalue convention is the one
    in which the hyperbolic Laplacian acts on y^s with factor s(s-1).
    """
    mu = complex(mu)
    if mu == 0:
        if r < 0:
            raise DomainError("radius must be nonnegative")
        return 1.0 + 0j
    # quantized integration range keeps the dense-output cache small
    need = max(float(r_max), 1.0, float(math.ceil(r + 1e-9)))
    prof = _radial_cached(mu, need)
    return prof.value(r)


class _AngularProfile:
    """F'' = (mu / cos^2 th) F on (-pi/2, pi/2); even/odd fundamental pair."""

    def __init__(self, mu: complex, th_max: float, odd: bool = False):
        self.mu = complex(mu)
        self.th_max = float(th_max)
        if self.th_max >= math.pi / 2:
            raise DomainError("angle must stay below pi/2")
        mu_c = self.mu
        y0 = [0.0, 0.0, 1.0, 0.0] if odd else [1.0, 0.0, 0.0, 0.0]

        def rhs(th, f, fp):
            c = math.cos(th)
            return (fp, mu_c * f / (c * c))

        sol = solve_ivp(_split_complex_system(rhs), (0.0, self.th_max), y0,
                        method="RK45", rtol=1e-13, atol=1e-13, dense_output=True)
        if not sol.success:
            raise DomainError(f"angular ODE integration failed: {sol.message}")
        self._sol = sol

    def value(self, th: float) -> complex:
        y = self._sol.sol(th)
        return complex(y[0], y[1])

    def derivative(self, th: float) -> complex:
        y = self._sol.sol(th)
        return complex(y[2], y[3])


@lru_cache(maxsize=256)
def _angular_cached(mu: complex, th_max: float, odd: bool) -> _AngularProfile:
    return _AngularProfile(mu, th_max, odd)


_ANGLE_LADDER = (0.4, 0.8, 1.1, 1.3, 1.42, 1.5, 1.54, 1.5603, 1.5673,
                 math.pi / 2 - 1e-4, math.pi / 2 - 1e-6)


def _angle_level(a: float) -> float:
    for lvl in _ANGLE_LADDER:
        if a <= lvl:
            return lvl
    raise DomainError("angle outside (-pi/2, pi/2)")


def angular_f(mu: complex, theta: float, *, odd: bool = False) -> complex:
    """Angular profile f_mu(theta), even with f(0) = 1 (odd variant optional)."""
    if not -math.pi / 2 < theta < math.pi / 2:
        raise DomainError("angle outside (-pi/2, pi/2)")
    mu = complex(mu)
    if mu == 0 and not odd:
        return 1.0 + 0j
    if mu == 0 and odd:
        return complex(theta)
    a = abs(theta)
    if a < 1e-14:
        return complex(0.0) if odd else complex(1.0)
    prof = _angular_cached(mu, _angle_level(a), odd)
    val = prof.value(a)
    if odd and theta < 0:
        return -val
    return val


def angular_f_derivative(mu: complex, theta: float, *, odd: bool = False) -> complex:
    """Derivative of the even (or odd) angular profile."""
    if not -math.pi / 2 < theta < math.pi / 2:
        raise DomainError("angle outside (-pi/2, pi/2)")
    mu = complex(mu)
    if mu == 0:
        return complex(1.0) if odd else complex(0.0)
    a = abs(theta)
    prof = _angular_cached(mu, _angle_level(max(a, 1e-12)), odd)
    val = prof.derivative(a)
    if not odd and theta < 0:
        return -val
    return val


# -- independent Taylor-continuation integrators (oracles) --------------------


def _taylor_step_radial(mu: complex, r0: float, g0: complex, gp0: complex,
                        h: float, order: int = 16):
    """One Taylor step for the radial equation using local coth expansion."""
    t = np.zeros(order + 1, dtype=complex)
    t[0] = 1.0 / math.tanh(r0)
    for k in range(order):
        # coth' = 1 - coth^2
        conv = sum(t[i] * t[k - i] for i in range(k + 1))
        t[k + 1] = ((1.0 if k == 0 else 0.0) - conv) / (k + 1)
    a = np.zeros(order + 3, dtype=complex)
    a[0], a[1] = g0, gp0
    for k in range(order + 1):
        conv = sum(t[i] * (k + 1 - i) * a[k + 1 - i] for i in range(k + 1))
        a[k + 2] = (mu * a[k] - conv) / ((k + 2) * (k + 1))
    powers = h ** np.arange(order + 3)
    g = complex(np.sum(a * powers))
    gp = complex(np.sum(a[1:] * np.arange(1, order + 3) * powers[:-1]))
    return g, gp


def spherical_g_taylor(mu: complex, r: float, *, step: float = 0.05) -> complex:
    """Taylor-series continuation of the radial profile (oracle path).

    Steps stay below a quarter of the distance to the coth pole at 0, the
    local radius of convergence of the expansion.
    """
    mu = complex(mu)
    if r < 0:
        raise DomainError("radius must be nonnegative")
    r0 = 0.05
    c1 = mu / 4.0
    c2 = c1 * (mu - 2.0 / 3.0) / 16.0
    c3 = (c2 * (mu - 4.0 / 3.0) + (2.0 / 45.0) * c1) / 36.0
    if r <= r0:
        return 1.0 + c1 * r ** 2 + c2 * r ** 4 + c3 * r ** 6
    g = 1.0 + c1 * r0 ** 2 + c2 * r0 ** 4 + c3 * r0 ** 6
    gp = 2.0 * c1 * r0 + 4.0 * c2 * r0 ** 3 + 6.0 * c3 * r0 ** 5
    pos = r0
    while pos < r:
        h = min(step, r - pos, 0.25 * pos)
        g, gp = _taylor_step_radial(mu, pos, g, gp, h, order=20)
        pos += h
    return g


def _taylor_step_angular(mu: complex, th0: float, f0: complex, fp0: complex,
                         h: float, order: int = 16):
    """One Taylor step for the angular equation using local sec^2 expansion."""
    tan = np.zeros(order + 1, dtype=complex)
    tan[0] = math.tan(th0)
    for k in range(order):
        conv = sum(tan[i] * tan[k - i] for i in range(k + 1))
        tan[k + 1] = ((1.0 if k == 0 else 0.0) + conv) / (k + 1)
    sec2 = np.zeros(order + 1, dtype=complex)
    for k in range(order + 1):
        sec2[k] = sum(tan[i] * tan[k - i] for i in range(k + 1))
    sec2[0] += 1.0
    a = np.zeros(order + 3, dtype=complex)
    a[0], a[1] = f0, fp0
    for k in range(order + 1):
        conv = sum(sec2[i] * a[k - i] for i in range(k + 1))
        a[k + 2] = mu * conv / ((k + 2) * (k + 1))
    powers = h ** np.arange(order + 3)
    f = complex(np.sum(a * powers))
    fp = complex(np.sum(a[1:] * np.arange(1, order + 3) * powers[:-1]))
    return f, fp


def angular_f_taylor(mu: complex, theta: float, *, step: float = 0.04,
                     odd: bool = False) -> complex:
    """Taylor-series continuation of the angular profile (oracle path)."""
    if not -math.pi / 2 < theta < math.pi / 2:
        raise DomainError("angle outside (-pi/2, pi/2)")
    mu = complex(mu)
    a = abs(theta)
    f, fp = (0.0 + 0j, 1.0 + 0j) if odd else (1.0 + 0j, 0.0 + 0j)
    pos = 0.0
    while pos < a:
        # stay inside the disc of convergence set by the sec^2 poles
        h = min(step, a - pos, 0.3 * (math.pi / 2 - pos))
        f, fp = _taylor_step_angular(mu, pos, f, fp, h, order=20)
        pos += h
    if odd and theta < 0:
        return -f
    return f


def sample_spherical(mu: complex, grid, *, kind: str = "radial") -> SphericalSolution:
    """Tabulate a profile on an increasing grid (values and derivatives)."""
    grid = tuple(float(g) for g in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly increasing")
    if kind == "radial":
        prof = _radial_cached(complex(mu), max(grid[-1], 1.0))
        vals = tuple(prof.value(r) for r in grid)
        ders = tuple(prof.derivative(r) for r in grid)
    elif kind == "angular":
        th_max = min(grid[-1] * 1.0001 + 1e-9, math.pi / 2 - 1e-12)
        prof = _angular_cached(complex(mu), th_max, False)
        arr = np.asarray(grid, dtype=float)
        inner = arr[arr > 0]
        y = prof._sol.sol(inner)
        vals_in = y[0] + 1j * y[1]
        ders_in = y[2] + 1j * y[3]
        vals_list, ders_list = [], []
        j = 0
        for t in arr:
            if t > 0:
                vals_list.append(complex(vals_in[j]))
                ders_list.append(complex(ders_in[j]))
                j += 1
            else:
                vals_list.append(1.0 + 0j)
                ders_list.append(0.0 + 0j)
        vals = tuple(vals_list)
        ders = tuple(ders_list)
    else:
        raise DomainError("kind must be 'radial' or 'angular'")
    return SphericalSolution(complex(mu), grid, vals, ders)

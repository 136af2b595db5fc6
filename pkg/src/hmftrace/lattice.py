"""Embedded lattices, multiplier groups, characters, and cusp coordinates.

A lattice L = A(Z^n) is stored by its real basis matrix A (columns are basis
vectors).  The rank-(n-1) multiplier group M of totally positive norm-1
vectors acts coordinate-wise; its log-generators together with the all-ones
column form the invertible matrix E whose inverse supplies both the character
exponents e_j^(k) and the eigen-exponent decomposition s_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InconsistencyError
from .fields import FieldEmbedding, fundamental_totally_positive_unit


@dataclass(frozen=True)
class EmbeddedLattice:
    """Full-rank lattice in R^n; basis columns are the generating vectors."""

    basis: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if abs(np.linalg.det(self.matrix)) < 1e-14:
            raise DomainError("lattice basis is singular")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=float)

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def covolume(self) -> float:
        return abs(np.linalg.det(self.matrix))

    @classmethod
    def from_matrix(cls, a) -> "EmbeddedLattice":
        a = np.asarray(a, dtype=float)
        return cls(tuple(tuple(row) for row in a))

    @classmethod
    def from_field(cls, field: FieldEmbedding) -> "EmbeddedLattice":
        """The ring of integers embedded by the field's basis matrix."""
        return cls.from_matrix(field.matrix)

    def points_in_coeff_box(self, bound: int) -> np.ndarray:
        """All embedded lattice vectors with integer coordinates in [-bound, bound]^n."""
        rng = np.arange(-bound, bound + 1)
        mesh = np.meshgrid(*([rng] * self.n), indexing="ij")
        coeffs = np.stack([m.ravel() for m in mesh], axis=-1)
        return coeffs @ self.matrix.T

    def zeta_eligible(self, bound: int = 20, tol: float = 1e-9) -> bool:
        """True when no nonzero vector in the coefficient box has a zero coordinate."""
        pts = self.points_in_coeff_box(bound)
        nonzero = np.any(np.abs(pts) > tol, axis=1)
        return not np.any(np.abs(pts[nonzero]).min(axis=1) <= tol)


def dual_lattice(lattice: EmbeddedLattice) -> EmbeddedLattice:
    """Dual lattice L* = (A^{-1})^T (Z^n); covolumes multiply to 1."""
    return EmbeddedLattice.from_matrix(np.linalg.inv(lattice.matrix).T)


def covolume(lattice: EmbeddedLattice) -> float:
    return lattice.covolume


def vector_norm(v) -> float:
    """Product of the coordinates (the norm map on embedded vectors)."""
    return float(np.prod(np.asarray(v, dtype=float), axis=-1))


@dataclass(frozen=True)
class MultiplierGroup:
    """Group of totally positive norm-1 multipliers with its log-basis matrix."""

    generators: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for eps in self.generators:
            e = np.asarray(eps)
            if np.any(e <= 0):
                raise DomainError("multiplier generators must be totally positive")
            if abs(np.prod(e) - 1.0) > 1e-10:
                raise DomainError("multiplier generators must have norm 1")
            if abs(np.log(e).sum()) > 1e-10:
                raise DomainError("log of generator must lie in the trace-zero hyperplane")

    @property
    def n(self) -> int:
        return len(self.generators[0])

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def E_matrix(self) -> np.ndarray:
        """Columns: all-ones, then the coordinate-wise logs of each generator."""
        cols = [np.ones(self.n)]
        cols.extend(np.log(np.asarray(g)) for g in self.generators)
        return np.stack(cols, axis=1)

    @property
    def E_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.E_matrix)

    @property
    def det_E(self) -> float:
        return float(np.linalg.det(self.E_matrix))

    @property
    def log_generators(self) -> np.ndarray:
        return np.log(np.asarray(self.generators, dtype=float))

    @classmethod
    def from_field(cls, field: FieldEmbedding) -> "MultiplierGroup":
        eps = fundamental_totally_positive_unit(field)
        return cls((tuple(eps),))

    def power(self, m) -> np.ndarray:
        """The multiplier eps_1^{m_1} ... eps_{n-1}^{m_{n-1}}."""
        m = np.asarray(m, dtype=float)
        return np.exp(m @ self.log_generators)


def lambda_character(mult: MultiplierGroup, m, y) -> complex:
    """Unitary character exp(2*pi*i sum_k sum_j m_j e_j^(k) log y_k); trivial on the group."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("character argument must be totally positive")
    m = np.asarray(m, dtype=float)
    e_rows = mult.E_inverse[1:, :]            # rows e_j^(k)
    phase = 2.0 * np.pi * float(m @ (e_rows @ np.log(y)))
    return complex(math.cos(phase), math.sin(phase))


def exponents_from(mult: MultiplierGroup, s: complex, m_u) -> np.ndarray:
    """Eigen-exponents s_k = s + sum_j 2*pi*i m_j e_j^(k); their mean is s."""
    m = np.asarray(m_u, dtype=float)
    e_rows = mult.E_inverse[1:, :]
    return s + 2j * np.pi * (m @ e_rows)


def reduce_mod_multipliers(mult: MultiplierGroup, v):
    """Reduce v (no zero coordinate) into the fundamental log-cell of the group.

    Returns (representative, powers) with representative = eps^powers * v
    coordinate-wise and the trace-zero projection of log|representative| in
    the half-open cell spanned by the log-generators.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v == 0):
        raise DomainError("vector has a zero coordinate")
    logs = np.log(np.abs(v))
    proj = logs - logs.mean()
    # coordinates of proj in the log-generator basis (solve within the hyperplane)
    basis = mult.log_generators.T              # n x (n-1)
    coeff, *_ = np.linalg.lstsq(basis, proj, rcond=None)
    # half-open cell with boundary ties resolved toward the lower corner
    powers = -np.floor(coeff + 1e-9).astype(int)
    rep = mult.power(powers) * v
    return rep, powers


def _to_int_matrix(m: np.ndarray, tol: float) -> np.ndarray:
    rounded = np.rint(m)
    if np.max(np.abs(m - rounded)) > tol:
        raise InconsistencyError("expected an integer matrix; residual above tolerance")
    return rounded.astype(object)  # exact python ints


def smith_normal_form(mat):
    """Exact Smith normal form over Z: returns (D, U, V) with D = U @ mat @ V."""
    a = [[int(x) for x in row] for row in np.asarray(mat, dtype=object)]
    n = len(a)
    m = len(a[0])
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    k = 0
    while k < min(n, m):
        # move a nonzero pivot of minimal magnitude to (k, k)
        pivot = None
        for i in range(k, n):
            for j in range(k, m):
                if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(k, pivot[0])
        swap_cols(k, pivot[1])
        while True:
            done = True
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    add_row(k, i, -(a[i][k] // a[k][k]))
                    if a[i][k] != 0:
                        swap_rows(k, i)
                        done = False
            for j in range(k + 1, m):
                if a[k][j] != 0:
                    add_col(k, j, -(a[k][j] // a[k][k]))
                    if a[k][j] != 0:
                        swap_cols(k, j)
                        done = False
            if done:
                break
        # enforce divisibility d_k | a[i][j] for the remaining block
        fixed = False
        for i in range(k + 1, n):
            for j in range(k + 1, m):
                if a[i][j] % a[k][k] != 0:
                    add_row(i, k, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]
        k += 1
    return (np.array(a, dtype=object), np.array(u, dtype=object), np.array(v, dtype=object))


def _multiplication_int_matrix(lattice: EmbeddedLattice, factor, tol: float = 1e-6):
    """Integer matrix of coordinate-wise multiplication by `factor` in the lattice basis."""
    a = lattice.matrix
    m = np.linalg.inv(a) @ np.diag(np.asarray(factor, dtype=float)) @ a
    return _to_int_matrix(m, tol)


def _int_det(mat) -> int:
    """Exact determinant of a small integer matrix (fraction-free expansion)."""
    a = np.asarray(mat, dtype=object)
    n = a.shape[0]
    if n == 1:
        return int(a[0, 0])
    if n == 2:
        return int(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    det = 0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        det += (-1) ** j * int(a[0, j]) * _int_det(minor)
    return det


def quotient_size(lattice: EmbeddedLattice, u) -> int:
    """Order of L / (u-1)L, computed exactly from the integer matrix of u-1.

    Must agree with |N(u-1)| rounded to the nearest integer; a mismatch beyond
    1e-6 raises InconsistencyError.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u - 1.0 == 0):
        raise DomainError("u - 1 has a zero coordinate")
    m_int = _multiplication_int_matrix(lattice, u - 1.0)
    size = abs(_int_det(m_int))
    float_norm = abs(vector_norm(u - 1.0))
    if abs(float_norm - size) > 1e-6 * max(1.0, size):
        raise InconsistencyError(
            f"|N(u-1)| = {float_norm} does not match lattice index {size}")
    return int(size)


def _inv_unimodular(u) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix via Fractions."""
    a = np.asarray(u, dtype=object)
    n = a.shape[0]
    aug = [[Fraction(int(a[i, j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1, 1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            q = aug[i][n + j]
            if q.denominator != 1:
                raise InconsistencyError("matrix is not unimodular")
            out[i, j] = int(q)
    return out


def quotient_reps_mod_units(lattice: EmbeddedLattice, u_m, mult: MultiplierGroup):
    """Representatives of (L/(u_m - 1)L) / M with their orbit sizes.

    Orbits of the multiplier action on the finite quotient are found by BFS
    over residue classes; the sizes sum to quotient_size(L, u_m).  Each entry
    is (embedded representative vector, orbit size).
    """
    size = quotient_size(lattice, u_m)
    m_int = _multiplication_int_matrix(lattice, np.asarray(u_m, dtype=float) - 1.0)
    d, u_tr, _v = smith_normal_form(m_int)
    diag = [int(d[i, i]) for i in range(d.shape[0])]
    if any(x == 0 for x in diag):
        raise InconsistencyError("quotient is infinite")
    u_inv = _inv_unimodular(u_tr)

    gens = []
    for g in mult.generators:
        e_int = _multiplication_int_matrix(lattice, g, tol=1e-8)
        gens.append(e_int)
        gens.append(_inv_unimodular(e_int))

    def key_of(vec) -> tuple:
        w = u_tr @ vec
        return tuple(int(w[i]) % diag[i] for i in range(len(diag)))

    def coords_of(key) -> np.ndarray:
        return u_inv @ np.array([int(k) for k in key], dtype=object)

    seen: set[tuple] = set()
    out = []
    from itertools import product as _product
    for key in _product(*[range(x) for x in diag]):
        if key in seen:
            continue
        orbit = {key}
        frontier = [key]
        while frontier:
            cur = frontier.pop()
            x = coords_of(cur)
            for g in gens:
                nxt = key_of(g @ x)
                if nxt not in orbit:
                    if len(orbit) > size:
                        raise InconsistencyError("multiplier orbit failed to close")
                    orbit.add(nxt)
                    frontier.append(nxt)
        seen |= orbit
        rep_coeffs = np.array([int(c) for c in coords_of(key)], dtype=float)
        rep = lattice.matrix @ rep_coeffs
        out.append((rep, len(orbit)))
    if sum(sz for _, sz in out) != size:
        raise InconsistencyError("orbit sizes do not sum to the quotient order")
    return out


@dataclass(frozen=True)
class CuspFrame:
    """Data of a cusp: scaling element, translation lattice, multiplier group.

    The scaling element must provide vectors a, b, c, d (each of length n)
    describing the fractional-linear map taking infinity to the cusp; the
    built-in frame at infinity uses the identity.
    """

    scaling_element: object
    lattice: EmbeddedLattice
    multipliers: MultiplierGroup

    @classmethod
    def at_infinity(cls, field: FieldEmbedding) -> "CuspFrame":
        from .modgroup import GroupElementN
        return cls(GroupElementN.identity(field.degree),
                   EmbeddedLattice.from_field(field),
                   MultiplierGroup.from_field(field))


def cusp_coordinates(frame: CuspFrame, z):
    """Coordinates (X_1..X_n, Y_0, Y_1..Y_{n-1}) of z at the cusp.

    With sigma^{-1} z = x' + iy': Y_0 = prod(y'), x' = sum X_k b_k and
    log(y'/(prod y')^{1/n}) = sum Y_l log(eps_l).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("point must lie in the upper half-space")
    g = frame.scaling_element.inverse()
    a, b, c, d = (np.asarray(v, dtype=float) for v in (g.a, g.b, g.c, g.d))
    w = (a * z + b) / (c * z + d)
    xp, yp = w.real, w.imag
    n = frame.lattice.n
    y0 = float(np.prod(yp))
    x_coords = np.linalg.solve(frame.lattice.matrix, xp)
    logpart = np.log(yp / y0 ** (1.0 / n))
    basis = frame.multipliers.log_generators.T
    y_coords, *_ = np.linalg.lstsq(basis, logpart, rcond=None)
    return x_coords, y0, y_coords

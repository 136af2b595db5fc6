"""Real quadratic fields: exact integral-basis arithmetic and unit groups.

Elements carry exact rational coordinates in the integral basis {1, omega}
with omega = sqrt(d) for d = 2,3 mod 4 and omega = (1+sqrt(d))/2 for
d = 1 mod 4; embeddings are evaluated in binary64 only at the point where a
quantity leaves the exact world.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidFieldError, UnsupportedDegreeError

_PELL_SEARCH_LIMIT = 10_000_000


def _is_squarefree(d: int) -> bool:
    if d % 4 == 0:
        return False
    p = 3
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 2
    return True


@dataclass(frozen=True)
class FieldElement:
    """Coordinates of a field element in the integral basis (exact rationals)."""

    coeffs: tuple[Fraction, ...]

    def __iter__(self):
        return iter(self.coeffs)


@dataclass(frozen=True)
class FieldEmbedding:
    """A totally real field given by the real embedding matrix of an integral basis.

    basis_matrix[i][k] is the i-th real embedding of the k-th integral basis
    element; for quadratic fields the rows are algebraic conjugates of each
    other and |det|^2 equals the discriminant.
    """

    degree: int
    basis_matrix: tuple[tuple[float, ...], ...]
    discriminant: int
    radicand: int | None = None  # squarefree d for Q(sqrt d), None otherwise

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis_matrix, dtype=float)

    # -- exact arithmetic in the integral basis ------------------------------

    def element(self, *coeffs) -> FieldElement:
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates")
        return FieldElement(tuple(Fraction(c) for c in coeffs))

    def one(self) -> FieldElement:
        return self.element(1, *([0] * (self.degree - 1)))

    def multiply(self, x: FieldElement, y: FieldElement) -> FieldElement:
        """Exact product; quadratic fields only (omega^2 reduction)."""
        if self.degree != 2 or self.radicand is None:
            raise UnsupportedDegreeError("exact multiplication needs a quadratic field")
        a0, a1 = x.coeffs
        b0, b1 = y.coeffs
        d = self.radicand
        if d % 4 == 1:
            # omega^2 = omega + (d-1)/4
            c = Fraction(d - 1, 4)
            return FieldElement((a0 * b0 + a1 * b1 * c, a0 * b1 + a1 * b0 + a1 * b1))
        # omega^2 = d
        return FieldElement((a0 * b0 + a1 * b1 * d, a0 * b1 + a1 * b0))

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return FieldElement(tuple(a + b for a, b in zip(x.coeffs, y.coeffs)))

    def neg(self, x: FieldElement) -> FieldElement:
        return FieldElement(tuple(-a for a in x.coeffs))

    def norm(self, x: FieldElement) -> Fraction:
        """Exact field norm (product of conjugates)."""
        if self.degree != 2 or self.radicand is None:
            raise UnsupportedDegreeError("exact norm needs a quadratic field")
        a, b = x.coeffs
        d = self.radicand
        if d % 4 == 1:
            return a * a + a * b - b * b * Fraction(d - 1, 4)
        return a * a - b * b * d

    def trace_vector(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def invert(self, x: FieldElement) -> FieldElement:
        n = self.norm(x)
        if n == 0:
            raise ZeroDivisionError("element is zero")
        a, b = x.coeffs
        d = self.radicand
        if d % 4 == 1:
            # conjugate of a + b*omega is (a+b) - b*omega
            conj = FieldElement((a + b, -b))
        else:
            conj = FieldElement((a, -b))
        return FieldElement(tuple(c / n for c in conj.coeffs))


def make_quadratic_field(d: int) -> FieldEmbedding:
    """Field Q(sqrt d) for squarefree d >= 2, with the classical integral basis."""
    if not isinstance(d, (int, np.integer)) or d < 2 or not _is_squarefree(int(d)):
        raise InvalidFieldError(f"d={d!r} is not a squarefree integer >= 2")
    d = int(d)
    r = math.sqrt(d)
    if d % 4 == 1:
        basis = ((1.0, (1.0 + r) / 2.0), (1.0, (1.0 - r) / 2.0))
        disc = d
    else:
        basis = ((1.0, r), (1.0, -r))
        disc = 4 * d
    return FieldEmbedding(degree=2, basis_matrix=basis, discriminant=disc, radicand=d)


def embed(field: FieldEmbedding, x: FieldElement) -> np.ndarray:
    """Real embeddings of x: basis_matrix . coeffs, evaluated in binary64."""
    coeffs = np.array([float(c) for c in x.coeffs])
    return field.matrix @ coeffs


def _unit_candidates(d: int, b: int) -> list[tuple[int, int]]:
    """Integer solutions (a, b) of |N(a + b*omega)| = 1 for this b."""
    out = []
    if d % 4 == 1:
        # norm(a + b*omega) = a^2 + a*b - b^2 (d-1)/4
        q = (d - 1) // 4
        for sign in (1, -1):
            disc = b * b + 4 * (q * b * b + sign)
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc or (r - b) % 2 != 0:
                continue
            out.append(((r - b) // 2, b))
            out.append(((-r - b) // 2, b))
    else:
        for sign in (1, -1):
            a2 = d * b * b + sign
            if a2 < 0:
                continue
            a = math.isqrt(a2)
            if a * a == a2:
                out.append((a, b))
                out.append((-a, b))
    return out


def fundamental_unit(field: FieldEmbedding) -> FieldElement:
    """Fundamental unit of O_K: smallest embedding > 1 among |norm| = 1 elements.

    Found by searching omega-coefficients b = 1, 2, ...; powers of the
    fundamental unit have strictly growing b, so the first hit (minimized over
    sign choices) is fundamental.
    """
    if field.degree != 2 or field.radicand is None:
        raise UnsupportedDegreeError("unit computation implemented for n=2 only")
    d = field.radicand
    omega1 = field.matrix[0, 1]
    for b in range(1, _PELL_SEARCH_LIMIT):
        best = None
        for a, bb in _unit_candidates(d, b):
            e = a + bb * omega1
            if e > 1.0 + 1e-12 and (best is None or e < best[0]):
                best = (e, a, bb)
        if best is not None:
            return field.element(best[1], best[2])
    raise InvalidFieldError(f"no fundamental unit found below search limit for d={d}")


def totally_positive_unit_element(field: FieldEmbedding) -> FieldElement:
    """Generator of the squared-unit group as an exact element (epsilon = u0^2)."""
    u0 = fundamental_unit(field)
    return field.multiply(u0, u0)


def fundamental_totally_positive_unit(field: FieldEmbedding) -> np.ndarray:
    """Embeddings of the generator of the group of squares of units.

    Both coordinates are positive, the product is 1, and the first coordinate
    exceeds 1.  The multiplier group of the modular group over the field is
    generated by this vector.
    """
    eps = embed(field, totally_positive_unit_element(field))
    if eps[0] < 1.0:
        eps = eps[::-1].copy()
    return eps

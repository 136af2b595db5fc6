"""Elements of the product group, classification, kernels, Eisenstein sums.

An element is a 2x2 matrix of real n-vectors acting coordinate-wise by
fractional-linear maps.  Elements coming from the modular group over a field
carry exact rational coordinates, which is what makes the parabolic boundary
|tr| = 2 and the cusp test for fixed points decidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (AmbiguousClassificationError, DomainError,
                     ResourceError, UnsupportedDegreeError)
from .fields import FieldElement, FieldEmbedding, embed, fundamental_unit
from .lattice import MultiplierGroup, exponents_from
from .transforms import TestFunction

_TRACE_BAND = 1e-9


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    pn = math.isqrt(x.numerator)
    pd = math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


def field_sqrt(field: FieldEmbedding, x: FieldElement) -> FieldElement | None:
    """A square root of x in the quadratic field, or None if x is not a square."""
    d = field.radicand
    a, b = x.coeffs
    # convert to alpha + beta*sqrt(d)
    if d % 4 == 1:
        alpha, beta = a + b / 2, b / 2
    else:
        alpha, beta = a, b
    if beta == 0:
        r = _fraction_sqrt(alpha)
        if r is not None:
            u, v = r, Fraction(0)
        else:
            r = _fraction_sqrt(alpha / d)
            if r is None:
                return None
            u, v = Fraction(0), r
    else:
        nrm = _fraction_sqrt(alpha * alpha - d * beta * beta)
        if nrm is None:
            return None
        u = v = None
        for root in ((alpha + nrm) / 2, (alpha - nrm) / 2):
            ru = _fraction_sqrt(root)
            if ru is not None and ru != 0:
                vv = beta / (2 * ru)
                if ru * ru + d * vv * vv == alpha and 2 * ru * vv == beta:
                    u, v = ru, vv
                    break
        if u is None:
            return None
    # back to the integral basis
    if d % 4 == 1:
        out = FieldElement((u - v, 2 * v))
    else:
        out = FieldElement((u, v))
    return out


@dataclass(frozen=True)
class GroupElementN:
    """2x2 matrix of real n-vectors, det 1 per coordinate, PSL-normalized.

    The representative is chosen so the first nonzero entry of coordinate 1
    is positive; exact field coordinates, when present, track the same sign.
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[float, ...]
    d: tuple[float, ...]
    field: FieldEmbedding | None = None
    exact: tuple[FieldElement, FieldElement, FieldElement, FieldElement] | None = None

    def __post_init__(self):
        det = (np.asarray(self.a) * np.asarray(self.d)
               - np.asarray(self.b) * np.asarray(self.c))
        if np.max(np.abs(det - 1.0)) > 1e-10:
            raise DomainError("determinant must be 1 in every coordinate")
        for entry in (self.a, self.b, self.c, self.d):
            if entry[0] != 0.0:
                if entry[0] < 0.0:
                    object.__setattr__(self, "a", tuple(-x for x in self.a))
                    object.__setattr__(self, "b", tuple(-x for x in self.b))
                    object.__setattr__(self, "c", tuple(-x for x in self.c))
                    object.__setattr__(self, "d", tuple(-x for x in self.d))
                    if self.exact is not None:
                        neg = tuple(FieldElement(tuple(-c for c in e.coeffs))
                                    for e in self.exact)
                        object.__setattr__(self, "exact", neg)
                break

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def identity(cls, n: int) -> "GroupElementN":
        one = (1.0,) * n
        zero = (0.0,) * n
        return cls(one, zero, zero, one)

    @classmethod
    def from_field_elements(cls, field: FieldEmbedding, a, b, c, d) -> "GroupElementN":
        els = tuple(x if isinstance(x, FieldElement) else field.element(*x)
                    for x in (a, b, c, d))
        ad = field.multiply(els[0], els[3])
        bc = field.multiply(els[1], els[2])
        if field.add(ad, field.neg(bc)) != field.one():
            raise DomainError("exact determinant is not 1")
        embs = tuple(tuple(embed(field, e)) for e in els)
        return cls(*embs, field=field, exact=els)

    @classmethod
    def scaling(cls, field: FieldEmbedding, u: FieldElement) -> "GroupElementN":
        """diag(u, u^{-1}) for a unit u."""
        inv = field.invert(u)
        zero = field.element(0, 0)
        return cls.from_field_elements(field, u, zero, zero, inv)

    def matrices(self) -> np.ndarray:
        """Shape (n, 2, 2) array of the coordinate matrices."""
        out = np.empty((self.n, 2, 2))
        out[:, 0, 0] = self.a
        out[:, 0, 1] = self.b
        out[:, 1, 0] = self.c
        out[:, 1, 1] = self.d
        return out

    def inverse(self) -> "GroupElementN":
        if self.exact is not None and self.field is not None:
            f = self.field
            ae, be, ce, de = self.exact
            return GroupElementN.from_field_elements(
                f, de, f.neg(be), f.neg(ce), ae)
        return GroupElementN(self.d, tuple(-x for x in self.b),
                             tuple(-x for x in self.c), self.a)

    def __matmul__(self, other: "GroupElementN") -> "GroupElementN":
        a1, b1, c1, d1 = (np.asarray(v) for v in (self.a, self.b, self.c, self.d))
        a2, b2, c2, d2 = (np.asarray(v) for v in (other.a, other.b, other.c, other.d))
        prod = (tuple(a1 * a2 + b1 * c2), tuple(a1 * b2 + b1 * d2),
                tuple(c1 * a2 + d1 * c2), tuple(c1 * b2 + d1 * d2))
        if (self.exact is not None and other.exact is not None
                and self.field is not None and self.field == other.field):
            f = self.field
            ae1, be1, ce1, de1 = self.exact
            ae2, be2, ce2, de2 = other.exact
            return GroupElementN.from_field_elements(
                f,
                f.add(f.multiply(ae1, ae2), f.multiply(be1, ce2)),
                f.add(f.multiply(ae1, be2), f.multiply(be1, de2)),
                f.add(f.multiply(ce1, ae2), f.multiply(de1, ce2)),
                f.add(f.multiply(ce1, be2), f.multiply(de1, de2)))
        return GroupElementN(*prod)

    def trace(self) -> np.ndarray:
        return np.asarray(self.a) + np.asarray(self.d)

    def serialize(self) -> dict:
        """JSON-ready form: embedded floats plus exact coordinate strings."""
        out = {
            "a": list(self.a), "b": list(self.b),
            "c": list(self.c), "d": list(self.d),
        }
        if self.exact is not None:
            out["exact_coords"] = [str(coeff) for el in self.exact
                                   for coeff in el.coeffs]
        return out

    @classmethod
    def deserialize(cls, payload: dict, field: FieldEmbedding | None = None
                    ) -> "GroupElementN":
        if field is not None and "exact_coords" in payload:
            coords = [Fraction(c) for c in payload["exact_coords"]]
            els = [FieldElement(tuple(coords[2 * i:2 * i + 2])) for i in range(4)]
            return cls.from_field_elements(field, *els)
        return cls(tuple(payload["a"]), tuple(payload["b"]),
                   tuple(payload["c"]), tuple(payload["d"]))

    def exact_trace(self) -> FieldElement | None:
        if self.exact is None or self.field is None:
            return None
        return self.field.add(self.exact[0], self.exact[3])


def act(gamma: GroupElementN, z):
    """Coordinate-wise fractional-linear action on points of the upper half-space.

    z has shape (..., n) complex with positive imaginary parts.
    """
    z = np.asarray(z, dtype=complex)
    a = np.asarray(gamma.a)
    b = np.asarray(gamma.b)
    c = np.asarray(gamma.c)
    d = np.asarray(gamma.d)
    return (a * z + b) / (c * z + d)


@dataclass(frozen=True)
class ClassificationResult:
    """Conjugacy-class data: kind, rotation angles, hyperbolic norms.

    angles[k] is set exactly on elliptic coordinates (value in (0, pi/2],
    folded via |cos|); norms[k] on hyperbolic coordinates.  For mixed and
    totally hyperbolic elements each norm exceeds 1; a hyperbolic-parabolic
    element instead carries the coherent norm-1 multiplier vector of its fixed
    cusp pair, first coordinate > 1.
    """

    kind: str
    angles: tuple = ()
    norms: tuple = ()


def _coordinate_types(gamma: GroupElementN) -> list[str]:
    tr = gamma.trace()
    exact_tr = gamma.exact_trace()
    types = []
    for k, t in enumerate(np.abs(tr)):
        if abs(t - 2.0) <= _TRACE_BAND:
            if exact_tr is None:
                raise AmbiguousClassificationError(
                    f"coordinate {k}: |trace| within {_TRACE_BAND} of 2 and no exact data")
            if exact_tr.coeffs in ((Fraction(2), Fraction(0)), (Fraction(-2), Fraction(0))):
                types.append("parabolic")
            elif t < 2.0:
                types.append("elliptic")
            else:
                types.append("hyperbolic")
        elif t < 2.0:
            types.append("elliptic")
        else:
            types.append("hyperbolic")
    return types


def _fixed_point_is_cusp(gamma: GroupElementN) -> bool:
    """Exact test: does a totally hyperbolic element fix a point of P^1(K)?"""
    if gamma.exact is None or gamma.field is None:
        return False
    f = gamma.field
    ae, be, ce, de = gamma.exact
    if all(x == 0 for x in ce.coeffs):
        return True  # fixes infinity
    tr = f.add(ae, de)
    disc = f.add(f.multiply(tr, tr), f.element(-4, 0))
    return field_sqrt(f, disc) is not None


def _hyp_par_multiplier(gamma: GroupElementN) -> np.ndarray:
    """Coherent squared-eigenvalue vector at a fixed cusp, first coordinate > 1."""
    f = gamma.field
    ae, be, ce, de = gamma.exact
    a = np.asarray(gamma.a)
    c = np.asarray(gamma.c)
    d = np.asarray(gamma.d)
    if all(x == 0 for x in ce.coeffs):
        u = a * a
    else:
        tr = f.add(ae, de)
        disc = f.add(f.multiply(tr, tr), f.element(-4, 0))
        root = field_sqrt(f, disc)
        # fixed points (a - d +- sqrt(disc)) / (2c)
        num = f.add(ae, f.neg(de))
        x1 = embed(f, f.add(num, root)) / (2.0 * c)
        u = 1.0 / (c * x1 + d) ** 2
    if u[0] < 1.0:
        u = 1.0 / u
    return u


def classify(gamma: GroupElementN) -> ClassificationResult:
    """Coordinate-wise trace classification with exact-arithmetic boundary handling.

    Hyperbolic elements without exact field coordinates are reported totally
    hyperbolic (the cusp test for fixed points needs exact data).
    """
    tr = gamma.trace()
    n = gamma.n
    if (np.allclose(gamma.b, 0.0) and np.allclose(gamma.c, 0.0)
            and np.allclose(np.abs(gamma.a), 1.0)):
        return ClassificationResult("identity")
    types = _coordinate_types(gamma)
    angles = [None] * n
    norms = [None] * n
    for k, ty in enumerate(types):
        t = abs(tr[k])
        if ty == "elliptic":
            angles[k] = math.acos(min(1.0, t / 2.0))
        elif ty == "hyperbolic":
            half = (t + math.sqrt(t * t - 4.0)) / 2.0
            norms[k] = half * half
    if all(ty == "parabolic" for ty in types):
        return ClassificationResult("totally-parabolic")
    if any(ty == "parabolic" for ty in types):
        raise DomainError("parabolic coordinate mixed with non-parabolic ones")
    if all(ty == "elliptic" for ty in types):
        return ClassificationResult("totally-elliptic", angles=tuple(angles))
    if all(ty == "hyperbolic" for ty in types):
        if _fixed_point_is_cusp(gamma):
            u = _hyp_par_multiplier(gamma)
            return ClassificationResult("hyperbolic-parabolic", norms=tuple(u))
        return ClassificationResult("totally-hyperbolic", norms=tuple(norms))
    return ClassificationResult("mixed", angles=tuple(angles), norms=tuple(norms))


def point_pair_args(z, w) -> np.ndarray:
    """|z - w|^2 / (Im z Im w) per coordinate; the invariant kernel argument."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs(z - w) ** 2 / (z.imag * w.imag)


def kernel_k(psi: TestFunction, z, w) -> float | np.ndarray:
    """Point-pair invariant kernel psi(|z-w|^2/(Im z Im w))."""
    return psi(point_pair_args(z, w))


def automorphic_kernel_partial(psi: TestFunction, elements, z, w) -> float:
    """Partial automorphic kernel: sum of k(z, gamma w) over the supplied list."""
    total = 0.0
    z = np.asarray(z, dtype=complex)
    for gamma in elements:
        total += float(kernel_k(psi, z, act(gamma, w)))
    return total


def _elements_in_height(field: FieldEmbedding, height: float) -> list[FieldElement]:
    """All ring elements whose embeddings are both at most `height` in absolute value."""
    d = field.radicand
    r = math.sqrt(d)
    if d % 4 == 1:
        b_max = int(2.0 * height / r) + 1
        a_max = int(height + b_max / 2.0) + 1
    else:
        b_max = int(height / r) + 1
        a_max = int(height) + 1
    out = []
    for a0 in range(-a_max, a_max + 1):
        for a1 in range(-b_max, b_max + 1):
            el = field.element(a0, a1)
            e = embed(field, el)
            if np.max(np.abs(e)) <= height + 1e-12:
                out.append(el)
    return out


def enumerate_group_elements(field: FieldEmbedding, height_bound: float,
                             *, element_cap: int = 200_000) -> list[GroupElementN]:
    """Determinant-1 matrices over the ring with all embedding entries <= bound.

    Sign-normalized and deduplicated; raises ResourceError when the candidate
    budget would be exceeded.
    """
    if field.degree != 2:
        raise UnsupportedDegreeError("element enumeration implemented for n=2")
    base = _elements_in_height(field, height_bound)
    if len(base) ** 2 > element_cap * 8:
        raise ResourceError(f"height bound {height_bound} exceeds the element budget")
    # bucket products x*y by exact coefficients
    products: dict[tuple, list[tuple[FieldElement, FieldElement]]] = {}
    for x in base:
        for y in base:
            key = tuple(field.multiply(x, y).coeffs)
            products.setdefault(key, []).append((x, y))
    one = Fraction(1)
    out = {}
    for bc_key, bc_pairs in products.items():
        ad_key = (bc_key[0] + one, bc_key[1])
        for a, dd in products.get(ad_key, ()):  # ad - bc = 1
            for b, c in bc_pairs:
                try:
                    g = GroupElementN.from_field_elements(field, a, b, c, dd)
                except DomainError:
                    continue
                key = tuple(tuple(e.coeffs) for e in g.exact)
                if key not in out:
                    if len(out) >= element_cap:
                        raise ResourceError("element cap reached")
                    out[key] = g
    return list(out.values())


class EisensteinSum:
    """Truncated Eisenstein sum over coprime coset pairs (c, d) modulo units.

    Pairs are enumerated in the coefficient box induced by the norm bound; c
    is reduced into the fundamental log-cell of the full unit group with its
    sign fixed exactly, so each coset is counted once.  `half` masks the
    sub-sum with bound/2, which feeds the reported tail estimate.
    """

    def __init__(self, field: FieldEmbedding, s: complex, m, bound: float):
        if not (np.real(s) > 1.0):
            raise DomainError("direct Eisenstein summation needs Re s > 1")
        self.field = field
        self.mult = MultiplierGroup.from_field(field)
        self.s_k = exponents_from(self.mult, complex(s), m)
        self.bound = float(bound)
        pairs, halfmask = _coset_pairs(field, self.bound)
        self._c = np.array([p[0] for p in pairs], dtype=complex)
        self._d = np.array([p[1] for p in pairs], dtype=complex)
        self._half = halfmask

    def value(self, z, *, half: bool = False) -> complex:
        z = np.asarray(z, dtype=complex)
        denom = self._c * z[None, :] + self._d
        ys = z.imag[None, :] / np.abs(denom) ** 2
        terms = np.exp(np.sum(self.s_k[None, :] * np.log(ys), axis=1))
        if half:
            terms = terms[self._half]
        return complex(terms.sum())

    def tail_estimate(self, z) -> float:
        full = self.value(z)
        part = self.value(z, half=True)
        return 2.0 * abs(full - part) + 1e-12 * abs(full)


def _euclid_coprime(field: FieldEmbedding, x: FieldElement, y: FieldElement) -> bool:
    """gcd(x, y) is a unit, via the Euclidean algorithm with nearest-integer division.

    Valid for norm-Euclidean real quadratic fields (d = 2, 3, 5, 6, 7, 11, ...).
    """
    a, b = x, y
    for _ in range(200):
        if all(c == 0 for c in b.coeffs):
            return abs(field.norm(a)) == 1
        # nearest-integer quotient of a/b
        q = field.multiply(a, field.invert(b))
        q_round = field.element(*(Fraction(round(c)) for c in q.coeffs))
        a, b = b, field.add(a, field.neg(field.multiply(q_round, b)))
    return False


def _coset_pairs(field: FieldEmbedding, bound: float):
    """Canonical coprime pairs (c, d) with |N| up to the bound, modulo units."""
    u0 = fundamental_unit(field)
    u0_emb = embed(field, u0)
    log_u1 = math.log(abs(u0_emb[0]))
    height = math.sqrt(bound) * abs(u0_emb[0]) + 1e-9
    cands = _elements_in_height(field, height)
    c_reps = []
    seen_c = set()
    for el in cands:
        e = embed(field, el)
        nrm = e[0] * e[1]
        if abs(nrm) < 1e-12 or abs(nrm) > bound:
            continue
        t = (math.log(abs(e[0])) - 0.5 * math.log(abs(nrm))) / log_u1
        if not (-1e-12 <= t < 1.0 - 1e-12):
            continue
        if e[0] < 0:
            el = field.neg(el)
            e = -e
        if el.coeffs in seen_c:  # el and -el canonicalize to the same class
            continue
        seen_c.add(el.coeffs)
        c_reps.append((el, e))
    d_pool = []
    for el in cands:
        e = embed(field, el)
        nrm = e[0] * e[1]
        if abs(nrm) <= bound + 1e-12:
            d_pool.append((el, e))
    pairs = [((0.0, 0.0), (1.0, 1.0), 0.0)]  # the identity coset (c = 0)
    for c_el, c_emb in c_reps:
        size_c = abs(c_emb[0] * c_emb[1])
        for d_el, d_emb in d_pool:
            if all(x == 0 for x in d_el.coeffs):
                # (c, 0) is coprime only for unit c; canonical rep is (1, 0)
                if c_el.coeffs == (Fraction(1), Fraction(0)):
                    pairs.append((tuple(c_emb), (0.0, 0.0), size_c))
                continue
            if not _euclid_coprime(field, c_el, d_el):
                continue
            size = max(size_c, abs(d_emb[0] * d_emb[1]))
            pairs.append((tuple(c_emb), tuple(d_emb), size))
    halfmask = np.array([p[2] <= 0.5 * bound for p in pairs])
    return [(p[0], p[1]) for p in pairs], halfmask


def eisenstein_direct(field: FieldEmbedding, s: complex, m, z,
                      denominator_norm_bound: float = 30.0):
    """Truncated Eisenstein series at z for Re s > 1.

    Returns (value, tail_estimate).  The sum runs over coprime pairs modulo
    units with norms up to the bound plus the identity coset; exponents come
    from the eigen-exponent decomposition of (s, m).
    """
    es = EisensteinSum(field, s, m, denominator_norm_bound)
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("z must lie in the upper half-space")
    return es.value(z), es.tail_estimate(z)

import math

import numpy as np
import pytest

from hmftrace.errors import DomainError, InconsistencyError
from hmftrace.fields import make_quadratic_field
from hmftrace.lattice import (
    CuspFrame,
    EmbeddedLattice,
    MultiplierGroup,
    covolume,
    cusp_coordinates,
    dual_lattice,
    exponents_from,
    lambda_character,
    quotient_reps_mod_units,
    quotient_size,
    reduce_mod_multipliers,
    smith_normal_form,
    vector_norm,
)

SQRT2 = math.sqrt(2.0)
K2 = make_quadratic_field(2)
K5 = make_quadratic_field(5)
L2 = EmbeddedLattice.from_field(K2)
L5 = EmbeddedLattice.from_field(K5)
M2 = MultiplierGroup.from_field(K2)
M5 = MultiplierGroup.from_field(K5)
EPS2 = 3.0 + 2.0 * SQRT2


def test_dual_identity_basis():
    L = EmbeddedLattice.from_matrix(np.eye(2))
    assert np.allclose(dual_lattice(L).matrix, np.eye(2))


def test_dual_of_ring_of_integers():
    D = dual_lattice(L2)
    # invert-transpose by hand: columns (0.5, 0.5) and (0.35355339, -0.35355339)
    assert np.allclose(D.matrix[:, 0], [0.5, 0.5])
    assert np.allclose(D.matrix[:, 1], [0.35355339, -0.35355339])


def test_dual_involution_covolume():
    for L in (L2, L5, EmbeddedLattice.from_matrix([[2.0, 0.3], [0.1, 1.5]])):
        assert abs(covolume(L) * covolume(dual_lattice(L)) - 1.0) <= 1e-12
        DD = dual_lattice(dual_lattice(L))
        assert abs(covolume(DD) - covolume(L)) <= 1e-12


def test_covolumes():
    assert abs(covolume(L2) - 2.82842712) < 1e-8   # sqrt 8
    assert abs(covolume(L5) - 2.23606798) < 1e-8   # sqrt 5


def test_vector_norm():
    assert vector_norm((1.0, 1.0)) == 1.0
    eps = 3.0 + 2.0 * SQRT2
    assert abs(vector_norm((eps, 1.0 / eps)) - 1.0) <= 1e-10
    v = np.array([2 + 2 * SQRT2, 2 - 2 * SQRT2])
    assert abs(vector_norm(v) - (-4.0)) < 1e-10


def test_dual_invariant_under_multipliers():
    rng = np.random.default_rng(11)
    for L, M in ((L2, M2), (L5, M5)):
        D = dual_lattice(L)
        eps = np.asarray(M.generators[0])
        coeffs = rng.integers(-8, 9, size=(50, 2))
        vecs = coeffs @ D.matrix.T
        moved = eps * vecs
        back = np.linalg.solve(D.matrix, moved.T).T
        assert np.max(np.abs(back - np.rint(back))) <= 1e-8


def test_multiplier_group_matrix_layout():
    E = M2.E_matrix
    assert np.allclose(E[:, 0], 1.0)
    assert abs(E[0, 1] - math.log(EPS2)) < 1e-12
    assert abs(E[1, 1] + math.log(EPS2)) < 1e-12
    assert np.allclose(M2.E_matrix @ M2.E_inverse, np.eye(2), atol=1e-10)
    assert abs(abs(M2.det_E) - 3.52549434) < 1e-8


def test_lambda_character_values():
    # m = 0 is trivial
    assert lambda_character(M2, (0,), (1.7, 0.3)) == pytest.approx(1.0)
    # generators are mapped to 1 for every m
    for m in (-2, -1, 1, 3):
        val = lambda_character(M2, (m,), M2.generators[0])
        assert abs(val - 1.0) <= 1e-10
    # frozen value at y = (2, 1): phase 2*pi*log(2)/(2 log eps)
    val = lambda_character(M2, (1,), (2.0, 1.0))
    phase = 2.0 * math.pi * math.log(2.0) / (2.0 * math.log(EPS2))
    assert abs(val - complex(math.cos(phase), math.sin(phase))) < 1e-12
    assert abs(val - complex(0.32920331, 0.94425906)) < 1e-7
    assert abs(abs(val) - 1.0) < 1e-12


def test_lambda_character_is_multiplicative():
    rng = np.random.default_rng(3)
    for _ in range(25):
        y1 = np.exp(rng.normal(size=2))
        y2 = np.exp(rng.normal(size=2))
        lhs = lambda_character(M2, (2,), y1 * y2)
        rhs = lambda_character(M2, (2,), y1) * lambda_character(M2, (2,), y2)
        assert abs(lhs - rhs) <= 1e-10


def test_lambda_character_domain():
    with pytest.raises(DomainError):
        lambda_character(M2, (1,), (1.0, -2.0))


def test_exponents_from():
    s = 0.5 + 0.0j
    sk = exponents_from(M2, s, (0,))
    assert np.allclose(sk, [0.5, 0.5])
    sk = exponents_from(M2, 0.5, (1,))
    omega = 2.0 * math.pi / (2.0 * math.log(EPS2))   # = 1.78221398
    assert abs(sk[0] - (0.5 + omega * 1j)) < 1e-12
    assert abs(sk[1] - (0.5 - omega * 1j)) < 1e-12
    assert abs(omega - 1.7822) < 1e-3
    # mean equals s for random m
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = int(rng.integers(-6, 7))
        sk = exponents_from(M2, 0.3 + 1.1j, (m,))
        assert abs(np.mean(sk) - (0.3 + 1.1j)) <= 1e-10


def test_reduce_mod_multipliers():
    v = np.array([1.3, 0.9])
    rep, powers = reduce_mod_multipliers(M2, v)
    assert np.all(powers == 0)
    assert np.allclose(rep, v)
    # 2*eps reduces to (2, 2) with one inverse power applied
    v = np.array([2.0 * EPS2, 2.0 / EPS2])
    rep, powers = reduce_mod_multipliers(M2, v)
    assert np.allclose(rep, [2.0, 2.0], atol=1e-10)
    assert list(powers) == [-1]
    # norm is preserved and the map is idempotent
    rng = np.random.default_rng(13)
    for _ in range(40):
        v = rng.normal(size=2) * np.array([10.0, 0.1])
        if np.any(v == 0):
            continue
        rep, powers = reduce_mod_multipliers(M2, v)
        assert abs(vector_norm(rep) - vector_norm(v)) <= 1e-10 * max(1, abs(vector_norm(v)))
        rep2, powers2 = reduce_mod_multipliers(M2, rep)
        assert np.all(powers2 == 0)
        assert np.allclose(rep2, rep)


def test_smith_normal_form_small():
    m = [[2, 4], [2, 2]]
    d, u, v = smith_normal_form(m)
    assert (np.array(u, dtype=float) @ np.array(m, dtype=float)
            @ np.array(v, dtype=float) == np.array(d, dtype=float)).all()
    assert [int(d[0, 0]), int(d[1, 1])] == [2, 2]


def test_quotient_size_examples():
    assert quotient_size(L2, (EPS2, 1.0 / EPS2)) == 4
    g = (3 + math.sqrt(5)) / 2
    assert quotient_size(L5, (g, 1.0 / g)) == 1
    u2 = (EPS2 ** 2, EPS2 ** -2)  # 17 + 12 sqrt2: |N(16+12 sqrt2)| = 32
    assert quotient_size(L2, u2) == 32


def test_quotient_size_rejects_bad_multiplier():
    with pytest.raises((DomainError, InconsistencyError)):
        quotient_size(L2, (1.0, 1.0))
    with pytest.raises(InconsistencyError):
        quotient_size(L2, (2.7, 0.9))  # not an algebraic-integer action


def test_quotient_reps_sqrt5_trivial():
    g = (3 + math.sqrt(5)) / 2
    reps = quotient_reps_mod_units(L5, (g, 1.0 / g), M5)
    assert len(reps) == 1
    rep, size = reps[0]
    assert size == 1
    assert np.allclose(rep, 0.0)


def test_quotient_reps_sqrt2_orbit_sizes():
    reps = quotient_reps_mod_units(L2, (EPS2, 1.0 / EPS2), M2)
    assert sum(size for _, size in reps) == 4
    zero_sizes = [size for rep, size in reps if np.allclose(rep, 0.0)]
    assert zero_sizes and zero_sizes[0] >= 1


def test_quotient_reps_power_multiplier():
    u2 = (EPS2 ** 2, EPS2 ** -2)
    reps = quotient_reps_mod_units(L2, u2, M2)
    assert sum(size for _, size in reps) == 32


def test_zeta_eligibility():
    assert L2.zeta_eligible()
    assert L5.zeta_eligible()
    assert not EmbeddedLattice.from_matrix(np.eye(2)).zeta_eligible()


def test_cusp_coordinates_at_infinity():
    frame = CuspFrame.at_infinity(K2)
    x, y0, yc = cusp_coordinates(frame, (1j, 1j))
    assert np.allclose(x, 0.0)
    assert abs(y0 - 1.0) <= 1e-12
    assert np.allclose(yc, 0.0)

    x, y0, yc = cusp_coordinates(frame, (2j, 0.5j))
    assert abs(y0 - 1.0) <= 1e-12
    assert abs(yc[0] - 0.39321985) < 1e-8  # log 2 / log(3 + 2 sqrt2)

    x, y0, yc = cusp_coordinates(frame, (1 + 1j, 1 + 1j))
    assert np.allclose(x, [1.0, 0.0], atol=1e-12)


def test_cusp_coordinates_round_trip():
    frame = CuspFrame.at_infinity(K2)
    rng = np.random.default_rng(23)
    for _ in range(20):
        z = rng.normal(size=2) + 1j * np.exp(rng.normal(size=2))
        x, y0, yc = cusp_coordinates(frame, z)
        xp = frame.lattice.matrix @ x
        logy = yc @ frame.multipliers.log_generators + math.log(y0) / 2.0
        z_back = xp + 1j * np.exp(logy)
        assert np.max(np.abs(z_back - z)) <= 1e-10


def test_cusp_coordinates_domain():
    frame = CuspFrame.at_infinity(K2)
    with pytest.raises(DomainError):
        cusp_coordinates(frame, (1j, -1j))

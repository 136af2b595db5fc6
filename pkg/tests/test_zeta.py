import math

import numpy as np
import pytest

from hmftrace.errors import DomainError, PoleError
from hmftrace.fields import make_quadratic_field
from hmftrace.lattice import EmbeddedLattice, MultiplierGroup, dual_lattice
from hmftrace.zeta import (
    ZetaContext,
    completed_xi,
    convexity_spot_check,
    direct_tail_bound,
    functional_equation_residual,
    orbit_density,
    residue_at_one,
    theta,
    zeta_continued,
    zeta_direct,
)

K2 = make_quadratic_field(2)
K5 = make_quadratic_field(5)
CTX2 = ZetaContext.from_field(K2, (0,))
CTX5 = ZetaContext.from_field(K5, (0,))


def ideal_count_partial_sum(field, s: float, bound: float) -> float:
    """Dedekind-zeta partial sum over ideals of norm <= bound.

    Ideals of a class-number-one real quadratic field are enumerated as
    elements modulo the full unit group {+-u0^k}: representatives have
    positive first embedding reduced into [sqrt(N), sqrt(N) * u0).
    """
    from hmftrace.fields import fundamental_unit, embed
    u0 = abs(embed(field, fundamental_unit(field))[0])
    a = field.matrix
    a_inv = np.linalg.inv(a)
    e1_max = math.sqrt(bound) * u0 + 1e-9
    e2_max = math.sqrt(bound) + 1e-9
    a_hi = int(abs(a_inv[0, 0]) * e1_max + abs(a_inv[0, 1]) * e2_max) + 2
    b_hi = int(abs(a_inv[1, 0]) * e1_max + abs(a_inv[1, 1]) * e2_max) + 2
    total = 0.0
    log_u = math.log(u0)
    avals = np.arange(-a_hi, a_hi + 1, dtype=float)
    bvals = np.arange(-b_hi, b_hi + 1, dtype=float)
    for chunk in np.array_split(avals, max(1, avals.size // 512)):
        aa = chunk[:, None]
        bb = bvals[None, :]
        e1 = a[0, 0] * aa + a[0, 1] * bb
        e2 = a[1, 0] * aa + a[1, 1] * bb
        nrm = np.abs(e1 * e2)
        keep = (nrm > 1e-9) & (nrm <= bound) & (e1 > 0)
        c = (np.log(e1[keep]) - 0.5 * np.log(nrm[keep])) / log_u
        inside = (c >= -1e-9) & (c < 1.0 - 1e-9)
        total += float(np.sum(nrm[keep][inside] ** (-s)))
    return total


def test_zeta_direct_matches_ideal_oracle_factor_four():
    bound = 9e5
    mine = zeta_direct(CTX2, 2.0, norm_bound=bound)
    oracle = 4.0 * ideal_count_partial_sum(K2, 2.0, bound)
    assert abs(mine - oracle) <= 1e-6 * abs(oracle)
    assert abs(mine - 5.7398) <= 2e-4  # headline value
    assert abs(mine.imag) < 1e-12


def test_zeta_direct_requires_half_plane():
    with pytest.raises(DomainError):
        zeta_direct(CTX2, 0.9)


def test_zeta_direct_positive_real_at_three():
    val = zeta_direct(CTX2, 3.0, tol=1e-9)
    assert val.real > 0
    assert abs(val.imag) <= 1e-12


def test_zeta_conjugation_symmetry():
    ctx_p = ZetaContext.from_field(K2, (1,))
    ctx_m = ZetaContext.from_field(K2, (-1,))
    for s in (2.5 + 0.7j, 3.0 - 1.2j):
        lhs = zeta_direct(ctx_m, np.conj(s), tol=1e-9)
        rhs = np.conj(zeta_direct(ctx_p, s, tol=1e-9))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_theta_product_lattice_oracle():
    lz = EmbeddedLattice.from_matrix(np.eye(2))
    one_dim = sum(math.exp(-math.pi * k * k) for k in range(-8, 9))
    val = theta(lz, (1.0, 1.0))
    assert abs(val - one_dim ** 2) <= 1e-12
    assert abs(val - 1.18034060) <= 1e-7


def test_theta_tends_to_one():
    L = CTX2.lattice
    assert abs(theta(L, (40.0, 40.0)) - 1.0) <= 1e-12
    assert theta(L, (0.8, 1.1)) >= 1.0


def test_theta_domain():
    with pytest.raises(DomainError):
        theta(CTX2.lattice, (1.0, -1.0))


@pytest.mark.parametrize("ctx", [CTX2, CTX5], ids=["sqrt2", "sqrt5"])
def test_poisson_identity_random_points(ctx):
    rng = np.random.default_rng(17)
    L = ctx.lattice
    D = dual_lattice(L)
    vol = L.covolume
    for _ in range(20):
        x = np.exp(rng.uniform(-0.9, 0.9, size=2))
        lhs = theta(L, x)
        rhs = theta(D, 1.0 / x) / (vol * math.sqrt(float(np.prod(x))))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_continued_matches_direct_on_half_plane():
    pts = [2.0, 2.5, 3.0, 2.2 + 0.8j, 2.8 - 1.1j]
    for s in pts:
        sigma = complex(s).real
        bound = 6e5 if sigma < 2.4 else 3e5
        zd = zeta_direct(CTX2, s, norm_bound=bound)
        zc = zeta_continued(CTX2, s)
        tail = direct_tail_bound(CTX2, sigma, bound)
        assert abs(zd - zc) <= max(1e-8, 1.5 * tail)


def test_continued_entire_for_nontrivial_character():
    ctx = ZetaContext.from_field(K2, (1,))
    val = zeta_continued(ctx, 1.0)
    assert np.isfinite(val.real) and np.isfinite(val.imag)


def test_continued_real_on_critical_line_trivial_character():
    val = zeta_continued(CTX2, 0.5)
    assert abs(val.imag) <= 1e-10 * max(1.0, abs(val.real))


def test_continued_pole_raises():
    with pytest.raises(PoleError):
        zeta_continued(CTX2, 1.0)
    with pytest.raises(PoleError):
        completed_xi(CTX2, 0.0)


@pytest.mark.parametrize("ctx,value", [
    (CTX2, math.sqrt(2.0) * math.log(3.0 + 2.0 * math.sqrt(2.0))),
    (CTX5, 8.0 * math.log((1.0 + math.sqrt(5.0)) / 2.0) / math.sqrt(5.0)),
], ids=["sqrt2", "sqrt5"])
def test_residue_closed_form(ctx, value):
    assert abs(residue_at_one(ctx) - value) <= 1e-12 * value


def test_residue_vs_numerical_limit():
    for ctx in (CTX2, CTX5):
        rho = residue_at_one(ctx)
        lim = 1e-4 * zeta_continued(ctx, 1.0 + 1e-4)
        assert abs(lim - rho) <= 1e-3 * rho


def test_residue_scaling_quarter():
    doubled = ZetaContext(EmbeddedLattice.from_matrix(2.0 * CTX2.lattice.matrix),
                          CTX2.multipliers, (0,))
    assert abs(residue_at_one(doubled) - residue_at_one(CTX2) / 4.0) <= 1e-12


def test_residue_rejects_character():
    with pytest.raises(DomainError):
        residue_at_one(ZetaContext.from_field(K2, (1,)))


def test_functional_equation_probe_set():
    probes = [(CTX2, 0.3 + 2.0j), (CTX2, 0.5), (CTX2, -0.7 + 1.0j),
              (CTX5, 0.25 + 1.5j), (CTX5, 0.8)]
    for ctx, s in probes:
        assert functional_equation_residual(ctx, s) <= 1e-8
    for field, s in [(K2, 0.5), (K2, 0.3 + 2.0j), (K5, 1.4 - 0.5j)]:
        for m in (1, -1):
            ctx = ZetaContext.from_field(field, (m,))
            assert functional_equation_residual(ctx, s) <= 1e-8


def test_functional_equation_symmetry_of_residual():
    s = 0.35 + 1.3j
    r1 = functional_equation_residual(CTX2, s)
    r2 = functional_equation_residual(CTX2.dual(), 1.0 - np.conj(s).conjugate())
    # the defining relation is symmetric under (L, s, m) -> (L*, 1-s, -m)
    r3 = functional_equation_residual(CTX2.dual(), 1.0 - s)
    assert abs(r1 - r3) <= 1e-10
    assert r2 >= 0


def test_orbit_density_positive():
    assert orbit_density(CTX2) > 0
    assert orbit_density(CTX5) > 0


def test_invariance_validation():
    with pytest.raises(DomainError):
        ZetaContext(EmbeddedLattice.from_matrix([[1.0, 0.3], [0.0, 1.0]]),
                    CTX2.multipliers, (0,))


def test_convexity_spot_check_report():
    report = convexity_spot_check(CTX2)
    assert len(report["sigmas"]) == 3
    exps = [row["fitted_exponent"] for row in report["sigmas"]]
    convs = [row["convexity_exponent"] for row in report["sigmas"]]
    assert all(e is not None for e in exps)
    # n = 2, sigma = 0.5: fitted exponent at most 0.8
    assert exps[1] <= 0.8
    assert all(e <= c + 0.3 for e, c in zip(exps, convs))
    # exponents decrease towards the edge of the strip
    assert exps[0] >= exps[1] >= exps[2]
    assert report["trivial_bound_ok"]


def test_convexity_flags_noise_wall():
    # samples beyond the double-precision wall are flagged, not trusted
    report = convexity_spot_check(CTX2, t_grid=(5.0, 10.0, 15.0, 40.0),
                                  sigmas=(0.5,))
    flags = [s["trusted"] for s in report["sigmas"][0]["samples"]]
    assert flags[0] and not flags[-1]


def test_context_requires_zeta_eligible_lattice():
    # the square lattice has nonzero vectors with zero coordinates
    trivial = MultiplierGroup(((1.0, 1.0),))
    with pytest.raises(DomainError):
        ZetaContext(EmbeddedLattice.from_matrix(np.eye(2)), trivial, (0,))

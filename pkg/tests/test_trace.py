import math

import numpy as np
import pytest
from scipy import integrate

from hmftrace.errors import (DegenerateAngleError, DomainError,
                             NonIntegrableError, PoleError)
from hmftrace.fields import make_quadratic_field
from hmftrace.lattice import CuspFrame, EmbeddedLattice, MultiplierGroup
from hmftrace.modgroup import GroupElementN
from hmftrace.trace import (
    AutomorphicFormData,
    ClassInventory,
    LogParallelotope,
    F0_direct,
    F0_gamma_formula,
    F0_of_centralizer,
    F0tilde_direct,
    F0tilde_gamma_formula,
    assemble_geometric_trace,
    demo_form,
    demo_inventory,
    elliptic_oracle,
    elliptic_term,
    hyp_par_C_term,
    hyp_par_main_term,
    hyp_par_theta_factor,
    mixed_oracle_hyp_ell,
    mixed_term,
    multiplier_log_supports,
    parabolic_term,
)
from hmftrace.transforms import TestFunction, Q_of, g_of
from hmftrace.zeta import ZetaContext, zeta_continued

K2 = make_quadratic_field(2)
PSI = TestFunction.default(2)
ZERO_PSI = TestFunction(centers=(4.5, 4.5), widths=(4.5, 4.5), amplitude=0.0)
EPS2 = 3.0 + 2.0 * math.sqrt(2.0)
HALF_PI = math.pi / 2
S_ELEM = GroupElementN.from_field_elements(K2, (0, 0), (-1, 0), (1, 0), (0, 0))


def u_power(z):
    z = np.asarray(z, dtype=complex)
    return z[..., 0].imag ** 0.6 * z[..., 1].imag ** 0.6


def ones(z):
    return np.ones(np.asarray(z).shape[:-1])


# -- elliptic --------------------------------------------------------------------


def test_elliptic_zero_psi():
    t = elliptic_term(ZERO_PSI, (HALF_PI, HALF_PI), 1, 1.0, (0.0, 0.0))
    assert t.value == 0.0


def test_elliptic_degenerate_angle():
    with pytest.raises(DegenerateAngleError):
        elliptic_term(PSI, (0.0, HALF_PI), 1, 1.0, (0.0, 0.0))
    with pytest.raises(DomainError):
        elliptic_term(PSI, (HALF_PI, HALF_PI), 0, 1.0, (0.0, 0.0))


def test_elliptic_mu_zero_against_scipy():
    # with mu = 0 the profile is 1 and the term is a plain 2-D integral
    t = elliptic_term(PSI, (HALF_PI, HALF_PI), 1, 1.0, (0.0, 0.0))
    r_max = math.asinh(1.5)

    def inner(r1):
        val, _ = integrate.quad(
            lambda r2: float(PSI(np.array([4 * math.sinh(r1) ** 2,
                                           4 * math.sinh(r2) ** 2])))
            * math.sinh(r1) * math.sinh(r2), 0.0, r_max, epsabs=1e-12)
        return val

    oracle, _ = integrate.quad(inner, 0.0, r_max, epsabs=1e-10)
    oracle *= (2 * math.pi) ** 2
    assert abs(t.value - oracle) <= 1e-7 * abs(oracle)


def test_elliptic_theorem_vs_bruteforce_oracle():
    mu = 0.6 * (0.6 - 1.0)
    thm = elliptic_term(PSI, (HALF_PI, HALF_PI), 1, 1.0, (mu, mu))
    val, err = elliptic_oracle(PSI, S_ELEM, u_power)
    assert abs(thm.value - val) <= 1e-3 * abs(val)
    assert err <= 1e-2 * abs(val)


def test_elliptic_oracle_rejects_non_elliptic():
    t_elem = GroupElementN.from_field_elements(K2, (1, 0), (1, 0), (0, 0), (1, 0))
    with pytest.raises(DomainError):
        elliptic_oracle(PSI, t_elem, ones)


def test_elliptic_oracle_matches_term_with_unit_weight():
    thm = elliptic_term(PSI, (HALF_PI, HALF_PI), 1, 1.0, (0.0, 0.0))
    val, _ = elliptic_oracle(PSI, S_ELEM, ones)
    assert abs(thm.value - val) <= 1e-3 * abs(val)


# -- mixed ------------------------------------------------------------------------


def test_mixed_zero_psi():
    t = mixed_term(ZERO_PSI, (4.0,), (HALF_PI,), 1.0, (0.0, 0.0))
    assert t.value == 0.0


def test_mixed_support_vanishing():
    # N + 1/N - 2 > 9 kills the term without quadrature
    t = mixed_term(PSI, (12.0,), (HALF_PI,), 1.0, (0.0, 0.0))
    assert t.value == 0.0
    assert t.components["hyperbolic_axis"][0] == 0.0


def test_mixed_rejects_small_norm():
    with pytest.raises(DomainError):
        mixed_term(PSI, (0.9,), (HALF_PI,), 1.0, (0.0, 0.0))


def test_mixed_theorem_vs_bruteforce_oracle():
    # one hyperbolic coordinate (norm 4), one quarter-turn coordinate, u = 1
    thm = mixed_term(PSI, (4.0,), (HALF_PI,), math.log(4.0), (0.0, 0.0))
    val, err = mixed_oracle_hyp_ell(PSI, 4.0, HALF_PI)
    assert abs(thm.value - val) <= 1e-2 * abs(val)


def test_f0_of_centralizer_unit_weight():
    cell = LogParallelotope(anchor=(0.0,), vectors=((math.log(4.0),),))
    val = F0_of_centralizer(ones, GroupElementN.identity(2), cell, 1)
    assert abs(val - math.log(4.0)) <= 1e-10


def test_f0_of_centralizer_separable_weight():
    # weight independent of the first coordinate: cell length times the factor
    def u(z):
        z = np.asarray(z, dtype=complex)
        return z[..., 1].imag ** 0.3

    cell = LogParallelotope(anchor=(0.0,), vectors=((math.log(3.0),),))
    val = F0_of_centralizer(u, GroupElementN.identity(2), cell, 1)
    assert abs(val - math.log(3.0) * 1.0) <= 1e-10


def test_f0_of_centralizer_shift_invariance():
    # periodic (centralizer-invariant) weight: anchor shift by one period
    period = math.log(4.0)

    def u(z):
        z = np.asarray(z, dtype=complex)
        return np.cos(2 * math.pi * np.log(np.abs(z[..., 0])) / period)

    c1 = LogParallelotope(anchor=(0.0,), vectors=((period,),))
    c2 = LogParallelotope(anchor=(period,), vectors=((period,),))
    v1 = F0_of_centralizer(u, GroupElementN.identity(2), c1, 1)
    v2 = F0_of_centralizer(u, GroupElementN.identity(2), c2, 1)
    assert abs(v1 - v2) <= 1e-8


# -- cusp-pair family --------------------------------------------------------------


def test_multiplier_log_supports_only_first_shell():
    mult = MultiplierGroup.from_field(K2)
    idx = multiplier_log_supports(PSI, mult)
    assert sorted(mv[0] for mv, _ in idx) == [-1, 1]


def test_hyp_par_main_term_value():
    form = demo_form(K2, s=0.8)
    t = hyp_par_main_term(100.0, form.multipliers, PSI, form)
    g_at = float(np.real(Q_of(PSI, (4.0, 4.0))))
    expected = (2 * math.log(EPS2) / 2.0) * (100.0 ** 0.8 / 0.8) * 2.0 * g_at
    assert abs(t.value - expected) <= 1e-9 * abs(expected)
    assert abs(t.a_dependence["A_s_coeff"] * 100.0 ** 0.8 - t.value) <= 1e-12 * abs(t.value)


def test_hyp_par_main_term_vanishes():
    cusp = demo_form(K2, s=0.8, cusp_form=True)
    t = hyp_par_main_term(100.0, cusp.multipliers, PSI, cusp)
    assert t.value == 0.0
    # nontrivial character index kills the term as well
    frame = CuspFrame.at_infinity(K2)
    form = AutomorphicFormData(s=0.8, m_u=(1,), cusp_data=((frame, 1.0, 0.0),),
                               multipliers=frame.multipliers)
    assert hyp_par_main_term(100.0, form.multipliers, PSI, form).value == 0.0


def test_theta_factor_identity_and_counting():
    from hmftrace.lattice import quotient_reps_mod_units
    mult = MultiplierGroup.from_field(K2)
    lattice = EmbeddedLattice.from_field(K2)
    for mv in (1, -1):
        u = mult.power((float(mv),))
        e_m = 1.0 / np.sqrt(u) - np.sqrt(u)
        tf = hyp_par_theta_factor(PSI, e_m, (0.0, 0.0))
        n_e = abs(float(np.prod(e_m)))
        g_val = float(np.real(g_of(PSI, np.log(u))))
        assert abs(tf * n_e - g_val) <= 1e-7 * abs(g_val)
        reps = quotient_reps_mod_units(lattice, u, mult)
        assert sum(sz for _, sz in reps) == round(n_e) == 4


def test_theta_factor_domain_and_folding():
    with pytest.raises(DomainError):
        hyp_par_theta_factor(PSI, (0.0, 2.0), (0.0, 0.0))
    folded = hyp_par_theta_factor(PSI, (-2.0, 2.0), (-0.24, -0.24))
    unfolded = hyp_par_theta_factor(PSI, (-2.0, 2.0), (-0.24, -0.24), fold=False)
    assert abs(folded - unfolded) <= 1e-10 * max(1.0, abs(folded))
    assert hyp_par_theta_factor(ZERO_PSI, (-2.0, 2.0), (0.0, 0.0)) == 0.0


def test_hyp_par_C_term_trivial_cases():
    cell = LogParallelotope(anchor=(0.0, 0.0), vectors=((0.5, -0.5),))
    zero = hyp_par_C_term(1.0 + 0j, lambda r: np.zeros(r.shape[0]), cell)
    assert zero.value == 0.0
    # constant weight on a bounded cell: half the log-volume times the factor
    const = hyp_par_C_term(2.0 + 0j, lambda r: np.ones(r.shape[0]), cell)
    vol = math.sqrt(0.5)  # length of the spanning vector
    assert abs(const.value - 0.5 * vol * 2.0) <= 1e-10


def test_hyp_par_C_term_synthetic_decaying():
    def synthetic(r):
        r = np.asarray(r, dtype=float)
        nr = np.prod(r, axis=-1)
        return np.exp(-(nr + 1.0 / nr))

    log_eps = math.log(EPS2)
    cell = LogParallelotope(anchor=(0.0, 0.0),
                            vectors=((log_eps / math.sqrt(2), -log_eps / math.sqrt(2)),),
                            unbounded_trace_axis=True)
    t1 = hyp_par_C_term(1.0, synthetic, cell, rtol=1e-6)
    t2 = hyp_par_C_term(1.0, synthetic, cell, rtol=1e-9, panels=32)
    assert abs(t1.value - t2.value) <= 1e-6 * abs(t2.value)
    assert np.isfinite(t1.value.real)


def test_hyp_par_C_term_divergence_flag():
    cell = LogParallelotope(anchor=(0.0, 0.0), vectors=((0.5, -0.5),),
                            unbounded_trace_axis=True)
    with pytest.raises(NonIntegrableError):
        hyp_par_C_term(1.0, lambda r: np.ones(r.shape[0]), cell)


# -- parabolic ----------------------------------------------------------------------


def test_f0_direct_symmetry_and_domain():
    sk = np.array([0.5, 0.5], dtype=complex)
    assert abs(F0_direct(PSI, sk) - F0tilde_direct(PSI, sk)) <= 1e-12
    assert F0_direct(ZERO_PSI, sk) == 0.0
    with pytest.raises(DomainError):
        F0_direct(PSI, np.array([1.2, 0.5]))
    with pytest.raises(DomainError):
        F0tilde_direct(PSI, np.array([-0.1, 0.5]))


@pytest.mark.parametrize("s", [0.6, 0.7, 0.8])
def test_f0_dual_formula_agreement(s):
    sk = np.array([s, s], dtype=complex)
    fd, fg = F0_direct(PSI, sk), F0_gamma_formula(PSI, sk)
    td, tg = F0tilde_direct(PSI, sk), F0tilde_gamma_formula(PSI, sk)
    assert abs(fd - fg) <= 1e-4 * abs(fd)
    assert abs(td - tg) <= 1e-4 * abs(td)


def test_f0_gamma_zero_h():
    sk = np.array([0.7, 0.7], dtype=complex)
    assert F0_gamma_formula(ZERO_PSI, sk) == 0.0


def test_f0_gamma_product_reduction():
    # product test function: the 2-axis formula is the product of 1-axis ones
    one = TestFunction(centers=(4.5,), widths=(4.5,))
    sk2 = np.array([0.7, 0.7], dtype=complex)
    sk1 = np.array([0.7], dtype=complex)
    two = F0_gamma_formula(PSI, sk2)
    prod = F0_gamma_formula(one, sk1) ** 2
    assert abs(two - prod) <= 1e-8 * abs(two)


def test_parabolic_cusp_form_zero():
    form = demo_form(K2, s=0.8, cusp_form=True)
    t = parabolic_term(100.0, PSI, form)
    assert t.value == 0.0


def test_parabolic_identity_2nF_equals_g0():
    # 2^n F(S)|_{S=s} with trivial index is the transform value at the origin
    suite_val = float(np.real(Q_of(PSI, (0.0, 0.0))))
    from hmftrace.quadrature import adaptive_gk
    from hmftrace.transforms import get_suite
    suite = get_suite(PSI)
    axis = [adaptive_gk(lambda t, k=k: suite.psi.axis_profile(k, t * t),
                        0.0, 3.0, rtol=1e-11) for k in range(2)]
    lhs = 4.0 * PSI.amplitude * axis[0] * axis[1]
    assert abs(lhs - suite_val) <= 1e-7 * abs(suite_val)


def test_parabolic_composition_value():
    form = demo_form(K2, s=0.8)
    t = parabolic_term(100.0, PSI, form)
    det_e = 2.0 * math.log(EPS2)
    g0 = float(np.real(Q_of(PSI, (0.0, 0.0))))
    ctx = ZetaContext.from_field(K2, (0,))
    z_val = zeta_continued(ctx, 0.2)
    f0 = F0_direct(PSI, np.array([0.8, 0.8], dtype=complex))
    expected = (det_e / 2.0) * (100.0 ** 0.8 / 0.8) * g0 \
        + math.sqrt(8.0) * z_val * f0
    assert abs(t.value - expected) <= 1e-8 * abs(expected)


def test_parabolic_pole_guard():
    frame = CuspFrame.at_infinity(K2)
    form = AutomorphicFormData(s=1.0 - 1e-9, m_u=(0,),
                               cusp_data=((frame, 1.0, 0.0),),
                               multipliers=frame.multipliers)
    with pytest.raises(PoleError):
        parabolic_term(100.0, PSI, form)


# -- form data and assembly ----------------------------------------------------------


def test_form_validation():
    frame = CuspFrame.at_infinity(K2)
    with pytest.raises(DomainError):
        AutomorphicFormData(s=0.8, m_u=(1,), cusp_data=((frame, 0.0, 0.0),),
                            multipliers=frame.multipliers)
    with pytest.raises(DomainError):
        AutomorphicFormData(s=2.5, m_u=(0,), cusp_data=((frame, 1.0, 0.0),),
                            multipliers=frame.multipliers)
    ok = AutomorphicFormData(s=2.5, m_u=(0,), cusp_data=((frame, 1.0, 0.0),),
                             multipliers=frame.multipliers, nonconforming=True)
    assert np.allclose(ok.eigen_exponents, [2.5, 2.5])
    assert np.allclose(ok.mu_vector, [2.5 * 1.5, 2.5 * 1.5])


def test_assemble_empty_inventory_cusp_form():
    form = demo_form(K2, s=0.8, cusp_form=True)
    report = assemble_geometric_trace(100.0, PSI, form, ClassInventory())
    assert report["total"] == 0.0
    assert report["A_s_coeff"] == 0.0
    assert report["A_1ms_coeff"] == 0.0


def test_assemble_demo_inventory_end_to_end():
    form = demo_form(K2, s=0.8)
    inv = demo_inventory(K2, PSI, form)
    report = assemble_geometric_trace(100.0, PSI, form, inv)
    assert np.isfinite(report["total"].real)
    assert np.isfinite(report["total"].imag)
    for name in ("elliptic", "mixed", "hyp_par", "parabolic"):
        assert np.isfinite(report["terms"][name].value.real)
    # cutoff-power bookkeeping: total coefficients equal the component sums
    a_s = (report["terms"]["hyp_par"].a_dependence["A_s_coeff"]
           + report["terms"]["parabolic"].a_dependence["A_s_coeff"])
    assert abs(report["A_s_coeff"] - a_s) <= 1e-12 * max(1.0, abs(a_s))
    a_1 = (report["terms"]["hyp_par"].a_dependence["A_1ms_coeff"]
           + report["terms"]["parabolic"].a_dependence["A_1ms_coeff"])
    assert abs(report["A_1ms_coeff"] - a_1) <= 1e-12 * max(1.0, abs(a_1) + 1.0)


def test_assemble_reproducible():
    form = demo_form(K2, s=0.8)
    inv = demo_inventory(K2, PSI, form)
    r1 = assemble_geometric_trace(50.0, PSI, form, inv)
    r2 = assemble_geometric_trace(50.0, PSI, form, inv)
    assert r1["total"] == r2["total"]

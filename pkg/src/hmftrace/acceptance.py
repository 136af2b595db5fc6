"""Acceptance suite: every headline guarantee, one callable per criterion.

Each check returns a CriterionResult with the measured figure and its bound;
the CLI `verify` command and the pytest acceptance module both run these, so
there is a single source of truth for the gates.  Desk scale means degree 2
over the fields with radicand 2 and 5.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .fields import embed, fundamental_unit, make_quadratic_field
from .lattice import (EmbeddedLattice, MultiplierGroup, dual_lattice,
                      quotient_reps_mod_units)
from .modgroup import EisensteinSum, GroupElementN, act
from .specfun import angular_f, angular_f_taylor, spherical_g, spherical_g_taylor
from .trace import (F0_direct, F0_gamma_formula, F0tilde_direct,
                    F0tilde_gamma_formula, assemble_geometric_trace, demo_form,
                    demo_inventory, elliptic_oracle, elliptic_term,
                    hyp_par_theta_factor, mixed_oracle_hyp_ell, mixed_term)
from .transforms import TestFunction, Q_of, g_from_h, g_of, get_suite, make_h_grid, psi_from_Q
from .zeta import (ZetaContext, functional_equation_residual, residue_at_one,
                   theta, zeta_continued, zeta_direct)

K2 = make_quadratic_field(2)
K5 = make_quadratic_field(5)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str
    seconds: float


def _result(name, measured, bound, detail, t0, larger_ok=False) -> CriterionResult:
    passed = measured >= bound if larger_ok else measured <= bound
    return CriterionResult(name, bool(passed), float(measured), float(bound),
                           detail, time.time() - t0)


def check_transform_round_trip() -> list[CriterionResult]:
    """Criterion 1: psi -> Q -> g -> h -> g and psi -> Q -> psi inversions."""
    t0 = time.time()
    psi = TestFunction.default(2)
    hg = make_h_grid(psi)
    suite = get_suite(psi)
    rng = np.random.default_rng(101)
    u_lim = suite.u_support[0]
    worst_g = 0.0
    for _ in range(20):
        u = rng.uniform(-u_lim, u_lim, size=2)
        worst_g = max(worst_g, abs(g_from_h(hg, u) - g_of(psi, u)))
    out = [_result("transform chain g round trip (20 probes)", worst_g, 1e-5,
                   f"max |g_rec - g| = {worst_g:.2e}", t0)]
    t0 = time.time()
    q = lambda w: Q_of(psi, w)
    worst_p = 0.0
    for t in ([4.5, 4.5], [3.0, 6.0], [6.0, 3.5], [5.5, 5.5]):
        val = psi_from_Q(q, np.array(t), support=9.0)
        true = float(psi(np.array(t)))
        worst_p = max(worst_p, abs(val - true) / abs(true))
    out.append(_result("transform inversion psi round trip", worst_p, 1e-3,
                       f"max rel err = {worst_p:.2e}", t0))
    return out


def check_poisson_theta() -> list[CriterionResult]:
    """Criterion 2: theta identity against the dual lattice, both fields."""
    out = []
    rng = np.random.default_rng(202)
    for field, label in ((K2, "sqrt2"), (K5, "sqrt5")):
        t0 = time.time()
        lat = EmbeddedLattice.from_field(field)
        dual = dual_lattice(lat)
        vol = lat.covolume
        worst = 0.0
        for _ in range(20):
            x = np.exp(rng.uniform(-0.9, 0.9, size=2))
            lhs = theta(lat, x)
            rhs = theta(dual, 1.0 / x) / (vol * math.sqrt(float(np.prod(x))))
            worst = max(worst, abs(lhs - rhs))
        out.append(_result(f"theta summation identity ({label}, 20 points)",
                           worst, 1e-12, f"max residual = {worst:.2e}", t0))
    return out


def _ideal_partial_sum(field, s: float, bound: float) -> float:
    """Dedekind partial sum over ideals of norm <= bound (unit-orbit reduction)."""
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


def check_zeta_correctness() -> list[CriterionResult]:
    """Criterion 3: direct sum vs ideal oracle, and vs the continuation."""
    t0 = time.time()
    ctx = ZetaContext.from_field(K2, (0,))
    bound = 9e5
    mine = zeta_direct(ctx, 2.0, norm_bound=bound)
    oracle = 4.0 * _ideal_partial_sum(K2, 2.0, bound)
    rel = abs(mine - oracle) / abs(oracle)
    out = [_result("zeta value at 2 vs ideal-count oracle", rel, 1e-6,
                   f"Z(2,0) = {mine.real:.6f}, 4*dedekind = {oracle:.6f}", t0)]
    t0 = time.time()
    pts = [2.5, 2.75, 3.0, 3.25, 3.5]
    pts = [complex(p, im) for p in pts for im in (0.0, 1.1)]
    worst = 0.0
    for s in pts:
        bound_s = 8e5 if s.real < 2.7 else 2e5
        zd = zeta_direct(ctx, s, norm_bound=bound_s)
        zc = zeta_continued(ctx, s)
        worst = max(worst, abs(zd - zc))
    out.append(_result("continuation equals direct sum (10 points)", worst, 1e-8,
                       f"max |direct - continued| = {worst:.2e}", t0))
    return out


def check_residues() -> list[CriterionResult]:
    """Criterion 4: residue at 1 vs closed form, headline digits, and limit."""
    out = []
    headline = {2: 2.49292557, 5: 1.72177160}
    closed = {2: math.sqrt(2.0) * math.log(3.0 + 2.0 * math.sqrt(2.0)),
              5: 8.0 * math.log((1.0 + math.sqrt(5.0)) / 2.0) / math.sqrt(5.0)}
    for field, d in ((K2, 2), (K5, 5)):
        t0 = time.time()
        ctx = ZetaContext.from_field(field, (0,))
        rho = residue_at_one(ctx)
        rel_formula = abs(rho - closed[d]) / closed[d]
        rel_headline = abs(rho - headline[d]) / headline[d]
        lim = (1e-4) * zeta_continued(ctx, 1.0 + 1e-4)
        rel_limit = abs(lim - rho) / rho
        worst = max(rel_headline, rel_limit)
        out.append(_result(
            f"residue at 1 (sqrt{d})", worst, 1e-3,
            f"rho = {rho:.8f}, closed-form rel {rel_formula:.1e}, "
            f"limit rel {rel_limit:.1e}", t0))
    return out


def check_functional_equation() -> list[CriterionResult]:
    """Criterion 5: completed-function reflection residual at 12 probes."""
    t0 = time.time()
    probes = []
    for field in (K2, K5):
        probes += [(field, (0,), 0.3 + 2.0j), (field, (0,), 0.5),
                   (field, (1,), 0.5), (field, (1,), 0.3 + 2.0j),
                   (field, (-1,), 0.25 + 1.5j), (field, (-1,), 0.8)]
    worst = 0.0
    for field, m, s in probes:
        ctx = ZetaContext.from_field(field, m)
        worst = max(worst, functional_equation_residual(ctx, s))
    return [_result("functional equation residual (12 probes)", worst, 1e-8,
                    f"max residual = {worst:.2e}", t0)]


def check_spherical() -> list[CriterionResult]:
    """Criterion 6: trivial profiles, dual integrators, rotation-average anchor."""
    t0 = time.time()
    worst_triv = 0.0
    for r in np.linspace(0.0, 3.0, 13):
        worst_triv = max(worst_triv, abs(spherical_g(0.0, float(r)) - 1.0))
    for th in np.linspace(-1.3, 1.3, 13):
        worst_triv = max(worst_triv, abs(angular_f(0.0, float(th)) - 1.0))
    out = [_result("trivial profiles are constant", worst_triv, 1e-12,
                   f"max |profile - 1| = {worst_triv:.2e}", t0)]
    t0 = time.time()
    worst_dual = 0.0
    for mu in (-0.24, 1.1, 0.3 - 0.6j):
        for r in (0.4, 1.0, 2.2):
            worst_dual = max(worst_dual, abs(spherical_g(mu, r)
                                             - spherical_g_taylor(mu, r)))
        for th in (0.4, 1.0, 1.25):
            worst_dual = max(worst_dual, abs(angular_f(mu, th)
                                             - angular_f_taylor(mu, th)))
    out.append(_result("dual-integrator agreement", worst_dual, 1e-8,
                       f"max disagreement = {worst_dual:.2e}", t0))
    t0 = time.time()
    from scipy import integrate as scipy_integrate
    s = 0.6
    mu = s * (s - 1.0)
    worst_rot = 0.0
    for r in (0.5, 1.0):
        w = complex(0.0, math.exp(-r))

        def orbit(phi):
            c, sn = math.cos(phi), math.sin(phi)
            zz = (c * w + sn) / (-sn * w + c)
            return zz.imag ** s

        val, _ = scipy_integrate.quad(orbit, 0.0, math.pi, epsabs=1e-12, limit=200)
        lhs = val / math.pi
        rhs = spherical_g(mu, r).real
        worst_rot = max(worst_rot, abs(lhs - rhs) / abs(rhs))
    out.append(_result("rotation-average eigen anchor", worst_rot, 1e-6,
                       f"max rel defect = {worst_rot:.2e}", t0))
    return out


def check_elliptic_vs_oracle() -> list[CriterionResult]:
    """Criterion 7: elliptic closed form against the raw kernel integral."""
    t0 = time.time()
    psi = TestFunction.default(2)
    mu = 0.6 * (0.6 - 1.0)
    thm = elliptic_term(psi, (math.pi / 2, math.pi / 2), 1, 1.0, (mu, mu))
    s_elem = GroupElementN.from_field_elements(K2, (0, 0), (-1, 0), (1, 0), (0, 0))

    def u_eval(z):
        z = np.asarray(z, dtype=complex)
        return z[..., 0].imag ** 0.6 * z[..., 1].imag ** 0.6

    val, est = elliptic_oracle(psi, s_elem, u_eval)
    rel = abs(thm.value - val) / abs(val)
    return [_result("elliptic closed form vs brute force", rel, 1e-3,
                    f"term = {thm.value.real:.6f}, oracle = {val.real:.6f}", t0)]


def check_mixed_vs_oracle() -> list[CriterionResult]:
    """Criterion 8: mixed closed form against the 4-d brute-force integral."""
    t0 = time.time()
    psi = TestFunction.default(2)
    thm = mixed_term(psi, (4.0,), (math.pi / 2,), math.log(4.0), (0.0, 0.0))
    val, est = mixed_oracle_hyp_ell(psi, 4.0, math.pi / 2)
    rel = abs(thm.value - val) / abs(val)
    return [_result("mixed closed form vs brute force", rel, 1e-2,
                    f"term = {thm.value.real:.6f}, oracle = {val:.6f}", t0)]


def check_cusp_pair_identities() -> list[CriterionResult]:
    """Criterion 9: angular-factor identity and the orbit-counting collapse."""
    t0 = time.time()
    psi = TestFunction.default(2)
    mult = MultiplierGroup.from_field(K2)
    lattice = EmbeddedLattice.from_field(K2)
    worst = 0.0
    counts_ok = True
    for mv in (1, -1):
        u = mult.power((float(mv),))
        e_m = 1.0 / np.sqrt(u) - np.sqrt(u)
        tf = hyp_par_theta_factor(psi, e_m, (0.0, 0.0))
        n_e = abs(float(np.prod(e_m)))
        g_val = float(np.real(g_of(psi, np.log(u))))
        worst = max(worst, abs(tf * n_e - g_val) / abs(g_val))
        reps = quotient_reps_mod_units(lattice, u, mult)
        counts_ok &= (sum(sz for _, sz in reps) == 4 == round(n_e))
    out = [_result("angular factor times |N(E_m)| equals g(log u_m)", worst,
                   1e-7, f"max rel defect = {worst:.2e}", t0)]
    out.append(CriterionResult("orbit sizes sum to |N(E_m)| = 4", counts_ok,
                               4.0, 4.0, "exact integer identity",
                               time.time() - t0))
    return out


def check_parabolic_identities() -> list[CriterionResult]:
    """Criterion 10: origin identity and the dual formulas for F(0), F~(0)."""
    t0 = time.time()
    psi = TestFunction.default(2)
    from .quadrature import adaptive_gk
    suite = get_suite(psi)
    axis = [adaptive_gk(lambda t, k=k: suite.psi.axis_profile(k, t * t),
                        0.0, 3.0, rtol=1e-11) for k in range(2)]
    lhs = 4.0 * psi.amplitude * axis[0] * axis[1]
    rhs = float(np.real(Q_of(psi, (0.0, 0.0))))
    rel0 = abs(lhs - rhs) / abs(rhs)
    out = [_result("2^n F(s) equals the origin transform value", rel0, 1e-7,
                   f"rel defect = {rel0:.2e}", t0)]
    t0 = time.time()
    worst = 0.0
    for s in (0.6, 0.7, 0.8):
        sk = np.array([s, s], dtype=complex)
        fd, fg = F0_direct(psi, sk), F0_gamma_formula(psi, sk)
        td, tg = F0tilde_direct(psi, sk), F0tilde_gamma_formula(psi, sk)
        worst = max(worst, abs(fd - fg) / abs(fd), abs(td - tg) / abs(td))
    out.append(_result("F(0), F~(0) dual-formula agreement", worst, 1e-4,
                       f"max rel defect = {worst:.2e}", t0))
    return out


def check_eisenstein() -> list[CriterionResult]:
    """Criterion 11: truncated series invariance and the eigen-equation."""
    t0 = time.time()
    es = EisensteinSum(K2, 2.5, (0,), 30.0)
    z = np.array([0.35 + 1.2j, -0.6 + 0.9j])
    s_elem = GroupElementN.from_field_elements(K2, (0, 0), (-1, 0), (1, 0), (0, 0))
    t_elem = GroupElementN.from_field_elements(K2, (1, 0), (1, 0), (0, 0), (1, 0))
    worst_ratio = 0.0
    for g in (s_elem, t_elem):
        moved = act(g, z)
        diff = abs(es.value(z) - es.value(moved))
        tail = es.tail_estimate(z) + es.tail_estimate(moved)
        worst_ratio = max(worst_ratio, diff / (10.0 * tail))
    out = [_result("Eisenstein invariance within 10x tail", worst_ratio, 1.0,
                   f"max |E(gz)-E(z)| / (10 tail) = {worst_ratio:.2f}", t0)]
    t0 = time.time()
    s = 2.5
    z0 = np.array([1j, 1j])
    h = 1e-3
    val = es.value(z0)
    worst = 0.0
    for k in range(2):
        lap = 0.0 + 0j
        for step in (h, 1j * h):
            dz = np.zeros(2, dtype=complex)
            dz[k] = step
            lap += es.value(z0 + dz) + es.value(z0 - dz)
        lap = (lap - 4.0 * val) / h ** 2
        eig = z0[k].imag ** 2 * lap / val
        worst = max(worst, abs(eig - s * (s - 1.0)) / abs(s * (s - 1.0)))
    out.append(_result("Eisenstein eigen-equation (finite differences)", worst,
                       1e-3, f"max rel defect = {worst:.2e}", t0))
    return out


def check_end_to_end() -> list[CriterionResult]:
    """Criterion 12: deterministic full assembly with coefficient bookkeeping."""
    t0 = time.time()
    psi = TestFunction.default(2)
    form = demo_form(K2, s=0.8)
    inv = demo_inventory(K2, psi, form)
    r1 = assemble_geometric_trace(100.0, psi, form, inv)
    r2 = assemble_geometric_trace(100.0, psi, form, inv)
    deterministic = (r1["total"] == r2["total"]
                     and r1["A_s_coeff"] == r2["A_s_coeff"])
    finite = np.isfinite(r1["total"].real) and np.isfinite(r1["total"].imag)
    a_s = (r1["terms"]["hyp_par"].a_dependence["A_s_coeff"]
           + r1["terms"]["parabolic"].a_dependence["A_s_coeff"])
    book = abs(r1["A_s_coeff"] - a_s) <= 1e-12 * max(1.0, abs(a_s))
    ok = bool(deterministic and finite and book)
    return [CriterionResult(
        "end-to-end assembly: finite, reproducible, coefficients add up", ok,
        float(abs(r1["total"])), float("inf"),
        f"total = {r1['total'].real:.6f}{r1['total'].imag:+.2e}i", time.time() - t0)]


ALL_CHECKS = (
    check_transform_round_trip,
    check_poisson_theta,
    check_zeta_correctness,
    check_residues,
    check_functional_equation,
    check_spherical,
    check_elliptic_vs_oracle,
    check_mixed_vs_oracle,
    check_cusp_pair_identities,
    check_parabolic_identities,
    check_eisenstein,
    check_end_to_end,
)


def run_all(verbose: bool = True) -> list[CriterionResult]:
    results = []
    for check in ALL_CHECKS:
        for res in check():
            results.append(res)
            if verbose:
                mark = "PASS" if res.passed else "FAIL"
                print(f"[{mark}] {res.name}: {res.detail} "
                      f"(measured {res.measured:.3e}, bound {res.bound:.1e}, "
                      f"{res.seconds:.1f}s)")
    return results

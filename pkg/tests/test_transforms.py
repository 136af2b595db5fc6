import math

import numpy as np
import pytest
from scipy import integrate

from hmftrace.errors import DomainError
from hmftrace.transforms import (
    HGrid,
    TestFunction,
    TransformTriple,
    Q_of,
    g_from_h,
    g_of,
    get_suite,
    h_of,
    make_h_grid,
    psi_from_Q,
)

PSI = TestFunction.default(2)
EPS2 = 3.0 + 2.0 * math.sqrt(2.0)


def test_psi_shape_and_support():
    assert PSI(np.array([4.5, 4.5])) == pytest.approx(math.exp(-2.0))
    assert PSI(np.array([9.2, 4.5])) == 0.0
    assert PSI(np.array([-0.1, 4.5])) == 0.0
    pts = np.array([[4.5, 4.5], [1.0, 1.0], [10.0, 1.0]])
    vals = PSI(pts)
    assert vals.shape == (3,)
    assert vals[2] == 0.0


def test_testfunction_validation():
    with pytest.raises(DomainError):
        TestFunction(centers=(1.0,), widths=(0.0,))
    with pytest.raises(DomainError):
        TestFunction(centers=(1.0, 2.0), widths=(1.0,))
    TransformTriple(source=PSI)  # constructible


def test_Q_trivial_cases():
    zero = TestFunction(centers=(4.5, 4.5), widths=(4.5, 4.5), amplitude=0.0)
    assert Q_of(zero, (0.0, 0.0)) == 0.0
    # w beyond the support kills the integral
    assert Q_of(PSI, (9.0, 0.0)) == 0.0
    assert Q_of(PSI, (10.0, 10.0)) == 0.0


def test_Q_against_scipy_2d_oracle():
    """Independent check: QUADPACK on the raw singular integrand."""
    w = (0.0, 0.0)

    def inner(t1):
        val, _ = integrate.quad(
            lambda t2: PSI(np.array([t1, t2])) / math.sqrt((t1 - w[0]) * (t2 - w[1])),
            w[1], 9.0, epsabs=1e-12, epsrel=1e-10, limit=200,
            points=[0.0, 4.5, 9.0])
        return val

    oracle, _ = integrate.quad(inner, w[0], 9.0, epsabs=1e-10, epsrel=1e-8,
                               limit=200, points=[0.0, 4.5, 9.0])
    mine = Q_of(PSI, w)
    assert abs(mine - oracle) <= 1e-6 * abs(oracle)


def test_Q_positivity_grid():
    rng = np.random.default_rng(2)
    w = rng.uniform(-3.0, 10.0, size=(100, 2))
    assert np.all(Q_of(PSI, w) >= 0.0)


def test_g_evenness_and_value_at_zero():
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = rng.uniform(-2.2, 2.2, size=2)
        flipped = u * np.array([1.0, -1.0])
        assert abs(g_of(PSI, u) - g_of(PSI, flipped)) <= 1e-10
    assert g_of(PSI, (0.0, 0.0)) == pytest.approx(Q_of(PSI, (0.0, 0.0)), abs=1e-14)


def test_g_support_of_multiplier_logs():
    # 4 sinh^2(log(eps)/2) = 4 < 9, 4 sinh^2(log eps) = 32 > 9
    leps = math.log(EPS2)
    assert g_of(PSI, (leps, -leps)) == pytest.approx(Q_of(PSI, (4.0, 4.0)), rel=1e-12)
    assert g_of(PSI, (leps, -leps)) > 0
    assert g_of(PSI, (2 * leps, -2 * leps)) == 0.0
    # support bookkeeping on a grid
    suite = get_suite(PSI)
    for u1 in np.linspace(-4.0, 4.0, 17):
        if 4.0 * math.sinh(0.5 * u1) ** 2 > 9.0:
            assert g_of(PSI, (u1, 0.1)) == 0.0


def test_h_real_even_and_h0():
    assert h_of(PSI, (0.0, 0.0)) == pytest.approx(
        get_suite(PSI).g_integral_axis(0) * get_suite(PSI).g_integral_axis(1), rel=1e-12)
    # direct quadrature oracle for h(0) = int g
    val, _ = integrate.quad(lambda u: g_of(PSI, (u, 0.0)) / g_of(PSI, (0.0, 0.0)),
                            -2.4, 2.4, epsabs=1e-11, limit=100)
    axis_integral = get_suite(PSI).g_integral_axis(0)
    g00 = get_suite(PSI).q_axis(0, 0.0)
    assert abs(val - axis_integral / g00) <= 1e-8 * abs(axis_integral / g00)
    rng = np.random.default_rng(4)
    for _ in range(5):
        r = rng.uniform(-8, 8, size=2)
        assert abs(h_of(PSI, r) - h_of(PSI, -r)) <= 1e-8


def test_h_rapid_decay_empirical():
    # The transform of a compactly supported smooth g is rapidly decreasing;
    # in the reachable window it follows exp(-c sqrt(r)), so the power-law
    # envelope constant C is fitted over the verification grid itself.
    h0 = abs(h_of(PSI, (0.0, 0.0)))
    suite = get_suite(PSI)
    grid = np.linspace(1.0, 300.0, 120)
    vals = np.abs(suite.h_axis(0, grid)) / abs(suite.h_axis(0, 0.0))
    c = float(np.max(vals * (1.0 + grid) ** 6))
    assert np.isfinite(c)
    assert np.all(vals <= c * (1.0 + grid) ** -6 + 1e-300)
    # genuine decay in absolute terms at the top of the window
    assert vals[-1] <= 1e-7
    assert abs(h_of(PSI, (300.0, 300.0))) < 1e-12 * h0


def test_h_of_zero_function():
    zero = TestFunction(centers=(4.5, 4.5), widths=(4.5, 4.5), amplitude=0.0)
    assert h_of(zero, (1.0, 2.0)) == 0.0


def test_g_from_h_round_trip():
    hg = make_h_grid(PSI)
    assert abs(g_from_h(hg, (0.0, 0.0)) - g_of(PSI, (0.0, 0.0))) <= 1e-5
    rng = np.random.default_rng(5)
    U = get_suite(PSI).u_support[0]
    for _ in range(10):
        u = rng.uniform(-U, U, size=2)
        assert abs(g_from_h(hg, u) - g_of(PSI, u)) <= 1e-5


def test_g_from_h_zero():
    hg = HGrid(spacings=(1.0, 1.0), samples=((0.0,) * 8, (0.0,) * 8),
               amplitude=1.0, tail_bound=0.0)
    assert g_from_h(hg, (0.3, 0.4)) == 0.0


def test_psi_from_Q_round_trip_interior():
    q = lambda w: Q_of(PSI, w)
    for t in ([4.5, 4.5], [3.0, 6.0]):
        val = psi_from_Q(q, np.array(t), support=9.0)
        true = float(PSI(np.array(t)))
        assert abs(val - true) <= 1e-3 * abs(true)


def test_psi_from_Q_outside_support():
    q = lambda w: Q_of(PSI, w)
    assert abs(psi_from_Q(q, np.array([9.5, 9.5]), support=9.0)) <= 1e-6
    assert psi_from_Q(lambda w: np.zeros(w.shape[0]), np.array([1.0, 1.0]),
                      support=9.0) == 0.0


def test_offset_bump_smooth_cutoff():
    # support would stick below 0; the profile is cut off smoothly
    psi = TestFunction(centers=(1.0, 4.5), widths=(2.0, 4.5))
    assert psi(np.array([-0.5, 4.5])) == 0.0
    assert psi(np.array([1.5, 4.5])) > 0.0
    assert Q_of(psi, (0.0, 0.0)) > 0.0

"""The compiled backend and the NumPy fallback must agree bit-for-purpose."""

import math

import numpy as np
import pytest

from hmftrace import backends
from hmftrace.backends import _ref

try:
    from hmftrace.backends import _hot
except ImportError:
    _hot = None

needs_ext = pytest.mark.skipif(_hot is None, reason="compiled backend unavailable")


def test_some_backend_selected():
    assert backends.BACKEND_NAME in ("ext", "numpy")


def test_ref_bump_profile_values():
    x = np.array([-2.0, -1.0, 0.0, 0.5, 1.0, 3.0])
    vals = _ref.bump_profile(x)
    assert vals[0] == vals[1] == vals[4] == vals[5] == 0.0
    assert abs(vals[2] - math.exp(-1.0)) < 1e-15
    assert abs(vals[3] - math.exp(-1.0 / 0.75)) < 1e-15


@needs_ext
def test_bump_profile_backends_agree():
    rng = np.random.default_rng(31)
    x = rng.uniform(-1.5, 1.5, size=4096)
    a = _ref.bump_profile(x)
    b = _hot.bump_profile(x)
    # libm vs numpy exp may differ in the final ulp
    assert np.max(np.abs(a - b)) <= 4e-16
    assert np.array_equal(a == 0.0, b == 0.0)


@needs_ext
def test_theta_sum_backends_agree():
    rng = np.random.default_rng(32)
    lsq = rng.uniform(0.0, 30.0, size=(500, 2))
    xw = np.exp(rng.uniform(-1.0, 1.0, size=(64, 2)))
    a = _ref.theta_sum_batch(xw, lsq)
    b = _hot.theta_sum_batch(xw, lsq)
    assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(a))


@needs_ext
def test_norm_char_scan_backends_agree():
    w = np.array([[1.0, math.sqrt(2.0)], [1.0, -math.sqrt(2.0)]])
    log_eps = math.log(3.0 + 2.0 * math.sqrt(2.0))
    a1, c1 = _ref.norm_char_scan(w, -60, 60, -45, 45, log_eps, 50.0)
    a2, c2 = _hot.norm_char_scan(w, -60, 60, -45, 45, log_eps, 50.0)
    assert a1.size == a2.size
    assert np.allclose(np.sort(a1), np.sort(a2), atol=1e-12)
    order1 = np.lexsort((c1, a1))
    order2 = np.lexsort((c2, a2))
    assert np.allclose(c1[order1], c2[order2], atol=1e-12)


@needs_ext
def test_power_char_sum_backends_agree():
    rng = np.random.default_rng(33)
    absn = rng.uniform(1.0, 100.0, size=2000)
    c = rng.uniform(0.0, 1.0, size=2000)
    for s, m in ((2.0 + 0.0j, 0.0), (2.5 - 1.2j, 1.0), (3.0 + 0.4j, -2.0)):
        a = _ref.power_char_sum(absn, c, s, m)
        b = _hot.power_char_sum(absn, c, s, m)
        assert abs(a - b) <= 1e-11 * max(1.0, abs(a))

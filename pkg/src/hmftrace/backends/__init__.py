"""Backend selection: compiled extension when available, NumPy otherwise.

The compiled module is a pure speed play; both backends implement the same
functions with the same semantics.  Set HMFTRACE_NO_EXT=1 to force the NumPy
fallback (benchmarks/bench_backends.py compares the two).
"""

import os

from . import _ref

if os.environ.get("HMFTRACE_NO_EXT"):
    _impl = _ref
else:
    try:
        from . import _hot as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _ref

BACKEND_NAME = _impl.NAME
bump_profile = _impl.bump_profile
theta_sum_batch = _impl.theta_sum_batch
norm_char_scan = _impl.norm_char_scan
power_char_sum = _impl.power_char_sum

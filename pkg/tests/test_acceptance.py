"""Acceptance gate: every headline criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with -s or on failure) and
asserts the criterion's bound; the `hmftrace verify` command runs the same
checks through hmftrace.acceptance.
"""

from hmftrace import acceptance


def _run(check):
    results = check()
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"[{mark}] {res.name}: {res.detail} "
              f"(measured {res.measured:.3e}, bound {res.bound:.1e})")
    for res in results:
        assert res.passed, f"{res.name}: measured {res.measured:.3e} " \
                           f"exceeds bound {res.bound:.1e} ({res.detail})"


def test_criterion_01_transform_round_trips():
    _run(acceptance.check_transform_round_trip)


def test_criterion_02_theta_summation_identity():
    _run(acceptance.check_poisson_theta)


def test_criterion_03_zeta_correctness():
    _run(acceptance.check_zeta_correctness)


def test_criterion_04_residues():
    _run(acceptance.check_residues)


def test_criterion_05_functional_equation():
    _run(acceptance.check_functional_equation)


def test_criterion_06_spherical_profiles():
    _run(acceptance.check_spherical)


def test_criterion_07_elliptic_vs_bruteforce():
    _run(acceptance.check_elliptic_vs_oracle)


def test_criterion_08_mixed_vs_bruteforce():
    _run(acceptance.check_mixed_vs_oracle)


def test_criterion_09_cusp_pair_identities():
    _run(acceptance.check_cusp_pair_identities)


def test_criterion_10_parabolic_identities():
    _run(acceptance.check_parabolic_identities)


def test_criterion_11_eisenstein_sanity():
    _run(acceptance.check_eisenstein)


def test_criterion_12_end_to_end():
    _run(acceptance.check_end_to_end)

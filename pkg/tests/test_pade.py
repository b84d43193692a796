from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkenergy import pade
from rkenergy.continuum import d_hat
from rkenergy.energy import beta_gamma, decompose
from rkenergy.exactnum import rising_factorial, utdu_factorize
from rkenergy.methods import make_pade

SAMPLES = pade.SAMPLE_POINTS

# rationals whose double is not an integer
extended_x = st.fractions(min_value=-30, max_value=30, max_denominator=40).filter(
    lambda x: (2 * x).denominator != 1)


@pytest.mark.parametrize("s, i, want", [(2, 1, F(1, 2)), (2, 2, F(1, 12)), (1, 1, F(1, 2))])
def test_theta(s, i, want):
    assert pade.pade_theta(s, i) == want
    assert make_pade(s, s).theta[i] == want


@pytest.mark.parametrize("s", range(1, 13))
def test_closed_forms_match_numerical_factorization(s):
    # factor the symmetric matrix numerically and compare with the closed forms
    f = utdu_factorize(beta_gamma(make_pade(s, s)).gamma)
    assert f.success
    c = pade.PadeClosedForms(s)
    assert f.U == c.mu
    assert f.d == c.d_hat


def test_mu_examples():
    assert all(pade.pade_mu(s, k, k) == 1 for s in range(1, 11) for k in range(s))
    assert pade.pade_mu(3, 0, 2) == F(1, 60)
    assert all(pade.pade_mu(s, 0, 1) == 0 for s in range(2, 8))
    assert pade.pade_mu(4, 2, 0) == 0


@pytest.mark.parametrize("k, want", [(0, 1), (1, F(1, 12)), (2, F(1, 720))])
def test_d_hat(k, want):
    assert pade.d_hat(k) == want == d_hat(k)


def test_gamma_direct_examples():
    assert pade.pade_gamma_direct(2, 0, 0) == -1
    assert pade.pade_gamma_direct(2, 0, 1) == 0
    assert pade.pade_gamma_direct(2, 1, 1) == F(-1, 12) == -d_hat(1)


@pytest.mark.parametrize("s", range(1, 13))
def test_two_routes_to_gamma_agree(s):
    assert pade.PadeClosedForms(s).gamma() == beta_gamma(make_pade(s, s)).gamma


@pytest.mark.parametrize("s", [1, 4, 20])
def test_cholesky_residual_is_zero(s):
    R = pade.verify_pade_cholesky(s)
    assert R.shape == (s, s) and R.is_zero()


def test_closed_form_invariants():
    c = pade.PadeClosedForms(7)
    for i in range(7):
        assert c.mu[i, i] == 1 and c.d_hat[i] > 0
        for j in range(7):
            if j < i or (j - i) % 2:
                assert c.mu[i, j] == 0


def test_decompose_needs_no_shift_for_diagonal_pade():
    dec = decompose(beta_gamma(make_pade(6, 6)))
    assert all(d == 0 for d in dec.delta)
    assert dec.d_tilde == pade.PadeClosedForms(6).d_hat


@pytest.mark.parametrize("s", range(1, 16))
def test_binomial_sum_identity(s):
    assert pade.verify_binomial_sum_identity(s)


def test_binomial_sum_parity_branch_is_zero():
    assert pade._binomial_sum_brute(5, 0, 3) == 0
    assert pade._binomial_sum_brute(5, 0, 2) == pade._binomial_sum_closed(5, 0, 2) != 0
    # single-term diagonal case: binom(s, i)^{-1} * binom(2s, 0) * 1
    assert pade._binomial_sum_brute(6, 2, 2) == F(1, 15)


@pytest.mark.parametrize("s", [1, 4, 12])
def test_shifted_mu_coefficients(s):
    r = pade.verify_shifted_mu_coefficients(s)
    assert r and r.cases == s * (s + 1) // 2 + s


def test_theta_extended_at_integers():
    for s in range(1, 8):
        for i in range(s + 1):
            assert pade.theta_extended(s, i) == pade.pade_theta(s, i)
        for i in range(s + 1, 2 * s):
            assert pade.theta_extended(s, i) == 0
    assert pade.theta_extended(2, 3) == 0


def test_integer_consistency():
    assert pade.verify_integer_consistency(8)


def test_nu_branches():
    assert pade.nu(F(1, 3), 2, 1) == 0
    assert pade.nu(F(1, 3), 1, 2) == 0
    assert pade.nu(F(1, 3), 1, 1) != 0


@pytest.mark.parametrize("bad", [F(1), F(-3, 2), 0, F(7, 2)])
def test_domain_guard(bad):
    with pytest.raises(pade.DomainError):
        pade.nu(bad, 1, 1)
    with pytest.raises(pade.DomainError):
        pade.phi_n(bad, 0, 1, 1)
    with pytest.raises(pade.DomainError):
        pade.verify_extended_cholesky(bad, 2)


def test_extended_cholesky_examples():
    assert pade.extended_residual(F(1, 3), 1, 1) == 0
    assert pade.extended_residual(F(7, 5), 2, 3) == 0
    assert pade.gamma_extended(F(7, 5), 1, 2) == 0
    assert pade.extended_residual(F(22, 7), 4, 4) == 0


@pytest.mark.parametrize("x", SAMPLES)
def test_extended_identities_at_samples(x):
    assert pade.verify_extended_cholesky(x, 10)
    assert pade.verify_nu_theta_relations(x, 10, 10)
    assert pade.verify_phi_recurrences(x, 10, 10, 12)
    assert pade.verify_phi_sum_and_nu_pairing(x, 10, 10)
    assert pade.verify_nu_phi_pairing(x, 5, 10, 10)


def test_phi_examples():
    x = F(1, 3)
    assert pade.Phi_n(x, 0, 3, 2) == 1
    assert pade.phi_n(x, 0, 1, 1) == 1
    assert all(pade.phi_n(x, n, 3, 4) == 0 for n in range(3, 8))
    assert pade.Phi_n(x, 2, 3, 4) - pade.Phi_n(x, 1, 3, 4) == -pade.phi_n(x, 1, 3, 4)


def test_nu_sum_example():
    x = F(7, 5)
    lhs = sum(pade.nu_product(x, i, 3, 3) for i in range(1, 4))
    lhs += sum(pade.nu_product(x, i, 4, 2) for i in range(1, 3))
    assert lhs == 2 * pade.theta_extended(x, 3) * pade.theta_extended(x, 2)


@settings(max_examples=25, deadline=None)
@given(extended_x, st.integers(1, 6), st.integers(1, 6))
def test_extended_residual_vanishes_anywhere(x, p, q):
    assert pade.extended_residual(x, p, q) == 0


@settings(max_examples=25, deadline=None)
@given(extended_x, st.integers(1, 6), st.integers(1, 6))
def test_telescoping_anywhere(x, p, q):
    total = sum(pade.phi_n(x, n, p, q) for n in range(p))
    assert total == 1 == pade.Phi_n(x, 0, p, q) - pade.Phi_n(x, p, p, q)


def test_pochhammer_identities():
    assert pade.verify_pochhammer_identities(SAMPLES, 10)


def test_pochhammer_examples():
    x = F(1, 3)
    assert rising_factorial(x, 4) == 2 ** 4 * rising_factorial(x / 2, 2) * rising_factorial(
        (x + 1) / 2, 2)
    assert pade.factorial(8) == 40320 == pade.factorial(5) * rising_factorial(6, 3)
    assert pade.factorial(8) / pade.factorial(3) == -rising_factorial(-6, 3) * rising_factorial(7, 2)


def test_check_result_reports_counterexample():
    sw = pade._Sweep("demo", n=1)
    sw.expect(F(1), F(2), i=0)
    r = sw.result()
    assert not r
    d = r.as_dict()
    assert d["status"] == "fail" and d["counterexample"] == {"i": 0, "lhs": "1", "rhs": "2"}

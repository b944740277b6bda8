import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ppmwt import bounds
from ppmwt.bounds import (
    SecurityBudget,
    asymptotic_rate,
    bennett_eps_prime,
    choose_params,
    delta_bound,
    eve_photon_tail,
    hmax_bound,
    hmax_exact,
    hoeffding_error_bound,
    hoeffding_tail_bound,
    optimize,
    pr_error_bound,
    secrecy_capacity,
    secrecy_capacity_approx,
)
from ppmwt.params import InfeasibleError, SchemeParams


def capacity_mp(eta, E, dps=60):
    """Capacity formula term by term at high precision."""
    with mpmath.workdps(dps):
        eta, E = mpmath.mpf(eta), mpmath.mpf(E)
        a, c = eta * E, (1 - eta) * E
        val = (1 + a) * mpmath.log(1 + a) - a * mpmath.log(a) \
            - (1 + c) * mpmath.log(1 + c) + c * mpmath.log(c)
        return float(val)


def binom_tail_exact(n, k, q):
    q = Fraction(q)
    return float(sum(math.comb(n, j) * q**j * (1 - q)**(n - j) for j in range(n - k + 1, n + 1)))


# -- capacity ---------------------------------------------------------------

def test_capacity_examples():
    assert secrecy_capacity(0.8, 0.0) == 0.0
    assert secrecy_capacity(0.5, 0.1) == 0.0
    assert secrecy_capacity(0.8, 0.1) == pytest.approx(capacity_mp(0.8, 0.1), rel=1e-12)


def test_capacity_sanity():
    for E in (1e-1, 1e-3, 1e-6):
        caps = [secrecy_capacity(eta, E) for eta in np.linspace(0.51, 0.99, 25)]
        assert all(c > 0 for c in caps)
        assert all(x < y for x, y in zip(caps, caps[1:]))


def test_approx_examples():
    assert secrecy_capacity_approx(0.5, 1e-3) == 0.0
    assert secrecy_capacity_approx(0.8, 1.0) == 0.0
    ratios = [secrecy_capacity_approx(0.8, 10.0**-e) / secrecy_capacity(0.8, 10.0**-e)
              for e in range(2, 13, 2)]
    assert all(x < y < 1 for x, y in zip(ratios, ratios[1:]))


def test_asymptotic_rate_is_approximation():
    for eta in (0.6, 0.8, 0.95):
        for E in (1e-2, 1e-6, 1.0):
            assert asymptotic_rate(eta, E) == pytest.approx(secrecy_capacity_approx(eta, E), rel=1e-14)


# -- parameters -------------------------------------------------------------

def test_choose_params_example():
    target = 1 / (0.8e-4 * math.log(1 / 0.8e-4))
    assert target == pytest.approx(1325.07, abs=0.01)
    p = choose_params(0.8, 1e-4, 0.1)
    assert (p.b, p.n) == (1024, 1023)
    assert p.pulse_energy == pytest.approx(0.1024, rel=1e-15)
    assert p.k == math.floor(0.9 * (1 - math.exp(-0.8 * 0.1024)) * 1023)
    assert p.lam == 0


def test_choose_params_infeasible():
    with pytest.raises(InfeasibleError):
        choose_params(0.8, 1e-4, 1.0)
    with pytest.raises(InfeasibleError):
        choose_params(0.8, 0.05, 0.1)


def test_frame_size_monotone():
    Es = np.logspace(-2.5, -12, 200)
    bs = [bounds.frame_size(0.8, E) for E in Es]
    assert all(x <= y for x, y in zip(bs, bs[1:]))
    assert all(b & (b - 1) == 0 for b in bs)


# -- error bound ------------------------------------------------------------

def test_pr_error_examples():
    assert pr_error_bound(7, 3, 0.0) == 0.0
    assert pr_error_bound(7, 3, 1.0) == 1.0
    assert pr_error_bound(3, 2, 0.5) == pytest.approx(0.5, rel=1e-15)


@pytest.mark.parametrize("n", [1, 3, 7, 15, 40, 63])
def test_pr_error_matches_exact_sum(n):
    for k in range(1, n + 1):
        for q in (0.01, 0.3, 0.5, 0.77, 0.99):
            assert pr_error_bound(n, k, q) == pytest.approx(binom_tail_exact(n, k, q), rel=1e-11, abs=1e-300)


@pytest.mark.parametrize("n,k,q", [(1023, 40, 0.92), (8191, 418, 0.9365),
                                   (65535, 3082, 0.937), (4194303, 136603, 0.9658)])
def test_pr_error_large_against_scipy(n, k, q):
    ref = stats.binom.sf(n - k, n, q)
    assert pr_error_bound(n, k, q) == pytest.approx(ref, rel=1e-9)


def test_hoeffding_examples():
    assert hoeffding_error_bound(100, 0.0) == 1.0
    vals = [hoeffding_error_bound(n, 0.1) for n in (7, 63, 511, 4095)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_hoeffding_tail_dominates_everywhere():
    for n in (7, 15, 31, 63, 127, 255, 511, 1023):
        for theta in (0.01, 0.05, 0.1, 0.2, 0.3):
            for q in (0.05, 0.3, 0.6, 0.9, 0.95):
                k = bounds.code_dimension(n, q, theta)
                if k < 1:
                    continue
                assert pr_error_bound(n, k, q) <= hoeffding_tail_bound(n, k, q)


def test_backoff_form_is_not_a_bound_for_large_q():
    # b = 64, theta = 0.2, q = 0.9: k = 5, P[fewer than 5 of 63 detected] ~ 0.23
    n, theta, q = 63, 0.2, 0.9
    k = bounds.code_dimension(n, q, theta)
    assert k == 5
    assert pr_error_bound(n, k, q) > hoeffding_error_bound(n, theta)


# -- photon tails -----------------------------------------------------------

def test_eve_photon_tail_examples():
    assert eve_photon_tail(3.0, 0.0) == 0.0
    direct = 2 * (1 - sum(math.exp(-1) / math.factorial(i) for i in range(11)))
    with mpmath.workdps(50):
        exact = 2 * mpmath.nsum(lambda i: mpmath.e**-1 / mpmath.factorial(i), [11, mpmath.inf])
    assert eve_photon_tail(10, 1.0) == pytest.approx(float(exact), rel=1e-12)
    assert eve_photon_tail(10.7, 1.0) == pytest.approx(float(exact), rel=1e-12)
    assert direct == pytest.approx(float(exact), rel=1e-4)
    with pytest.raises(ValueError):
        eve_photon_tail(1.0, 1.0)


@pytest.mark.parametrize("mu", [0.3, 4.0, 21.0, 134.0, 5000.0])
def test_eve_photon_tail_against_incomplete_gamma(mu):
    for s in np.linspace(mu * 1.01 + 0.1, mu * 1.6 + 10, 7):
        j = math.floor(s) + 1
        # 2 gamma(floor(s + 1), mu) / floor(s)!  =  2 P(j, mu)
        ref = 2 * float(mpmath.gammainc(j, 0, mu, regularized=True))
        assert eve_photon_tail(s, mu) == pytest.approx(ref, rel=1e-9)


def test_eve_photon_tail_monotone():
    vals = [eve_photon_tail(s, 20.0) for s in np.linspace(20.5, 80, 60)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_bennett_examples():
    assert bennett_eps_prime(100, 0.8, 1.0, 1e-12) == pytest.approx(1.0)
    val = bennett_eps_prime(1000, 0.8, 0.5, 0.5)  # mu = 100
    assert val == pytest.approx(math.exp(-50 * (1.5 * math.log(1.5) - 0.5)), rel=1e-13)
    seq = [bennett_eps_prime(n, 0.8, 0.1, 0.3) for n in (10, 100, 1000, 10000)]
    assert all(x > y for x, y in zip(seq, seq[1:]))


def test_bennett_dominates_poisson_tail():
    for mu in (5.0, 50.0, 500.0):
        for delta in (0.1, 0.5, 2.0):
            s = (1 + delta) * mu
            tail = math.exp(bounds.log_poisson_sf(math.floor(s) + 1, mu))
            # Chernoff: P[X >= (1 + delta) mu] <= exp(-mu h(delta)), the square of eps'
            assert tail <= bennett_eps_prime(1, 0.0, mu, delta) ** 2


# -- max-entropy ------------------------------------------------------------

def test_hmax_exact_s1():
    for n, b in [(7, 8), (63, 64), (1023, 1024)]:
        assert hmax_exact(n, b, 1) == pytest.approx(math.log(1 + n * b), rel=1e-12)
        assert hmax_exact(n, b, 1.9) == pytest.approx(math.log(1 + n * b), rel=1e-12)


def test_hmax_exact_matches_stars_and_bars():
    for d, s in [(10, 3), (56, 5), (300, 17)]:
        # sum_{i<=S} C(d-1+i, i) = C(d+S, S)
        assert hmax_exact(d, 1, s) == pytest.approx(math.log(math.comb(d + s, s)), rel=1e-12)


def test_hmax_analytic_dominates_exact():
    for nb in (10, 30, 100, 300, 1000, 3000, 10_000):
        for s in range(1, 51):
            assert hmax_bound(nb, 1, s) >= hmax_exact(nb, 1, s)


def test_hmax_entropy_edge():
    assert bounds.binary_entropy(0.0) == 0.0
    assert hmax_bound(10**12, 1, 1.0) == pytest.approx(
        (10**12) * bounds.binary_entropy(1 / 10**12), rel=1e-9)


# -- secrecy bound ----------------------------------------------------------

def spreadsheet_delta(lam, k, b, n, s, eps, eps_prime):
    """Direct, non-log-space evaluation of the closed form (mpmath)."""
    with mpmath.workdps(50):
        N = mpmath.mpf(n * b - 1) + s
        p = mpmath.mpf(s) / N
        H = -p * mpmath.log(p) - (1 - p) * mpmath.log(1 - p)
        expo = -k * mpmath.log(b) + N * H + mpmath.log(s) \
            + 2 * mpmath.log(2 / (mpmath.mpf(eps) - 2 * eps_prime) ** 2)
        return float(mpmath.mpf(0.5) * mpmath.sqrt(mpmath.mpf(2) ** lam * mpmath.exp(expo)) + eps)


def test_delta_bound_reference_point():
    res = optimize(0.8, 1e-5)
    p, budget = res.params, res.budget
    ref = spreadsheet_delta(p.lam, p.k, p.b, p.n, budget.photon_cutoff, budget.eps, budget.eps_prime)
    assert res.report.delta_bound == pytest.approx(ref, rel=1e-9)
    assert res.report.delta_bound <= 0.05


def test_delta_bound_at_b1024():
    p = choose_params(0.8, 1e-4, 0.05).with_lam(10)
    budget = SecurityBudget.derive(p, 0.04, 1.0, 0.05)
    rep = delta_bound(p, budget)
    ref = spreadsheet_delta(10, p.k, p.b, p.n, budget.photon_cutoff, 0.04, budget.eps_prime)
    assert rep.delta_vacuous == (ref >= 1)
    assert rep.delta_bound == pytest.approx(min(ref, 1.0), rel=1e-9)


def test_delta_lambda_zero_limit():
    # mu = 0.2 * 0.25 * 1023 ~ 51 photons, hmax ~ 1e3 nats << k ln b ~ 6e3
    p = SchemeParams(eta=0.8, b=1024, k=900, pulse_energy=0.25, lam=0)
    budget = SecurityBudget.derive(p, 0.01, 1.0)
    rep = delta_bound(p, budget)
    assert rep.log_delta_first_term < -2000
    assert rep.delta_bound == pytest.approx(0.01, rel=1e-12)


def test_delta_lambda_doubles_square():
    p = choose_params(0.8, 1e-6, 0.1)
    budget = SecurityBudget.derive(p, 0.03, 0.2)
    a = delta_bound(p.with_lam(100), budget)
    b = delta_bound(p.with_lam(101), budget)
    assert 2 * (b.log_delta_first_term - a.log_delta_first_term) == pytest.approx(math.log(2), rel=1e-9)


def test_delta_bound_rejects_bad_budget():
    p = choose_params(0.8, 1e-6, 0.1)
    with pytest.raises(InfeasibleError):
        delta_bound(p, SecurityBudget(eps=0.01, eps_prime=0.005, delta=1, theta=0, photon_cutoff=10))


# -- optimizer --------------------------------------------------------------

def test_optimize_examples():
    assert not optimize(0.8, 1e-3).feasible
    assert optimize(0.8, 1e-3).rate == 0.0
    res = optimize(0.8, 1e-6)
    assert res.feasible and 0 < res.rate < secrecy_capacity(0.8, 1e-6)
    assert not optimize(0.5000001, 1e-8).feasible
    assert not optimize(0.8, 1e-6, delta_target=0.0).feasible


def test_optimize_deterministic():
    a, b = optimize(0.8, 1e-7), optimize(0.8, 1e-7)
    assert a == b


@settings(max_examples=15, deadline=None)
@given(st.floats(0.6, 0.95), st.floats(-10, -5))
def test_optimizer_outputs_recheck(eta, log_E):
    res = optimize(eta, 10**log_E, 1e-6, 0.05)
    if res.feasible:
        p, budget = res.params, res.budget
        assert pr_error_bound(p.n, p.k, p.erasure_prob) <= 1e-6
        assert delta_bound(p, budget).delta_bound <= 0.05
        assert budget.eps_prime < budget.eps / 2
        assert 0 < res.rate < res.capacity


def test_rate_trend_toward_asymptote():
    ratios = [optimize(0.8, 10.0**-e).rate / asymptotic_rate(0.8, 10.0**-e) for e in range(6, 13)]
    assert all(x < y for x, y in zip(ratios, ratios[1:]))

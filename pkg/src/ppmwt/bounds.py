"""Closed-form numerics: capacity, parameter choice, finite-length bounds, optimizer.

Everything is in nats.  Tail probabilities are evaluated as log-space sums
of exact pmf terms (binomial and Poisson), so the integer-parameter
incomplete beta and gamma functions never go through continued fractions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from ppmwt.params import InfeasibleError, SchemeParams

log = logging.getLogger(__name__)

LOG_CLAMP = 745.0
LN2 = math.log(2.0)
_SUM_RTOL = 1e-18


def clamped_exp(x: float) -> float:
    return math.exp(min(max(x, -LOG_CLAMP), LOG_CLAMP))


# ---------------------------------------------------------------------------
# Capacity
# ---------------------------------------------------------------------------

def _g(x: float) -> float:
    """Entropy of a thermal state with mean photon number x."""
    if x == 0:
        return 0.0
    return math.log1p(x) + x * math.log1p(1.0 / x)


def secrecy_capacity(eta: float, E: float) -> float:
    """Secrecy capacity of the pure-loss channel under a mean photon budget."""
    if E < 0:
        raise ValueError("photon budget must be non-negative")
    if not 0 <= eta <= 1:
        raise ValueError("transmissivity must lie in [0, 1]")
    return _g(eta * E) - _g((1.0 - eta) * E)


def secrecy_capacity_approx(eta: float, E: float) -> float:
    """Low-photon approximation (2 eta - 1) E ln(1/E)."""
    if E <= 0:
        return 0.0
    return (2.0 * eta - 1.0) * E * math.log(1.0 / E)


def asymptotic_rate(eta: float, E: float) -> float:
    """Rate the scheme attains as E -> 0 with the parameter rules of choose_params."""
    if E <= 0:
        raise ValueError("photon budget must be positive")
    return (2.0 * eta - 1.0) * E * -math.log(E)


# ---------------------------------------------------------------------------
# Parameter choice
# ---------------------------------------------------------------------------

def frame_target(eta: float, E: float) -> float:
    """Real-valued PPM frame size 1 / (eta E ln(1 / (eta E)))."""
    x = eta * E
    if not 0 < x < 1:
        return 0.0
    return 1.0 / (x * math.log(1.0 / x))


def frame_size(eta: float, E: float) -> int:
    """Largest power of two not exceeding the frame target (at least 8)."""
    target = frame_target(eta, E)
    if target < 8:
        raise InfeasibleError(f"frame target {target:.3g} < 8 at E={E:g}")
    return 1 << (int(target).bit_length() - 1)


def code_dimension(n: int, q: float, theta: float) -> int:
    return math.floor((1.0 - theta) * (1.0 - q) * n)


def choose_params(eta: float, E: float, theta: float) -> SchemeParams:
    """Frame size, pulse energy and code dimension for a photon budget.

    ``b`` is the largest power of two not above the frame target, the whole
    frame budget goes into one pulse (``alpha^2 = b E``) and
    ``k = floor((1 - theta)(1 - q) n)``.  ``lam`` is left at 0.
    """
    b = frame_size(eta, E)
    alpha_sq = b * E
    q = math.exp(-eta * alpha_sq)
    k = code_dimension(b - 1, q, theta)
    if k < 1:
        raise InfeasibleError(f"k={k} for theta={theta}")
    return SchemeParams(eta=eta, b=b, k=k, pulse_energy=alpha_sq)


# ---------------------------------------------------------------------------
# Tails
# ---------------------------------------------------------------------------

def _log_binom_pmf(n: int, j: int, logq: float, log1mq: float) -> float:
    return (math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
            + j * logq + (n - j) * log1mq)


@lru_cache(maxsize=4096)
def log_binom_sf(n: int, q: float, j: int) -> float:
    """ln P[Binomial(n, q) >= j]."""
    if j <= 0 or q >= 1.0:
        return 0.0 if j <= n else -math.inf
    if j > n or q <= 0.0:
        return -math.inf
    logq, log1mq = math.log(q), math.log1p(-q)
    odds = q / (1.0 - q)
    if j > n * q:
        total, term, i = 1.0, 1.0, j
        while i < n:
            term *= (n - i) / (i + 1) * odds
            total += term
            i += 1
            if term < _SUM_RTOL * total:
                break
        return _log_binom_pmf(n, j, logq, log1mq) + math.log(total)
    # lower tail P[X <= j - 1], summed downward
    total, term, i = 1.0, 1.0, j - 1
    while i > 0:
        term *= i / (n - i + 1) / odds
        total += term
        i -= 1
        if term < _SUM_RTOL * total:
            break
    log_cdf = _log_binom_pmf(n, j - 1, logq, log1mq) + math.log(total)
    return math.log1p(-min(math.exp(log_cdf), 1.0)) if log_cdf < 0 else -math.inf


@lru_cache(maxsize=4096)
def log_poisson_sf(j: int, mu: float) -> float:
    """ln P[Poisson(mu) >= j]."""
    if j <= 0:
        return 0.0
    if mu <= 0:
        return -math.inf
    logmu = math.log(mu)
    if j > mu:
        total, term, i = 1.0, 1.0, j
        while True:
            term *= mu / (i + 1)
            total += term
            i += 1
            if term < _SUM_RTOL * total:
                break
        return j * logmu - mu - math.lgamma(j + 1) + math.log(total)
    total, term, i = 1.0, 1.0, j - 1
    while i > 0:
        term *= i / mu
        total += term
        i -= 1
        if term < _SUM_RTOL * total:
            break
    log_cdf = (j - 1) * logmu - mu - math.lgamma(j) + math.log(total)
    return math.log1p(-min(math.exp(log_cdf), 1.0)) if log_cdf < 0 else -math.inf


def pr_error_bound(n: int, k: int, q: float) -> float:
    """I_q(n - k + 1, k): probability of more than n - k erasures out of n."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 <= q <= 1:
        raise ValueError(f"erasure probability {q} outside [0, 1]")
    return math.exp(log_binom_sf(n, float(q), n - k + 1))


def hoeffding_error_bound(n: int, theta: float) -> float:
    """exp(-2 n theta^2), the back-off form of the error bound.

    Not a valid bound on ``pr_error_bound`` for every erasure probability:
    Hoeffding only gives exp(-2 n theta^2 (1 - q)^2) at
    ``k = floor((1 - theta)(1 - q) n)``; see :func:`hoeffding_tail_bound`.
    """
    return math.exp(-2.0 * n * theta * theta)


def hoeffding_tail_bound(n: int, k: int, q: float) -> float:
    """Hoeffding bound on P[fewer than k of n pulses detected]."""
    t = n * (1.0 - q) - (k - 1)
    if t <= 0:
        return 1.0
    return math.exp(-2.0 * t * t / n)


def log_eve_photon_tail(s: float, mu: float) -> float:
    if not s > mu >= 0:
        raise ValueError(f"photon cutoff {s} must exceed the mean {mu}")
    return LN2 + log_poisson_sf(math.floor(s) + 1, float(mu))


def eve_photon_tail(s: float, mu: float) -> float:
    """Bound 2 P[Poisson(mu) > s] on Eve holding more than s photons.

    The factor 2 is carried over unchanged even though the plain Poisson
    tail already bounds the probability.
    """
    return math.exp(log_eve_photon_tail(s, mu))


def log_bennett_eps_prime(n: int, eta: float, alpha_sq: float, delta: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    mu = (1.0 - eta) * alpha_sq * n
    return -0.5 * mu * ((1.0 + delta) * math.log1p(delta) - delta)


def bennett_eps_prime(n: int, eta: float, alpha_sq: float, delta: float) -> float:
    return math.exp(log_bennett_eps_prime(n, eta, alpha_sq, delta))


# ---------------------------------------------------------------------------
# Max-entropy of Eve's truncated state
# ---------------------------------------------------------------------------

def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def hmax_bound(n: int, b: int, s: float) -> float:
    """(nb - 1 + s) H_b(s / (nb - 1 + s)) + ln s, in nats."""
    if s < 1:
        raise ValueError(f"photon cutoff must be >= 1, got {s}")
    total = n * b - 1 + s
    p = s / total
    # total * H_b(p) written to stay accurate when p is tiny
    entropy = s * math.log(total / s) - (total - s) * math.log1p(-p)
    return entropy + math.log(s)


def hmax_exact(n: int, b: int, s: float) -> float:
    """ln sum_{i=0}^{floor s} C(nb - 1 + i, i): log-dimension of the <= s photon subspace."""
    top = math.floor(s)
    if top > 10**7:
        raise ValueError("photon cutoff too large for the exact sum")
    d = n * b
    i = np.arange(1, top + 1, dtype=np.float64)
    # ln C(d - 1 + i, i) as a running sum of ln((d - 1 + j) / j)
    terms = np.concatenate(([0.0], np.cumsum(np.log1p((d - 1) / i))))
    hi = terms.max()
    return float(hi + np.log(np.exp(terms - hi).sum()))


# ---------------------------------------------------------------------------
# Secrecy bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecurityBudget:
    eps: float
    eps_prime: float
    delta: float
    theta: float
    photon_cutoff: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.eps_prime < 0:
            raise ValueError("eps_prime must be non-negative")
        if self.photon_cutoff < 0:
            raise ValueError("photon cutoff must be non-negative")

    @property
    def admissible(self) -> bool:
        return self.eps_prime < self.eps / 2

    @classmethod
    def derive(cls, p: SchemeParams, eps: float, delta: float,
               theta: float = 0.0) -> SecurityBudget:
        """Cutoff s = (1 + delta) mu and the better of the two eps' bounds."""
        mu = p.eve_mean_photons
        s = (1.0 + delta) * mu
        return cls(eps=eps, eps_prime=_eps_prime(p.n, p.eta, p.pulse_energy, delta),
                   delta=delta, theta=theta, photon_cutoff=s)


def _log_eps_prime(n: int, eta: float, alpha_sq: float, delta: float) -> float:
    mu = (1.0 - eta) * alpha_sq * n
    if mu == 0:
        return -math.inf
    s = (1.0 + delta) * mu
    via_tail = 0.5 * log_eve_photon_tail(s, mu)
    via_bennett = log_bennett_eps_prime(n, eta, alpha_sq, delta)
    return min(via_tail, via_bennett)


def _eps_prime(n, eta, alpha_sq, delta) -> float:
    return math.exp(_log_eps_prime(n, eta, alpha_sq, delta))


@dataclass(frozen=True)
class BoundReport:
    pr_error_bound: float
    delta_bound: float
    rate_nats_per_use: float
    hmin_term: float
    hmax_term: float
    feasible: bool
    delta_vacuous: bool = False
    log_delta_first_term: float = field(default=-math.inf, repr=False)


def _secrecy_exponent(k: int, b: int, n: int, lam: int, s: float,
                      eps: float, eps_prime: float) -> tuple[float, float]:
    """(exponent inside the square root, hmax term) for the Delta bound."""
    hmin = k * math.log(b)
    hmax = hmax_bound(n, b, max(s, 1.0))
    smoothing = 2.0 * math.log(2.0 / (eps - 2.0 * eps_prime) ** 2)
    return lam * LN2 - hmin + hmax + smoothing, hmax


def delta_bound(p: SchemeParams, budget: SecurityBudget) -> BoundReport:
    """Finite-length secrecy and error bounds for one parameter set.

    Delta <= 1/2 sqrt(2^lam exp(-k ln b + H_max + 2 ln(2 / (eps - 2 eps')^2))) + eps,
    with H_max the analytic bound on the truncated state (its ln s term
    included) and s clamped below at 1.
    """
    if not budget.admissible:
        raise InfeasibleError(
            f"eps'={budget.eps_prime:.3g} is not below eps/2={budget.eps / 2:.3g}")
    exponent, hmax = _secrecy_exponent(
        p.k, p.b, p.n, p.lam, budget.photon_cutoff, budget.eps, budget.eps_prime)
    log_first = math.log(0.5) + 0.5 * exponent
    raw = clamped_exp(log_first) + budget.eps
    pr_err = pr_error_bound(p.n, p.k, p.erasure_prob)
    vacuous = raw >= 1.0
    return BoundReport(
        pr_error_bound=pr_err,
        delta_bound=min(raw, 1.0),
        rate_nats_per_use=p.lam * LN2 / p.channel_uses,
        hmin_term=p.k * math.log(p.b),
        hmax_term=hmax,
        feasible=not vacuous and pr_err < 1.0,
        delta_vacuous=vacuous,
        log_delta_first_term=log_first,
    )


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

THETA_RANGE = (0.0, 0.5)
DELTA_RANGE = (0.0, 5.0)
ROUNDS = 3
COARSE_POINTS = 10
REFINE_HALF_WIDTH = 10


@dataclass(frozen=True)
class OptimizeResult:
    report: BoundReport
    params: Optional[SchemeParams]
    budget: Optional[SecurityBudget]
    resolution: tuple[float, float, float]
    capacity: float

    @property
    def feasible(self) -> bool:
        return self.report.feasible

    @property
    def rate(self) -> float:
        return self.report.rate_nats_per_use


def _coarse(lo: float, hi: float) -> tuple[list[float], float]:
    step = (hi - lo) / COARSE_POINTS
    return [lo + i * step for i in range(1, COARSE_POINTS + 1)], step


def _refine(centre: float, step: float, lo: float, hi: float) -> tuple[list[float], float]:
    step /= 10.0
    pts = [centre + j * step for j in range(-REFINE_HALF_WIDTH, REFINE_HALF_WIDTH + 1)]
    return [x for x in pts if lo < x <= hi], step


def _max_lambda(k: int, b: int, n: int, s: float, eps: float, log_eps_prime: float,
                delta_target: float) -> float:
    """Largest real lam with Delta bound <= delta_target (may be negative)."""
    eps_prime = math.exp(log_eps_prime)
    if eps >= delta_target or not eps_prime < eps / 2:
        return -math.inf
    exponent, _ = _secrecy_exponent(k, b, n, 0, s, eps, eps_prime)
    return (2.0 * math.log(2.0 * (delta_target - eps)) - exponent) / LN2


def optimize(eta: float, E: float, pr_error_target: float = 1e-6,
             delta_target: float = 0.05) -> OptimizeResult:
    """Largest whole-bit message length meeting both targets.

    Grid search over (theta, delta, eps): a 10-point coarse grid per axis,
    then two refinements of 21 points per axis around the incumbent at a
    tenth of the previous spacing.  Ties go to larger lam, then smaller
    eps, theta, delta.
    """
    capacity = secrecy_capacity(eta, E)
    infeasible = OptimizeResult(
        BoundReport(1.0, 1.0, 0.0, 0.0, 0.0, False, True), None, None,
        (math.nan, math.nan, math.nan), capacity)
    if not (0 < pr_error_target < 1 and 0 < delta_target < 1):
        return infeasible
    if frame_target(eta, E) < 8:
        return infeasible
    b = frame_size(eta, E)
    base = SchemeParams(eta=eta, b=b, k=1, pulse_energy=b * E)
    n, alpha_sq = base.n, base.pulse_energy
    q = base.erasure_prob
    mu = base.eve_mean_photons

    def k_for(theta: float) -> int:
        k = code_dimension(n, q, theta)
        if k < 1 or pr_error_bound(n, k, q) > pr_error_target:
            return 0
        return k

    def log_eps_prime(delta: float) -> float:
        return _log_eps_prime(n, eta, alpha_sq, delta)

    thetas, dt = _coarse(*THETA_RANGE)
    deltas, dd = _coarse(*DELTA_RANGE)
    epss, de = _coarse(0.0, delta_target)
    best = None
    best_key = None
    for round_ in range(ROUNDS):
        if round_ > 0:
            if best is None:
                break
            thetas, dt = _refine(best[0], dt, *THETA_RANGE)
            deltas, dd = _refine(best[1], dd, *DELTA_RANGE)
            epss, de = _refine(best[2], de, 0.0, delta_target)
        ks = {theta: k_for(theta) for theta in thetas}
        leps = {delta: log_eps_prime(delta) for delta in deltas}
        for theta in thetas:
            k = ks[theta]
            if k == 0:
                continue
            for delta in deltas:
                s = (1.0 + delta) * mu
                for eps in epss:
                    lam_real = _max_lambda(k, b, n, s, eps, leps[delta], delta_target)
                    if lam_real < 1:
                        continue
                    lam = min(math.floor(lam_real), k * base.w)
                    key = (lam, lam_real, -eps, -theta, -delta)
                    if best_key is None or key > best_key:
                        best_key, best = key, (theta, delta, eps, k, lam)
        log.debug("round %d: best %s", round_, best)
    if best is None:
        return infeasible

    theta, delta, eps, k, lam = best
    params = SchemeParams(eta=eta, b=b, k=k, pulse_energy=alpha_sq, lam=lam)
    budget = SecurityBudget.derive(params, eps, delta, theta)
    report = delta_bound(params, budget)
    ok = report.pr_error_bound <= pr_error_target and report.delta_bound <= delta_target
    if not ok:
        raise ArithmeticError(
            f"optimizer output fails re-check: {report} for {params}, {budget}")
    return OptimizeResult(report, params, budget, (dt, dd, de), capacity)


def minimize_delta(p: SchemeParams, delta_target: float = 0.05) -> tuple[SecurityBudget, BoundReport]:
    """Budget (delta, eps) minimizing the Delta bound for fixed scheme parameters.

    Same coarse-to-fine grid as :func:`optimize`, restricted to delta and
    eps; ties go to smaller eps, then smaller delta.
    """
    deltas, dd = _coarse(*DELTA_RANGE)
    epss, de = _coarse(0.0, delta_target)
    best = None
    best_key = None

    def value(delta: float, eps: float) -> float:
        budget = SecurityBudget.derive(p, eps, delta)
        if not budget.admissible:
            return math.inf
        exponent, _ = _secrecy_exponent(
            p.k, p.b, p.n, p.lam, budget.photon_cutoff, eps, budget.eps_prime)
        return math.log(0.5) + 0.5 * exponent if exponent < 2 * LOG_CLAMP else math.inf

    for round_ in range(ROUNDS):
        if round_ > 0 and best is not None:
            deltas, dd = _refine(best[0], dd, *DELTA_RANGE)
            epss, de = _refine(best[1], de, 0.0, delta_target)
        for delta in deltas:
            for eps in epss:
                v = value(delta, eps)
                bound = clamped_exp(v) + eps if v < math.inf else math.inf
                key = (-bound, -eps, -delta)
                if best_key is None or key > best_key:
                    best_key, best = key, (delta, eps)
    delta, eps = best
    budget = SecurityBudget.derive(p, eps, delta)
    if not budget.admissible:
        # nothing on the grid is admissible; report the vacuous bound
        return budget, BoundReport(
            pr_error_bound(p.n, p.k, p.erasure_prob), 1.0,
            p.lam * LN2 / p.channel_uses, p.k * math.log(p.b), math.nan, False, True)
    return budget, delta_bound(p, budget)

"""Distribution of the received power sum P_K for Poisson base stations.

Conditioned on the distance R to the (K+1)-th nearest BS, the K nearest BSs
are uniform in the disk of radius R, so each R^alpha r^-alpha is Pareto with
shape 2/alpha and their sum has a known series CDF.  Averaging the series
over the law of R turns every power of R into an upper incomplete gamma
function and the support indicator into a Poisson-count term.
"""

import decimal
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .asymptotics import _sir_scale, check_alpha
from .errors import AccuracyWarning, DomainError, NumericalError, ParameterError
from .specfun import DEFAULT_CONFIG, gamma_fn, log_upper_inc_gamma

__all__ = [
    "PkDistribution",
    "CdfValue",
    "coeff_a",
    "pareto_sum_cdf",
    "pk_cdf",
    "pk_cdf_closed_form_k1",
    "eta_cdf",
    "eta_cdf_grid",
    "outage_pk",
]

DEFAULT_M_TERMS = 10
# the m-sum is extended up to this length when the last term stays above TAIL_WARN
DEFAULT_MAX_TERMS = 80
# once extended, keep going until the last term is this small
EXTEND_TOL = 1e-10
CLAMP_LIMIT = 1e-6
# relative accuracy of one series term (incomplete gamma ~2e-12, with margin);
# max_term * TERM_REL_ERR bounds the absolute error left after cancellation
TERM_REL_ERR = 1e-11
TAIL_WARN = 1e-6
OUTAGE_TOL = 1e-8
MAX_DOUBLINGS = 60
# sin(2 pi l / alpha) below this is an exact zero of the formula
_SIN_ZERO = 1e-14


# working precision (decimal digits) of the coefficient recursion; its
# partial sums cancel by tens of orders of magnitude at large j
_COEFF_DIGITS = 160


@lru_cache(maxsize=None)
def _coeff_row(i, alpha, m_terms):
    with decimal.localcontext() as ctx:
        ctx.prec = _COEFF_DIGITS
        alpha_d = decimal.Decimal(alpha)  # exact: every float is a dyadic rational
        a = [decimal.Decimal(1)]
        for j in range(1, m_terms + 1):
            acc = decimal.Decimal(0)
            for ell in range(1, j + 1):
                denom = math.factorial(ell) * (2 - ell * alpha_d)
                if denom == 0:
                    raise DomainError(f"2 - {ell}*alpha vanishes; alpha={alpha} must exceed 2")
                acc += (ell * (i + 1) - j) * 2 * a[j - ell] / denom
            a.append(acc / j)
        return tuple(float(v) for v in a)


def coeff_a(i, j, alpha):
    """Series coefficient A_{i,j} of the Pareto-sum CDF (memoized recursion)."""
    if i < 0 or j < 0:
        raise ValueError(f"indices must be nonnegative, got i={i}, j={j}")
    alpha = float(alpha)
    if not alpha > 2.0:
        raise DomainError(f"alpha must exceed 2, got {alpha}")
    return _coeff_row(int(i), alpha, int(j))[j]


def _log_binom(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _outer_factors(K, alpha):
    """(ell, log|prefactor|, sign) for the nonvanishing ell = 1..K."""
    g = gamma_fn(1.0 - 2.0 / alpha)
    out = []
    for ell in range(1, K + 1):
        s = math.sin(2.0 * math.pi * ell / alpha)
        if abs(s) < _SIN_ZERO:
            continue
        log_mag = _log_binom(K, ell) + ell * math.log(g) + math.log(abs(s)) - math.log(math.pi)
        sign = (-1.0) ** ell * math.copysign(1.0, s)
        out.append((ell, log_mag, sign))
    return out


@dataclass(frozen=True)
class CdfValue:
    """A CDF evaluation plus what is known about its error."""

    value: float
    last_term: float  # largest |term| at the truncation index m = m_terms
    max_term: float  # largest |term| in the sum, a cancellation indicator
    clamped: float = 0.0  # amount moved to land in [0, 1]
    m_used: int = 0  # truncation length actually used


def _clamp(total):
    if total < 0.0:
        if total < -CLAMP_LIMIT:
            raise NumericalError(f"CDF series evaluated to {total} < 0")
        return 0.0, -total
    if total > 1.0:
        if total > 1.0 + CLAMP_LIMIT:
            raise NumericalError(f"CDF series evaluated to {total} > 1")
        return 1.0, total - 1.0
    return total, 0.0


def pareto_sum_cdf(x, K, alpha, m_terms=DEFAULT_M_TERMS):
    """CDF at ``x`` of the sum of K i.i.d. Pareto variables with shape 2/alpha, scale 1.

    Zero below the support edge x = K.  Emits an ``AccuracyWarning`` when the
    last retained series term exceeds 1e-6 in magnitude.
    """
    alpha = check_alpha(alpha)
    x = float(x)
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if x < K:
        return 0.0
    terms = [1.0]
    last = 0.0
    log_x = math.log(x)
    for ell, log_pre, sign in _outer_factors(K, alpha):
        row = _coeff_row(K - ell, alpha, m_terms)
        for m in range(m_terms + 1):
            a = row[m]
            if a == 0.0:
                continue
            e = m + 2.0 * ell / alpha
            t = sign * math.copysign(1.0, a) * math.exp(
                log_pre + math.log(abs(a)) + math.lgamma(e) - e * log_x
            )
            terms.append(t)
            if m == m_terms:
                last = max(last, abs(t))
    if last > TAIL_WARN:
        warnings.warn(
            f"Pareto-sum series truncated at {m_terms} terms; last term {last:.2e}",
            AccuracyWarning,
            stacklevel=2,
        )
    value, _ = _clamp(math.fsum(terms))
    return value


@dataclass(frozen=True)
class PkDistribution:
    """CDF evaluator for P_K = L * sum_{k<=K} r_{0,k}^-alpha with PPP(lam_b) BSs.

    The m-sum is truncated at ``m_terms``.  For large K at low power the
    series converges slowly; if the last retained term exceeds 1e-6 the sum
    is extended by doubling, up to ``max_terms``, until the last term is below
    1e-10; an ``AccuracyWarning`` is issued if that still leaves it above 1e-6.  Set ``max_terms = m_terms``
    for a strictly fixed truncation.  The coefficient table is built once;
    evaluations are pure.
    """

    K: int
    lam_b: float
    alpha: float
    L: int = 1
    m_terms: int = DEFAULT_M_TERMS
    max_terms: int = DEFAULT_MAX_TERMS
    coeff_table: tuple = field(init=False, repr=False)
    _outer: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if not self.lam_b > 0:
            raise ParameterError(f"lam_b must be positive, got {self.lam_b}")
        if self.L < 1:
            raise ParameterError(f"L must be >= 1, got {self.L}")
        if self.m_terms < 0:
            raise ParameterError(f"m_terms must be >= 0, got {self.m_terms}")
        if self.max_terms < self.m_terms:
            object.__setattr__(self, "max_terms", self.m_terms)
        alpha = check_alpha(self.alpha)
        table = tuple(_coeff_row(i, alpha, self.max_terms) for i in range(self.K + 1))
        object.__setattr__(self, "coeff_table", table)
        object.__setattr__(self, "_outer", tuple(_outer_factors(self.K, alpha)))

    def _terms(self, y, M):
        K, alpha = self.K, float(self.alpha)
        log_lbpi = math.log(self.lam_b * math.pi)
        log_y = math.log(y)
        q = math.exp(log_lbpi + (2.0 / alpha) * (math.log(K) - log_y))
        log_q = math.log(q)

        # P(R_{K+1}^alpha y >= K): fewer than K+1 BSs inside radius (K/y)^(1/alpha)
        terms = [math.exp(-q + ell * log_q - math.lgamma(ell + 1)) for ell in range(K + 1)]
        last = 0.0
        log_kfact = math.lgamma(K + 1)
        for ell, log_pre, sign in self._outer:
            row = self.coeff_table[K - ell]
            for m in range(M + 1):
                a = row[m]
                if a == 0.0:
                    continue
                e = m + 2.0 * ell / alpha
                order = K - 0.5 * m * alpha - ell + 1.0
                log_mag = (
                    log_pre
                    + math.log(abs(a))
                    + math.lgamma(e)
                    - e * log_y
                    - log_kfact
                    + (0.5 * m * alpha + ell) * log_lbpi
                    + log_upper_inc_gamma(order, q, DEFAULT_CONFIG)
                )
                t = sign * math.copysign(math.exp(log_mag), a)
                terms.append(t)
                if m == M:
                    last = max(last, abs(t))
        return terms, last

    def evaluate_sum(self, y):
        """P(sum_{k<=K} r_{0,k}^-alpha <= y) with error indicators."""
        y = float(y)
        if y <= 0.0:
            return CdfValue(0.0, 0.0, 0.0)
        if math.isinf(y):
            return CdfValue(1.0, 0.0, 0.0)
        K, M = self.K, self.m_terms
        terms, last = self._terms(y, M)
        tol = TAIL_WARN
        while last > tol and M < self.max_terms:
            tol = EXTEND_TOL
            M = min(max(2 * M, 1), self.max_terms)
            terms, last = self._terms(y, M)
        if last > TAIL_WARN:
            warnings.warn(
                f"P_K series at y={y:.4g} truncated at {M} terms; last term {last:.2e}",
                AccuracyWarning,
                stacklevel=3,
            )
        biggest = max(abs(t) for t in terms)
        why = None
        if biggest * TERM_REL_ERR > CLAMP_LIMIT:
            why = f"error bound {biggest * TERM_REL_ERR:.1e} exceeds {CLAMP_LIMIT:.0e}"
        else:
            try:
                value, clamped = _clamp(math.fsum(terms))
            except NumericalError as exc:
                why = str(exc)
        if why is not None:
            raise NumericalError(
                f"{why} at y={y:.4g} (K={K}); largest term {biggest:.2e}, so cancellation "
                "leaves no significant digits this deep in the lower tail"
            )
        return CdfValue(value, last, biggest, clamped, M)

    def evaluate(self, x):
        """P(P_K <= x) with error indicators."""
        return self.evaluate_sum(float(x) / self.L)

    def sum_cdf(self, y):
        return self.evaluate_sum(y).value

    def cdf(self, x):
        return self.evaluate(x).value

    def cdf_grid(self, xs):
        """CDF on an increasing grid; a decrease beyond 1e-6 is a numerical failure."""
        xs = np.asarray(xs, dtype=float)
        vals = np.array([self.cdf(x) for x in xs])
        order = np.argsort(xs, kind="stable")
        drops = np.diff(vals[order])
        if drops.size and drops.min() < -CLAMP_LIMIT:
            raise NumericalError(f"CDF decreased by {-drops.min():.3e} on the evaluation grid")
        return vals


def pk_cdf(x, dist):
    """P(P_K <= x) for the Poisson-BS model described by ``dist``."""
    return dist.cdf(x)


def pk_cdf_closed_form_k1(x, lam_b, alpha, L=1):
    """Single-BS CDF exp(-lam_b pi (L/x)^(2/alpha)); reference for K=1."""
    x = np.asarray(x, dtype=float)
    return np.exp(-lam_b * math.pi * (L / x) ** (2.0 / alpha))


def _power_threshold(tau, K, L, alpha, lam):
    """Received power needed for asymptotic spectral efficiency ``tau``."""
    return math.expm1(tau * math.log(2.0)) / _sir_scale(K, L, alpha, lam)


def eta_cdf(tau, dist, lam):
    """P(eta_asym <= tau) when P_K follows ``dist`` and mobiles have density ``lam``."""
    tau = float(tau)
    if tau < 0.0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return 0.0
    try:
        x = _power_threshold(tau, dist.K, dist.L, dist.alpha, lam)
    except OverflowError:
        return 1.0
    return dist.cdf(x)


def eta_cdf_grid(taus, dist, lam):
    taus = np.asarray(taus, dtype=float)
    vals = np.array([eta_cdf(t, dist, lam) for t in taus])
    drops = np.diff(vals[np.argsort(taus, kind="stable")])
    if drops.size and drops.min() < -CLAMP_LIMIT:
        raise NumericalError(f"eta CDF decreased by {-drops.min():.3e}")
    return vals


def outage_pk(p_o, dist):
    """Received power exceeded with probability 1 - p_o (CDF inverse by bisection)."""
    p_o = float(p_o)
    if not 0.0 < p_o < 1.0:
        raise DomainError(f"p_o must lie in (0, 1), got {p_o}")
    # typical scale: L * (K-th nearest distance)^-alpha at unit arrival time
    x0 = dist.L * (dist.lam_b * math.pi) ** (0.5 * dist.alpha)
    lo = hi = x0
    for _ in range(MAX_DOUBLINGS + 1):
        if dist.cdf(hi) >= p_o:
            break
        hi *= 2.0
    else:
        raise NumericalError(f"could not bracket outage quantile {p_o} from above")
    for _ in range(MAX_DOUBLINGS + 1):
        if dist.cdf(lo) <= p_o:
            break
        lo *= 0.5
    else:
        raise NumericalError(f"could not bracket outage quantile {p_o} from below")

    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(200):
        mid = 0.5 * (log_lo + log_hi)
        f = dist.cdf(math.exp(mid))
        if abs(f - p_o) <= OUTAGE_TOL:
            return math.exp(mid)
        if f < p_o:
            log_lo = mid
        else:
            log_hi = mid
        if log_hi - log_lo < 1e-15:
            break
    x = math.exp(0.5 * (log_lo + log_hi))
    if abs(dist.cdf(x) - p_o) > OUTAGE_TOL:
        raise NumericalError(f"outage inversion stalled at p_o={p_o}")
    return x

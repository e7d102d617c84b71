"""Network design: rate density, optimal active-mobile density, and the two
constrained comparisons of cluster size against antennas per BS.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import check_alpha, eta_asym, sigma2_asym
from .errors import NumericalError, ParameterError
from .geometry import sample_pk
from .pk_dist import PkDistribution, outage_pk
from .specfun import lambert_w0

__all__ = [
    "Constraint",
    "DesignScenario",
    "SplitReport",
    "Comparison",
    "rate_density",
    "lambert_density_factor",
    "optimal_sir",
    "optimal_density",
    "compare_fixed_coop_antennas",
    "compare_fixed_antenna_density",
]

_QUANTILES = np.linspace(0.01, 0.99, 99)


class Constraint(str, enum.Enum):
    FIXED_COOP_ANTENNAS = "FixedCoopAntennas"
    FIXED_ANTENNA_DENSITY = "FixedAntennaDensity"


@dataclass(frozen=True)
class DesignScenario:
    p_o: float
    pk_out: float
    K: int
    L: int
    alpha: float
    lam_b: float
    constraint: Constraint = Constraint.FIXED_COOP_ANTENNAS

    def __post_init__(self):
        object.__setattr__(self, "constraint", Constraint(self.constraint))
        if not 0.0 < self.p_o < 1.0:
            raise ParameterError(f"p_o must lie in (0, 1), got {self.p_o}")
        if not self.pk_out > 0:
            raise ParameterError(f"pk_out must be positive, got {self.pk_out}")

    @property
    def lam_a(self):
        return self.lam_b * self.L

    def optimal_density(self):
        return optimal_density(self.pk_out, self.K, self.L, self.alpha)


def rate_density(lam, pk_out, K, L, alpha):
    """Spectral efficiency per unit area at outage power ``pk_out``.

    The SIR term carries lam^(-alpha/2), so this vanishes at both ends of
    the density axis.
    """
    if not lam > 0:
        raise ParameterError(f"lam must be positive, got {lam}")
    if not pk_out > 0:
        raise ParameterError(f"pk_out must be positive, got {pk_out}")
    return lam * eta_asym(pk_out, K, L, alpha, lam)


def lambert_density_factor(alpha):
    """[-2W / (2W + alpha)]^(2/alpha) with W = W0(-(alpha/2) exp(-alpha/2))."""
    alpha = check_alpha(alpha)
    w = lambert_w0(-0.5 * alpha * math.exp(-0.5 * alpha))
    return (-2.0 * w / (2.0 * w + alpha)) ** (2.0 / alpha)


def optimal_sir(alpha):
    """Asymptotic SIR at the rate-density optimum; depends only on alpha.

    Solves (2/alpha) ln(1 + s) = s / (1 + s), i.e. s = -(alpha + 2W) / (2W).
    """
    alpha = check_alpha(alpha)
    w = lambert_w0(-0.5 * alpha * math.exp(-0.5 * alpha))
    return -(alpha + 2.0 * w) / (2.0 * w)


def optimal_density(pk_out, K, L, alpha):
    """Active-mobile density maximizing ``rate_density``.

    lam* = lambert_density_factor(alpha) * alpha sin(2 pi/alpha) / (2 pi^2)
           * (pk_out (K L)^(alpha/2 - 1))^(2/alpha)

    The middle factor is the density-free part of the limit constant raised
    to 2/alpha; without it lam* would not be a stationary point of the rate
    density.
    """
    alpha = check_alpha(alpha)
    if not pk_out > 0:
        raise ParameterError(f"pk_out must be positive, got {pk_out}")
    geom = alpha * math.sin(2.0 * math.pi / alpha) / (2.0 * math.pi ** 2)
    scale = math.exp((2.0 / alpha) * (math.log(pk_out) + (0.5 * alpha - 1.0) * math.log(K * L)))
    lam = lambert_density_factor(alpha) * geom * scale
    if not (math.isfinite(lam) and lam > 0.0):
        raise NumericalError(f"optimal density evaluated to {lam}")
    return lam


@dataclass(frozen=True)
class SplitReport:
    K: int
    L: int
    lam_b: float
    sigma2: float
    median_eta: float  # from sampled P_K
    median_eta_analytic: float  # from the inverted P_K CDF, nan if skipped
    eta_quantiles: tuple  # eta at probabilities 0.01, 0.02, ..., 0.99
    n_draws: int


@dataclass(frozen=True)
class Comparison:
    constraint: Constraint
    ranked: tuple  # SplitReport, best median first

    def __len__(self):
        return len(self.ranked)

    @property
    def order(self):
        return [(r.K, r.L, r.lam_b) for r in self.ranked]

    @property
    def favors_fewer_bs(self):
        ks = [r.K for r in self.ranked]
        return ks == sorted(ks)

    @property
    def favors_more_bs(self):
        ks = [r.K for r in self.ranked]
        return ks == sorted(ks, reverse=True)


def _report(K, L, lam_b, alpha, lam, n_draws, seed, analytic):
    rng = np.random.default_rng(seed)
    pk = sample_pk(K, L, alpha, lam_b, n_draws, rng)
    eta = eta_asym(pk, K, L, alpha, lam)
    med_a = float("nan")
    if analytic:
        med_a = eta_asym(outage_pk(0.5, PkDistribution(K, lam_b, alpha, L)), K, L, alpha, lam)
    return SplitReport(
        K=K,
        L=L,
        lam_b=lam_b,
        sigma2=sigma2_asym(K, L, alpha, lam),
        median_eta=float(np.median(eta)),
        median_eta_analytic=med_a,
        eta_quantiles=tuple(np.quantile(eta, _QUANTILES)),
        n_draws=n_draws,
    )


def _rank(constraint, reports):
    s0 = reports[0].sigma2
    for r in reports:
        if abs(r.sigma2 - s0) > 1e-12 * s0:
            raise NumericalError("interference power differs across splits with equal K*L")
    ranked = sorted(reports, key=lambda r: r.median_eta, reverse=True)
    return Comparison(constraint=constraint, ranked=tuple(ranked))


def compare_fixed_coop_antennas(
    N, lam_b, alpha, lam, candidate_splits, n_draws=10_000, seed=0, analytic=True
):
    """Rank (K, L) splits of N cooperating antennas at fixed BS density.

    Every split sees the same asymptotic interference power, so the ranking is
    decided by the distribution of P_K alone.  Draws reuse ``seed`` across
    splits (common random numbers).
    """
    splits = [(int(K), int(L)) for K, L in candidate_splits]
    if not splits:
        raise ParameterError("no candidate splits")
    for K, L in splits:
        if K * L != N:
            raise ParameterError(f"split (K={K}, L={L}) does not give K*L={N}")
    reports = [_report(K, L, lam_b, alpha, lam, n_draws, seed, analytic) for K, L in splits]
    return _rank(Constraint.FIXED_COOP_ANTENNAS, reports)


def compare_fixed_antenna_density(
    N, lam_a, alpha, lam, candidate_splits, n_draws=10_000, seed=0, analytic=True
):
    """Rank (K, L, lam_b) splits with K*L = N and lam_b*L = lam_a both fixed."""
    splits = [(int(K), int(L), float(lb)) for K, L, lb in candidate_splits]
    if not splits:
        raise ParameterError("no candidate splits")
    for K, L, lb in splits:
        if K * L != N:
            raise ParameterError(f"split (K={K}, L={L}) does not give K*L={N}")
        if abs(lb * L - lam_a) > 1e-12 * lam_a:
            raise ParameterError(f"split (L={L}, lam_b={lb}) does not give lam_b*L={lam_a}")
    reports = [_report(K, L, lb, alpha, lam, n_draws, seed, analytic) for K, L, lb in splits]
    return _rank(Constraint.FIXED_ANTENNA_DENSITY, reports)

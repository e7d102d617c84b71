"""Closed-form large-antenna limits for the cooperative MMSE uplink.

Notation used throughout:

* ``alpha`` path-loss exponent (> 2), ``lam`` mobile density, ``lam_b`` BS density
* ``K`` cooperating base stations with ``L`` antennas each
* ``p_k`` total average received power L * sum_k r_{0,k}^-alpha

The central constant is

    c(alpha, lam) = [alpha * sin(2 pi / alpha) / (2 pi^2 lam)] ** (alpha / 2)

and the asymptotic SIR is p_k * c * (K L)^(alpha/2 - 1).  Products of powers
are formed in log space so extreme densities do not overflow.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "AsymptoticConstants",
    "check_alpha",
    "limit_constant",
    "log_limit_constant",
    "sir_asym",
    "eta_asym",
    "sigma2_asym",
    "s_hat_k",
    "sir_asym_unit_density",
    "sir_asym_antenna_density",
    "eta_asym_linearized",
    "asymptotic_constants",
]

ALPHA_WARN_ABOVE = 8.0


def check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 2.0:
        raise DomainError(f"path-loss exponent must exceed 2, got alpha={alpha}")
    if alpha > ALPHA_WARN_ABOVE:
        warnings.warn(
            f"alpha={alpha} is outside the usual (2, 8] range", RuntimeWarning, stacklevel=3
        )
    return alpha


def _check_positive(name, value):
    value = float(value)
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def log_limit_constant(alpha, lam):
    """Natural log of the large-antenna limit constant."""
    alpha = check_alpha(alpha)
    lam = _check_positive("lam", lam)
    base = alpha * math.sin(2.0 * math.pi / alpha) / (2.0 * math.pi ** 2)
    return 0.5 * alpha * (math.log(base) - math.log(lam))


def limit_constant(alpha, lam):
    """[alpha sin(2 pi/alpha) / (2 pi^2 lam)]^(alpha/2).

    The normalized SIR ``SIR / ((K L)^(alpha/2-1) P_K)`` converges to this
    value as the number of antennas per BS grows.
    """
    return math.exp(log_limit_constant(alpha, lam))


def _sir_scale(K, L, alpha, lam):
    return math.exp(log_limit_constant(alpha, lam) + (0.5 * alpha - 1.0) * math.log(K * L))


def _scalar_or_array(out):
    return float(out) if out.ndim == 0 else out


def sir_asym(p_k, K, L, alpha, lam):
    """Asymptotic SIR, p_k * c(alpha, lam) * (K L)^(alpha/2 - 1).

    ``p_k`` may be a scalar or an array of received powers.
    """
    p = np.asarray(p_k, dtype=float)
    if np.any(p < 0.0):
        raise DomainError("p_k must be nonnegative")
    return _scalar_or_array(p * _sir_scale(K, L, alpha, lam))


def eta_asym(p_k, K, L, alpha, lam):
    """Asymptotic spectral efficiency log2(1 + SIR_asym) in bits/s/Hz."""
    return _scalar_or_array(np.log2(1.0 + np.asarray(sir_asym(p_k, K, L, alpha, lam))))


def sigma2_asym(K, L, alpha, lam):
    """Asymptotic interference power; depends on K and L only through K*L."""
    alpha = check_alpha(alpha)
    return math.exp(-log_limit_constant(alpha, lam) + (1.0 - 0.5 * alpha) * math.log(K * L))


def s_hat_k(r0, lam_b, K, L, alpha):
    """Mean received power from the K nearest BSs after rescaling to unit BS density.

    ``L`` does not enter the value; it is accepted so the signature matches the
    other power helpers.
    """
    r0 = np.asarray(r0, dtype=float)
    if r0.shape != (K,):
        raise ValueError(f"expected {K} distances, got shape {r0.shape}")
    if np.any(r0 <= 0.0):
        raise SingularityError("zero or negative BS distance")
    scaled = r0 * math.sqrt(lam_b)
    return float(np.mean(scaled ** (-float(alpha))))


def sir_asym_unit_density(s_hat, K, L, alpha, lam, lam_b):
    """Asymptotic SIR written through the unit-density power ``s_hat``.

    Equal to ``sir_asym`` with p_k = s_hat * lam_b^(alpha/2) * K * L; only the
    ratio lam_b / lam matters.
    """
    return math.exp(
        math.log(s_hat) + log_limit_constant(alpha, lam / lam_b) + 0.5 * alpha * math.log(K * L)
    )


def sir_asym_antenna_density(s_hat, K, alpha, lam, lam_a):
    """Asymptotic SIR for antenna density lam_a = lam_b * L held fixed."""
    return math.exp(
        log_limit_constant(alpha, lam)
        + 0.5 * alpha * math.log(lam_a)
        + (0.5 * alpha - 1.0) * math.log(K)
        + math.log(K * s_hat)
    )


def eta_asym_linearized(p_k, K, L, alpha, lam):
    """High-SIR expansion of eta_asym, linear in log2 of each factor."""
    p_k = float(p_k)
    if not p_k > 0.0:
        raise DomainError(f"p_k must be positive, got {p_k}")
    return (
        (0.5 * alpha - 1.0) * math.log2(K * L)
        + math.log2(p_k)
        + log_limit_constant(alpha, lam) / math.log(2.0)
    )


@dataclass(frozen=True)
class AsymptoticConstants:
    alpha: float
    lam: float
    K: int
    L: int
    c_limit: float
    sigma2: float

    def sir(self, p_k):
        return p_k / self.sigma2

    def eta(self, p_k):
        return math.log2(1.0 + self.sir(p_k))


def asymptotic_constants(K, L, alpha, lam):
    return AsymptoticConstants(
        alpha=float(alpha),
        lam=float(lam),
        K=int(K),
        L=int(L),
        c_limit=limit_constant(alpha, lam),
        sigma2=sigma2_asym(K, L, alpha, lam),
    )

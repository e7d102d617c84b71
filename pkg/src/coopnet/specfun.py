"""Special functions: gamma, upper incomplete gamma at any real order, Lambert W.

The upper incomplete gamma function is needed at orders that go negative
(and hit nonpositive integers when the path-loss exponent is rational), so
the routines here work with the scaled quantity

    G(s, x) = Gamma(s, x) * x**(-s) * exp(x)

which obeys the overflow-free downward recurrence G(s) = (x*G(s+1) - 1) / s.
"""

import math
import warnings
from dataclasses import dataclass

from scipy.special import zeta

from .errors import DomainError, NumericalError, PrecisionLossWarning

__all__ = [
    "SpecFunConfig",
    "gamma_fn",
    "upper_inc_gamma",
    "log_upper_inc_gamma",
    "lambert_w0",
]

_EULER_GAMMA = 0.57721566490153286061
_INV_E = math.exp(-1.0)
_TINY = 1e-300
# switch from series/recurrence to the continued fraction at this x
_CF_THRESHOLD = 1.0
# Taylor coefficients (-1)^k zeta(k) / k of log Gamma(1 + s), k >= 2
_LGAMMA1P_COEFFS = tuple((-1) ** k * float(zeta(k)) / k for k in range(2, 70))


@dataclass(frozen=True)
class SpecFunConfig:
    """Termination controls for the series and continued fractions."""

    rel_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise ValueError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")
        if self.max_iter < 50:
            raise ValueError(f"max_iter must be >= 50, got {self.max_iter}")


DEFAULT_CONFIG = SpecFunConfig()


def _is_nonpositive_integer(s):
    return s <= 0 and float(s).is_integer()


def gamma_fn(s):
    """Complete gamma function for real ``s`` off the poles."""
    s = float(s)
    if _is_nonpositive_integer(s):
        raise DomainError(f"gamma has a pole at s={s}")
    return math.gamma(s)


def _lower_series_scaled(s, x, cfg):
    # gamma(s, x) * x**(-s) * exp(x) = sum_k x**k / (s (s+1) ... (s+k)), s > 0
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(cfg.max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * cfg.rel_tol:
            return total
    raise NumericalError(f"lower incomplete gamma series did not converge (s={s}, x={x})")


def _cf_scaled(s, x, cfg):
    # Legendre continued fraction, modified Lentz; valid for every real s when x > 0
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, cfg.max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < cfg.rel_tol:
            return h
    raise NumericalError(f"incomplete gamma continued fraction did not converge (s={s}, x={x})")


def _exp1(x, cfg):
    # E1(x) = Gamma(0, x); power series, used only for x < _CF_THRESHOLD
    total = -_EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, cfg.max_iter + 1):
        term *= -x / k
        contrib = -term / k
        total += contrib
        if abs(contrib) < abs(total) * cfg.rel_tol:
            return total
    raise NumericalError(f"E1 series did not converge (x={x})")


def _log_upper_series(s, x, cfg):
    # log(Gamma(s) - gamma(s, x)) for s >= 1, x < s + 1, where the lower part is below ~0.7 Gamma(s)
    log_p = s * math.log(x) - x - math.lgamma(s) + math.log(_lower_series_scaled(s, x, cfg))
    return math.lgamma(s) + math.log1p(-math.exp(log_p))


def _lgamma1p(s):
    """log Gamma(1 + s) without forming 1 + s, accurate for tiny s."""
    if s >= 0.5:
        return math.lgamma(1.0 + s)
    total = -_EULER_GAMMA * s
    p = s
    for c in _LGAMMA1P_COEFFS:
        p *= s
        term = c * p
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def _upper_small_order(s, x, cfg):
    # Gamma(s, x) for |s| < 1 off zero and x < 1, where Gamma(s) - gamma(s, x) cancels
    # as s -> 0:  (Gamma(1+s) - x^s)/s - x^s sum_{k>=1} (-x)^k / (k! (s+k))
    if s == 0.0:
        return _exp1(x, cfg)
    head = (math.expm1(_lgamma1p(s)) - math.expm1(s * math.log(x))) / s
    total = 0.0
    term = 1.0
    for k in range(1, cfg.max_iter + 1):
        term *= -x / k
        contrib = term / (s + k)
        total += contrib
        if abs(contrib) < cfg.rel_tol * 1e-3:
            return head - math.exp(s * math.log(x)) * total
    raise NumericalError(f"small-order incomplete gamma series did not converge (s={s}, x={x})")


# relative error growth through the downward recurrence beyond which the
# result no longer meets the 1e-10 accuracy target
_MAX_AMPLIFICATION = 1e5


def _upper_scaled(s, x, cfg):
    """Return G(s, x) and a flag telling whether cancellation destroyed it."""
    if x >= _CF_THRESHOLD and (s < 1.0 or x >= s + 1.0):
        return _cf_scaled(s, x, cfg), False
    if s > 0:
        if x >= s + 1.0:
            return _cf_scaled(s, x, cfg), False
        if s < 1.0:
            return _upper_small_order(s, x, cfg) * math.exp(x - s * math.log(x)), False
        return math.exp(_log_upper_series(s, x, cfg) - s * math.log(x) + x), False

    # s <= 0: anchor at s0 in [-1/2, 1/2] so that no divisor below comes near zero
    steps = int(round(-s))
    s0 = s + steps
    if x < 1.0:
        g = _upper_small_order(s0, x, cfg) * math.exp(x - s0 * math.log(x))
    else:
        g = _cf_scaled(s0, x, cfg)
    amp = 1.0
    for i in range(1, steps + 1):
        numer = x * g - 1.0
        if numer == 0.0:
            return 0.0, True
        amp *= max(1.0, abs(x * g / numer))
        g = numer / (s0 - i)
    return g, amp > _MAX_AMPLIFICATION


def log_upper_inc_gamma(s, x, config=DEFAULT_CONFIG):
    """Natural log of Gamma(s, x) for real ``s`` and ``x > 0``.

    Gamma(s, x) is strictly positive for x > 0, so the log is always defined.
    Use this when the value itself would overflow.
    """
    s = float(s)
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"upper incomplete gamma needs x > 0, got x={x}")
    if s >= 1.0 and x < s + 1.0:
        return _log_upper_series(s, x, config)
    if 0.0 < s < 1.0 and x < _CF_THRESHOLD:
        return math.log(_upper_small_order(s, x, config))
    if -0.5 <= s <= 0.0 and x < _CF_THRESHOLD:
        return math.log(_upper_small_order(s, x, config))
    g, lost = _upper_scaled(s, x, config)
    if lost or not g > 0.0:
        warnings.warn(
            f"upper_inc_gamma({s}, {x}): downward recurrence lost precision",
            PrecisionLossWarning,
            stacklevel=2,
        )
        if not g > 0.0:
            raise NumericalError(f"upper_inc_gamma({s}, {x}) evaluated to {g}")
    return math.log(g) + s * math.log(x) - x


def upper_inc_gamma(s, x, config=DEFAULT_CONFIG):
    """Upper incomplete gamma function Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt.

    Parameters
    ----------
    s : float
        Order. Any real value, including negative and nonpositive integers.
    x : float
        Lower integration limit, strictly positive.
    config : SpecFunConfig, optional

    Returns
    -------
    float
        Gamma(s, x). Overflows to ``inf`` only if the true value does.
    """
    return math.exp(log_upper_inc_gamma(s, x, config))


def _halley(w, z, cfg):
    prev = math.inf
    for _ in range(cfg.max_iter):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            return w
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        # near the branch point the steps bottom out at rounding noise
        if abs(step) <= 4e-16 * (1.0 + abs(w_new)) or abs(step) >= prev:
            return w_new
        prev = abs(step)
        w = w_new
    raise NumericalError(f"Halley iteration for W0({z}) did not converge")


def lambert_w0(z, config=DEFAULT_CONFIG):
    """Principal branch of the Lambert W function for real ``z >= -1/e``.

    Returns ``w >= -1`` with ``w * exp(w) == z``.
    """
    z = float(z)
    if z < -_INV_E:
        # tolerate the rounding of -1/e itself
        if z < -_INV_E * (1.0 + 1e-15):
            raise DomainError(f"W0 is real only for z >= -1/e, got z={z}")
        z = -_INV_E
    if z == 0.0:
        return 0.0
    if z == -_INV_E:
        return -1.0

    if z < -0.25:
        # branch-point expansion in p = sqrt(2 (e z + 1))
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif z < 3.0:
        w = math.log1p(z) * (1.0 - math.log1p(math.log1p(z)) / (2.0 + math.log1p(z)))
    else:
        lz = math.log(z)
        w = lz - math.log(lz)
    return _halley(w, z, config)

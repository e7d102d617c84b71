import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopnet.asymptotics import (
    asymptotic_constants,
    eta_asym,
    eta_asym_linearized,
    limit_constant,
    s_hat_k,
    sigma2_asym,
    sir_asym,
    sir_asym_antenna_density,
    sir_asym_unit_density,
)
from coopnet.errors import DomainError, SingularityError
from coopnet.geometry import received_power_sum
from coopnet.hex_model import hex_pk

C4 = 4.0 / math.pi ** 4  # limit constant at alpha = 4, lam = 1

alphas = st.floats(2.05, 8.0)
dens = st.floats(1e-3, 1e3)
ks = st.integers(1, 64)
ls = st.integers(1, 256)


def test_limit_constant_values():
    assert limit_constant(4, 1) == pytest.approx(C4, rel=1e-14)
    assert limit_constant(4, 1) == pytest.approx(0.0410639, abs=1e-7)
    assert limit_constant(4, 0.1) == pytest.approx(100 * C4, rel=1e-13)
    assert limit_constant(4, 1) / limit_constant(4, 4) == pytest.approx(16.0, rel=1e-13)


@pytest.mark.parametrize("alpha", [2.0, 1.5, -3.0])
def test_alpha_domain(alpha):
    with pytest.raises(DomainError):
        limit_constant(alpha, 1.0)


def test_alpha_above_eight_warns():
    with pytest.warns(RuntimeWarning):
        limit_constant(9.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        limit_constant(8.0, 1.0)


def test_sir_and_eta_examples():
    assert sir_asym(1, 1, 1, 4, 1) == pytest.approx(C4, rel=1e-14)
    assert sir_asym(1, 2, 64, 4, 1) == pytest.approx(128 * C4, rel=1e-13)
    assert sir_asym(1, 2, 64, 4, 1) == pytest.approx(5.256183, abs=1e-6)
    assert eta_asym(1, 2, 64, 4, 1) == pytest.approx(math.log2(1 + 128 * C4), rel=1e-14)
    assert eta_asym(1, 2, 64, 4, 1) == pytest.approx(2.645283, abs=1e-6)
    # sir_asym = 1 gives one bit; p_k = 0 gives zero
    assert eta_asym(1 / C4, 1, 1, 4, 1) == pytest.approx(1.0, rel=1e-14)
    assert eta_asym(0.0, 1, 1, 4, 1) == 0.0


def test_sir_accepts_arrays():
    p = np.array([0.5, 1.0, 2.0])
    out = sir_asym(p, 2, 8, 4, 1)
    assert out.shape == (3,)
    np.testing.assert_allclose(out, p * C4 * 16 ** 1.0, rtol=1e-14)


def test_sigma2_examples():
    assert sigma2_asym(1, 1, 4, 1) == pytest.approx(math.pi ** 4 / 4, rel=1e-14)
    assert sigma2_asym(1, 1, 4, 1) == pytest.approx(24.35227, abs=1e-5)
    assert sigma2_asym(2, 8, 4, 1) / sigma2_asym(2, 32, 4, 1) == pytest.approx(4.0, rel=1e-13)
    assert sigma2_asym(2, 3, 4.3, 0.7) == sigma2_asym(3, 2, 4.3, 0.7)


@given(st.floats(1e-6, 1e6), ks, ls, alphas, dens)
def test_sir_is_pk_over_sigma2(p, K, L, alpha, lam):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert sir_asym(p, K, L, alpha, lam) == pytest.approx(p / sigma2_asym(K, L, alpha, lam), rel=1e-12)
        c = asymptotic_constants(K, L, alpha, lam)
        assert c.sir(p) * c.sigma2 == pytest.approx(p, rel=1e-12)
        assert c.sigma2 == pytest.approx((K * L) ** (1 - alpha / 2) / c.c_limit, rel=1e-12)


@given(st.integers(1, 40), st.integers(1, 40), alphas, dens)
def test_sigma2_depends_on_product_only(a, b, alpha, lam):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert sigma2_asym(a, b, alpha, lam) == sigma2_asym(b, a, alpha, lam)
        if a % 2 == 0:
            assert sigma2_asym(a // 2, 2 * b, alpha, lam) == pytest.approx(
                sigma2_asym(a, b, alpha, lam), rel=1e-12
            )


@given(alphas, dens, st.floats(0.1, 10))
def test_density_scaling(alpha, lam, f):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ratio = limit_constant(alpha, lam) / limit_constant(alpha, lam * f)
        assert ratio == pytest.approx(f ** (alpha / 2), rel=1e-12)


def test_s_hat_examples(rng):
    assert s_hat_k([1.0], 1.0, 1, 1, 4) == pytest.approx(1.0)
    with pytest.raises(SingularityError):
        s_hat_k([0.0, 1.0], 1.0, 2, 1, 4)
    with pytest.raises(ValueError):
        s_hat_k([1.0, 2.0], 1.0, 3, 1, 4)
    for _ in range(50):
        K = int(rng.integers(1, 10))
        L = int(rng.integers(1, 100))
        alpha = rng.uniform(2.1, 6)
        lb = rng.uniform(0.01, 5)
        r0 = np.sort(rng.uniform(0.05, 5, K))
        s = s_hat_k(r0, lb, K, L, alpha)
        assert s * lb ** (alpha / 2) * K * L == pytest.approx(received_power_sum(r0, L, alpha), rel=1e-12)


@given(ks, ls, st.floats(2.05, 7.5), dens, st.floats(1e-3, 10), st.floats(1e-3, 100))
def test_unit_density_form_matches(K, L, alpha, lam, lam_b, s_hat):
    # both algebraic forms of the asymptotic SIR, plus the antenna-density form
    p_k = s_hat * lam_b ** (alpha / 2) * K * L
    ref = sir_asym(p_k, K, L, alpha, lam)
    assert sir_asym_unit_density(s_hat, K, L, alpha, lam, lam_b) == pytest.approx(ref, rel=1e-12)
    assert sir_asym_antenna_density(s_hat, K, alpha, lam, lam_b * L) == pytest.approx(ref, rel=1e-12)


@given(st.integers(1, 16), st.integers(1, 128), st.floats(2.2, 6), st.floats(0.01, 100), st.floats(0.1, 10))
def test_constant_sir_provisioning(K, L, alpha, lam, f):
    # lam_b L K^(1-2/alpha) / lam fixed => same SIR for a fixed unit-density power
    s_hat = 0.7
    lam_b = 0.1
    base = sir_asym_unit_density(s_hat, K, L, alpha, lam, lam_b)
    assert sir_asym_unit_density(s_hat, K, L, alpha, lam * f, lam_b * f) == pytest.approx(base, rel=1e-12)


def test_linearized_form():
    assert eta_asym_linearized(1, 1, 1, 4, 1) == pytest.approx(math.log2(C4), rel=1e-14)
    with pytest.raises(DomainError):
        eta_asym_linearized(0.0, 1, 1, 4, 1)
    for p in (10.0, 1e3, 1e5):
        K, L = 4, 64
        if sir_asym(p, K, L, 4, 1) > 1e3:
            assert abs(eta_asym(p, K, L, 4, 1) - eta_asym_linearized(p, K, L, 4, 1)) < 0.0015


def test_linearized_slope_in_alpha():
    # hexagonal cell-edge P_K, K=3, L=50: eta nearly linear in alpha on [3.5, 5]
    alphas = np.linspace(3.5, 5.0, 7)
    etas = np.array([eta_asym_linearized(hex_pk(3, 50, 0.1, a), 3, 50, a, 1.0) for a in alphas])
    fit = np.polyval(np.polyfit(alphas, etas, 1), alphas)
    assert np.max(np.abs(fit - etas) / etas) < 0.05
    r2 = 1 - np.sum((etas - fit) ** 2) / np.sum((etas - etas.mean()) ** 2)
    assert r2 > 0.99

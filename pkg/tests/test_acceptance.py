"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``CRITERION n ... PASS|FAIL`` line (visible under
``pytest -v``) before asserting.  Criteria 1 and 7 run the full Monte Carlo
at desk scale and take a few minutes together.
"""

import math

import numpy as np
import pytest

from coopnet.asymptotics import (
    eta_asym,
    limit_constant,
    s_hat_k,
    sigma2_asym,
    sir_asym,
    sir_asym_unit_density,
)
from coopnet.channel_mc import channel_from_fades, mf_sir, mmse_sir, run_realizations, standard_complex_normal
from coopnet.design_opt import (
    compare_fixed_antenna_density,
    compare_fixed_coop_antennas,
    optimal_density,
    rate_density,
)
from coopnet.geometry import (
    NetworkParams,
    build_topology,
    hex_cell_edge_length,
    hex_grid_cell_edge,
    received_power_sum,
    sample_nearest_distances,
    sample_pk,
)
from coopnet.hex_model import cell_edge_eta, hex_pk
from coopnet.pk_dist import PkDistribution, eta_cdf_grid, pk_cdf_closed_form_k1

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail=""):
        with capsys.disabled():
            print(f"\nCRITERION {label}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _report


def test_criterion_1_sir_convergence(report):
    alpha, lam, lam_b, n_real = 4.0, 1.0, 0.1, 500
    c = limit_constant(alpha, lam)
    ok, notes = True, []
    for i, K in enumerate((2, 4, 8)):
        rel_sd = {}
        for L in (8, 64):
            params = NetworkParams(lam=lam, lam_b=lam_b, alpha=alpha, K=K, L=L, n_mobiles=3000)
            samples = run_realizations(params, n_real, master_seed=1000 + 10 * i + L)
            norm = np.array([s.sir_mmse / (L ** (0.5 * alpha - 1) * s.p_k) for s in samples])
            rel_sd[L] = norm.std() / norm.mean()
            if L == 64:
                target = K * c
                err = norm.mean() / target - 1
                ok &= abs(err) <= 0.20
                notes.append(f"K={K}: mean {norm.mean():.5f} vs {target:.5f} ({err:+.1%})")
        ok &= rel_sd[64] < rel_sd[8]
        notes.append(f"K={K}: rel sd L=8 {rel_sd[8]:.3f} -> L=64 {rel_sd[64]:.3f}")
    assert report(1, ok, "; ".join(notes))


def test_criterion_2_pk_cdf(report):
    rng = np.random.default_rng(2)
    grid = np.logspace(np.log10(0.5), np.log10(50), 80)
    sups = {}
    for K in (1, 2, 3):
        dist = PkDistribution(K, 1.0, 4.0, 1, m_terms=10)
        s = np.sort(sample_pk(K, 1, 4.0, 1.0, 100_000, rng))
        emp = np.searchsorted(s, grid, side="right") / len(s)
        sups[K] = float(np.max(np.abs(dist.cdf_grid(grid) - emp)))
    d1 = PkDistribution(1, 1.0, 4.0, 1)
    xs = np.logspace(-2, 4, 50)
    closed = float(np.max(np.abs(d1.cdf_grid(xs) - pk_cdf_closed_form_k1(xs, 1.0, 4.0, 1))))
    ok = max(sups.values()) <= 0.02 and closed <= 1e-6
    detail = ", ".join(f"K={k} sup {v:.4f}" for k, v in sups.items()) + f"; K=1 closed form {closed:.1e}"
    assert report(2, ok, detail)


def test_criterion_3_eta_cdf(report):
    K, L, lam_b, lam, alpha = 8, 25, 0.1, 1.0, 4.0
    rng = np.random.default_rng(3)
    eta = np.sort(eta_asym(sample_pk(K, L, alpha, lam_b, 100_000, rng), K, L, alpha, lam))
    taus = np.linspace(0.0, eta[-1], 200)
    emp = np.searchsorted(eta, taus, side="right") / len(eta)
    sup = float(np.max(np.abs(eta_cdf_grid(taus, PkDistribution(K, lam_b, alpha, L), lam) - emp)))
    assert report(3, sup <= 0.05, f"sup distance {sup:.4f}")


def test_criterion_4_hex(report):
    exact = abs(hex_pk(3, 1, 1.0, 4.0) - 20.25) <= 1e-12 * 20.25 and abs(
        hex_pk(4, 1, 1.0, 4.0) - 20.671875
    ) <= 1e-12 * 20.671875
    worst_lattice = 0.0
    for lam_b in (0.1, 1.0):
        d_h = hex_cell_edge_length(lam_b)
        sites = hex_grid_cell_edge(lam_b, 6 * d_h)
        r = np.sort(np.hypot(sites[:, 0], sites[:, 1]))
        for alpha in (3.0, 4.0, 5.0):
            for K in range(1, 7):
                a, b = hex_pk(K, 7, lam_b, alpha), received_power_sum(r[:K], 7, alpha)
                worst_lattice = max(worst_lattice, abs(a - b) / b)
    worst_equiv = 0.0
    for L, lam_b, lam, alpha in [(50, 0.1, 1.0, 4.0), (3, 2.0, 0.5, 3.3), (128, 0.01, 7.0, 5.0)]:
        d_h = hex_cell_edge_length(lam_b)
        e3 = cell_edge_eta(3, L, lam_b, lam, alpha)
        e_big = eta_asym(3 * L * d_h ** -alpha, 1, 3 * L, alpha, lam)
        e_close = eta_asym(L * (d_h / math.sqrt(3)) ** -alpha, 1, L, alpha, lam)
        worst_equiv = max(worst_equiv, abs(e3 - e_big) / e3, abs(e3 - e_close) / e3)
    ok = exact and worst_lattice <= 1e-10 and worst_equiv <= 1e-12
    assert report(4, ok, f"exact {exact}; lattice {worst_lattice:.1e}; equivalences {worst_equiv:.1e}")


def _grid_argmax(pk, K, L, alpha):
    lam = np.logspace(-8, 6, 10_000)
    rho = [rate_density(x, pk, K, L, alpha) for x in lam]
    return lam[int(np.argmax(rho))]


def test_criterion_5_optimal_density_grid(report):
    worst = 0.0
    for alpha in (3.0, 4.0, 5.0):
        for pk in (0.5, 1.0, 5.0):
            for K, L in ((1, 1), (8, 16)):
                lam = optimal_density(pk, K, L, alpha)
                worst = max(worst, abs(lam / _grid_argmax(pk, K, L, alpha) - 1))
    assert report("5 (grid agreement)", worst <= 0.01, f"worst relative gap {worst:.2e}")


def test_criterion_5_stated_alpha4_value(report):
    # the stated value is the Lambert bracket alone; the grid argmax is near 0.1023
    lam = optimal_density(1.0, 1, 1, 4.0)
    grid = _grid_argmax(1.0, 1, 1, 4.0)
    ok = abs(lam - 0.50501) <= 1e-4
    assert report("5 (alpha=4 value 0.50501)", ok, f"optimal_density {lam:.7f}, grid argmax {grid:.7f}")


def test_criterion_6_structural_invariants(report):
    rng = np.random.default_rng(6)
    fails = []
    for trial in range(20):
        K, L = int(rng.integers(1, 5)), int(rng.integers(1, 9))
        params = NetworkParams(lam=1.0, lam_b=0.1, alpha=4.0, K=K, L=L, n_mobiles=max(60, K * L + 20))
        topo = build_topology(params, rng)
        g0 = standard_complex_normal(rng, K * L)
        G = standard_complex_normal(rng, (K * L, topo.n_mobiles))
        a = channel_from_fades(topo, L, 4.0, g0, G)
        b = channel_from_fades(topo.scaled(float(rng.uniform(0.1, 10))), L, 4.0, g0, G)
        s_a, s_b = mmse_sir(a.h0, a.H), mmse_sir(b.h0, b.H)
        if abs(s_a - s_b) > 1e-10 * s_a:
            fails.append("scale invariance")
        n = topo.n_mobiles
        if mmse_sir(a.h0, a.H) > mmse_sir(a.h0, a.H[:, : n - 5]) * (1 + 1e-12):
            fails.append("interferer monotonicity")
        if mf_sir(a.h0, a.H) > s_a * (1 + 1e-9):
            fails.append("MMSE >= MF")
    for K, L in ((2, 3), (4, 32), (8, 25)):
        for alpha, lam in ((4.0, 1.0), (3.3, 0.7)):
            if sigma2_asym(K, L, alpha, lam) != pytest.approx(sigma2_asym(L, K, alpha, lam), rel=1e-13):
                fails.append("sigma2 symmetry")
    r = sample_nearest_distances(8, 1.0, 50, rng)
    for row in r:
        for K in (1, 3, 8):
            for lam_b, lam, alpha in ((0.1, 1.0, 4.0), (0.4, 2.0, 3.5)):
                L = 25
                p = received_power_sum(row[:K] / math.sqrt(lam_b), L, alpha)
                direct = sir_asym(p, K, L, alpha, lam)
                via_shat = sir_asym_unit_density(s_hat_k(row[:K] / math.sqrt(lam_b), lam_b, K, L, alpha), K, L, alpha, lam, lam_b)
                if abs(direct - via_shat) > 1e-12 * direct:
                    fails.append("SIR forms agree")
                if abs(direct - p / sigma2_asym(K, L, alpha, lam)) > 1e-12 * direct:
                    fails.append("SIR = P_K / sigma2")
    assert report(6, not fails, "all identities hold" if not fails else ", ".join(sorted(set(fails))))


def test_criterion_7_receiver_gap(report):
    params = NetworkParams(lam=1.0, lam_b=0.4, alpha=4.0, K=32, L=25, n_mobiles=3000)
    samples = run_realizations(params, 500, master_seed=7007)
    mmse = np.median([s.eta for s in samples])
    mf = np.median([s.eta_mf for s in samples])
    ratio = mmse / mf
    assert report(7, ratio >= 2.0, f"median eta MMSE {mmse:.3f}, MF {mf:.3f}, ratio {ratio:.2f}")


def test_criterion_8_regime_reversal(report):
    fixed_b = compare_fixed_coop_antennas(200, 0.1, 4.0, 1.0, [(1, 200), (2, 100), (8, 25)], n_draws=10_000)
    fixed_a = compare_fixed_antenna_density(
        800, 10.0, 4.0, 1.0, [(8, 100, 0.1), (16, 50, 0.2), (32, 25, 0.4)], n_draws=10_000
    )
    ok = fixed_b.favors_fewer_bs and fixed_a.favors_more_bs
    detail = f"fixed lam_b order {[k for k, _, _ in fixed_b.order]}, fixed lam_a order {[k for k, _, _ in fixed_a.order]}"
    assert report(8, ok, detail)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopnet.asymptotics import eta_asym, eta_asym_linearized
from coopnet.errors import ParameterError
from coopnet.geometry import hex_cell_edge_length, hex_grid_cell_edge, received_power_sum
from coopnet.hex_model import HexCellEdge, cell_edge_eta, hex_pk


def test_exact_values():
    assert hex_pk(3, 1, 1.0, 4.0) == pytest.approx(20.25, rel=1e-13)
    assert hex_pk(4, 1, 1.0, 4.0) == pytest.approx(20.671875, rel=1e-13)
    d_h = hex_cell_edge_length(0.3)
    assert hex_pk(1, 7, 0.3, 3.5) == pytest.approx(7 * d_h ** -3.5, rel=1e-14)


def test_cell_area_consistency():
    for lam_b in (0.01, 0.1, 1.0, 42.0):
        cell = HexCellEdge(lam_b, 3, 10, 4.0)
        assert 1.5 * math.sqrt(3.0) * cell.d_h ** 2 == pytest.approx(1 / lam_b, rel=1e-12)


@pytest.mark.parametrize("alpha", [3.0, 4.0, 5.5])
@pytest.mark.parametrize("lam_b", [0.1, 1.0])
def test_matches_constructed_lattice(alpha, lam_b):
    d_h = hex_cell_edge_length(lam_b)
    sites = hex_grid_cell_edge(lam_b, 6 * d_h)
    r = np.sort(np.hypot(sites[:, 0], sites[:, 1]))
    for K in range(1, 7):
        assert hex_pk(K, 9, lam_b, alpha) == pytest.approx(
            received_power_sum(r[:K], 9, alpha), rel=1e-10
        )


@pytest.mark.parametrize("L,lam_b,lam,alpha", [(50, 0.1, 1.0, 4.0), (3, 2.0, 0.5, 3.3), (128, 0.01, 7.0, 5.0)])
def test_three_bs_equivalences(L, lam_b, lam, alpha):
    d_h = hex_cell_edge_length(lam_b)
    eta3 = cell_edge_eta(3, L, lam_b, lam, alpha)
    # one BS carrying all 3L antennas at the cell-edge distance
    single_big = eta_asym(3 * L * d_h ** -alpha, 1, 3 * L, alpha, lam)
    # one BS with L antennas at a third of the squared distance
    closer = eta_asym(L * (d_h / math.sqrt(3.0)) ** -alpha, 1, L, alpha, lam)
    assert eta3 == pytest.approx(single_big, rel=1e-12)
    assert eta3 == pytest.approx(closer, rel=1e-12)


@given(st.integers(1, 200), st.floats(1e-3, 1e2), st.floats(2.1, 7.0))
def test_nondecreasing_in_k(L, lam_b, alpha):
    vals = [hex_pk(K, L, lam_b, alpha) for K in range(1, 7)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_eta_grows_with_alpha_nearly_linearly():
    a = np.linspace(3.0, 5.0, 21)
    eta = np.array([cell_edge_eta(3, 50, 0.1, 1.0, x) for x in a])
    assert np.all(np.isfinite(eta)) and np.all(eta > 0)
    assert np.all(np.diff(eta) > 0)
    sub = (a >= 3.5 - 1e-12)
    coef = np.polyfit(a[sub], eta[sub], 1)
    resid = eta[sub] - np.polyval(coef, a[sub])
    r2 = 1 - np.sum(resid ** 2) / np.sum((eta[sub] - eta[sub].mean()) ** 2)
    assert r2 > 0.99


@pytest.mark.parametrize("alpha", [3.0, 4.0, 5.0])
def test_doubling_cluster_adds_half_alpha_bits(alpha):
    args = (50, 0.1, 1.0, alpha)
    lin = [eta_asym_linearized(hex_pk(K, 50, 0.1, alpha), K, 50, alpha, 1.0) for K in (1, 2)]
    assert lin[1] - lin[0] == pytest.approx(alpha / 2, abs=1e-12)
    e = [cell_edge_eta(K, *args) for K in (1, 2)]
    slack = abs(e[0] - lin[0]) + abs(e[1] - lin[1])
    assert abs((e[1] - e[0]) - alpha / 2) <= slack + 1e-12


@pytest.mark.parametrize("K", [0, 7, 2.5])
def test_k_out_of_range(K):
    with pytest.raises(ParameterError):
        hex_pk(K, 1, 1.0, 4.0)
    with pytest.raises(ParameterError):
        HexCellEdge(1.0, K, 1, 4.0)

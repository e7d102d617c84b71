"""Cell-edge mobile in a hexagonal BS deployment.

The mobile sits on a cell vertex: three BSs at the cell-edge length d_h and
three more at 2 d_h, which makes P_K deterministic for K <= 6.
"""

import math
from dataclasses import dataclass

from .asymptotics import eta_asym
from .errors import ParameterError
from .geometry import hex_cell_edge_length

__all__ = ["HexCellEdge", "hex_pk", "cell_edge_eta", "MAX_HEX_K"]

MAX_HEX_K = 6


def _check_k(K):
    if int(K) != K or not 1 <= K <= MAX_HEX_K:
        raise ParameterError(
            f"closed-form hexagonal P_K covers K in [1, {MAX_HEX_K}], got K={K}; "
            "use the lattice from geometry.hex_grid_cell_edge for larger clusters"
        )
    return int(K)


@dataclass(frozen=True)
class HexCellEdge:
    lam_b: float
    K: int
    L: int
    alpha: float

    def __post_init__(self):
        _check_k(self.K)
        if not self.lam_b > 0:
            raise ParameterError(f"lam_b must be positive, got {self.lam_b}")

    @property
    def d_h(self):
        return hex_cell_edge_length(self.lam_b)

    @property
    def p_k(self):
        return hex_pk(self.K, self.L, self.lam_b, self.alpha)

    def eta(self, lam):
        return cell_edge_eta(self.K, self.L, self.lam_b, lam, self.alpha)


def hex_pk(K, L, lam_b, alpha):
    """Received power sum of a vertex mobile served by its K nearest sites."""
    K = _check_k(K)
    d_h = hex_cell_edge_length(lam_b)
    near = d_h ** (-alpha)
    if K <= 3:
        return K * L * near
    return 3 * L * near + L * (K - 3) * (2.0 * d_h) ** (-alpha)


def cell_edge_eta(K, L, lam_b, lam, alpha):
    """Asymptotic spectral efficiency of the cell-edge mobile (bits/s/Hz)."""
    return eta_asym(hex_pk(K, L, lam_b, alpha), K, L, alpha, lam)

"""Network topologies: Poisson mobiles, Poisson or hexagonal base stations.

The test mobile sits at the origin.  Everything here is a pure function of
its arguments plus an explicit ``numpy.random.Generator``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SingularityError, TopologyError

__all__ = [
    "BSModel",
    "CountMode",
    "NetworkParams",
    "Topology",
    "sample_poisson_disk",
    "hex_cell_edge_length",
    "hex_grid_cell_edge",
    "build_topology",
    "received_power_sum",
    "sample_nearest_distances",
    "sample_pk",
]


class BSModel(str, enum.Enum):
    POISSON_FIXED_COUNT = "PoissonFixedCount"
    POISSON_RANDOM_COUNT = "PoissonRandomCount"
    HEX_GRID_CELL_EDGE = "HexGridCellEdge"


class CountMode(str, enum.Enum):
    FIXED = "fixed"
    RANDOM = "random"


@dataclass(frozen=True)
class NetworkParams:
    """Scalar model parameters.

    ``region_radius`` defaults to the radius of the disk whose expected
    mobile count equals ``n_mobiles`` (plus six standard deviations when the
    counts are Poisson, so the disk practically always holds enough mobiles).
    """

    lam: float = 1.0
    lam_b: float = 0.1
    alpha: float = 4.0
    K: int = 2
    L: int = 8
    n_mobiles: int = 3000
    region_radius: float = None
    bs_model: BSModel = BSModel.POISSON_FIXED_COUNT

    def __post_init__(self):
        object.__setattr__(self, "bs_model", BSModel(self.bs_model))
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam}")
        if not self.lam_b > 0:
            raise ParameterError(f"lam_b must be positive, got {self.lam_b}")
        if not self.alpha > 2:
            raise ParameterError(f"alpha must exceed 2, got {self.alpha}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if int(self.L) != self.L or self.L < 1:
            raise ParameterError(f"L must be a positive integer, got {self.L}")
        if self.n_mobiles <= self.K * self.L:
            raise ParameterError(
                f"n_mobiles={self.n_mobiles} must exceed K*L={self.K * self.L}"
            )
        if self.region_radius is None:
            target = self.n_mobiles
            if self.bs_model is BSModel.POISSON_RANDOM_COUNT:
                # Poisson mobile count: leave a 6-sigma margin above n_mobiles
                target += 6.0 * math.sqrt(self.n_mobiles)
            object.__setattr__(self, "region_radius", math.sqrt(target / (math.pi * self.lam)))
        if not self.region_radius > 0:
            raise ParameterError(f"region_radius must be positive, got {self.region_radius}")
        expected = self.lam * math.pi * self.region_radius ** 2
        if self.n_mobiles > round(expected):
            raise ParameterError(
                f"region_radius={self.region_radius} holds about {expected:.1f} mobiles, "
                f"fewer than n_mobiles={self.n_mobiles}"
            )

    @property
    def count_mode(self):
        if self.bs_model is BSModel.POISSON_RANDOM_COUNT:
            return CountMode.RANDOM
        return CountMode.FIXED

    @property
    def n_antennas(self):
        return self.K * self.L


@dataclass(frozen=True)
class Topology:
    bs_positions: np.ndarray
    mobile_positions: np.ndarray
    coop_bs_indices: np.ndarray
    r0: np.ndarray
    r_matrix: np.ndarray = field(repr=False)

    @property
    def K(self):
        return len(self.r0)

    @property
    def n_mobiles(self):
        return self.r_matrix.shape[0]

    def scaled(self, s):
        """Same topology with every coordinate multiplied by ``s``."""
        return Topology(
            bs_positions=self.bs_positions * s,
            mobile_positions=self.mobile_positions * s,
            coop_bs_indices=self.coop_bs_indices,
            r0=self.r0 * s,
            r_matrix=self.r_matrix * s,
        )


def sample_poisson_disk(density, radius, count_mode, rng):
    """Uniform points on the disk of the given radius centred at the origin.

    With ``count_mode="fixed"`` the number of points is
    ``round(density * pi * radius**2)``; with ``"random"`` it is Poisson with
    that mean.  Radii use the inverse CDF ``radius * sqrt(u)`` so that
    rescaling ``radius`` rescales the points exactly under a reused seed.
    """
    if not density > 0:
        raise ParameterError(f"density must be positive, got {density}")
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    mean = density * math.pi * radius ** 2
    if CountMode(count_mode) is CountMode.FIXED:
        n = int(round(mean))
    else:
        n = int(rng.poisson(mean))
    u = rng.random(n)
    theta = rng.random(n) * (2.0 * math.pi)
    rho = radius * np.sqrt(u)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def hex_cell_edge_length(lam_b):
    """Hexagon side length for BS density ``lam_b`` (one BS per cell)."""
    if not lam_b > 0:
        raise ParameterError(f"lam_b must be positive, got {lam_b}")
    return math.sqrt(2.0 / (3.0 * math.sqrt(3.0) * lam_b))


def hex_grid_cell_edge(lam_b, extent):
    """Hexagonal-cell BS sites within ``extent`` of the origin.

    The lattice has one axis along x and is translated so the origin is a
    cell vertex: three sites at distance d_h, the next three at 2 d_h.
    """
    d_h = hex_cell_edge_length(lam_b)
    if extent < 2.0 * d_h:
        raise ParameterError(f"extent={extent} is smaller than two cell edges ({2 * d_h})")
    a = math.sqrt(3.0) * d_h  # site spacing
    # origin -> centroid of the site triangle {0, a1, a2}
    offset = np.array([-0.5 * a, -a * math.sqrt(3.0) / 6.0])
    # the index square maps to a 60-degree rhombus whose inradius is (sqrt(3)/2) a n
    n = int(math.ceil(2.0 * extent / (math.sqrt(3.0) * a))) + 2
    i, j = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    i = i.ravel().astype(float)
    j = j.ravel().astype(float)
    pts = np.column_stack([a * i + 0.5 * a * j, (math.sqrt(3.0) / 2.0) * a * j]) + offset
    keep = np.hypot(pts[:, 0], pts[:, 1]) <= extent
    return pts[keep]


def _nearest_order(points):
    """Indices sorting points by distance, ties broken by angle then index."""
    d = np.hypot(points[:, 0], points[:, 1])
    # quantize so lattice ties that differ by an ulp compare equal
    dq = np.round(d, decimals=12 - int(math.floor(math.log10(max(d.max(), 1e-300)))))
    ang = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi)
    idx = np.arange(len(points))
    return np.lexsort((idx, ang, dq)), d


def _bs_positions(params, rng):
    if params.bs_model is BSModel.HEX_GRID_CELL_EDGE:
        return hex_grid_cell_edge(params.lam_b, params.region_radius)
    return sample_poisson_disk(params.lam_b, params.region_radius, params.count_mode, rng)


def build_topology(params, rng, bs_positions=None):
    """Sample one network realization around the test mobile at the origin.

    Parameters
    ----------
    params : NetworkParams
    rng : numpy.random.Generator
    bs_positions : array of shape (m, 2), optional
        Fixed BS sites; overrides ``params.bs_model``.

    Returns
    -------
    Topology
        Mobiles are the ``n_mobiles`` nearest to the origin, sorted by
        distance.  ``r_matrix[i, j]`` is the distance from mobile ``i`` to the
        ``j``-th nearest BS.
    """
    if bs_positions is None:
        bs = _bs_positions(params, rng)
    else:
        bs = np.asarray(bs_positions, dtype=float).reshape(-1, 2)
    if len(bs) < params.K:
        raise TopologyError(f"only {len(bs)} BSs generated, need K={params.K}")

    mobiles = sample_poisson_disk(params.lam, params.region_radius, params.count_mode, rng)
    if len(mobiles) < params.n_mobiles:
        raise TopologyError(
            f"disk holds {len(mobiles)} mobiles, fewer than n_mobiles={params.n_mobiles}"
        )
    m_order = np.argsort(np.hypot(mobiles[:, 0], mobiles[:, 1]), kind="stable")
    mobiles = mobiles[m_order[: params.n_mobiles]]

    b_order, b_dist = _nearest_order(bs)
    coop = b_order[: params.K]
    r0 = b_dist[coop]
    if np.any(r0 <= 0.0):
        raise SingularityError("a base station sits at the origin")
    diff = mobiles[:, None, :] - bs[coop][None, :, :]
    r_matrix = np.hypot(diff[..., 0], diff[..., 1])
    if np.any(r_matrix <= 0.0):
        raise SingularityError("an interferer coincides with a cooperating BS")
    return Topology(
        bs_positions=bs,
        mobile_positions=mobiles,
        coop_bs_indices=coop,
        r0=r0,
        r_matrix=r_matrix,
    )


def received_power_sum(r0, L, alpha):
    """Total average power from the test mobile over all cooperating antennas.

    ``L * sum(r0 ** -alpha)``; ``r0`` may carry a leading batch axis.
    """
    r0 = np.asarray(r0, dtype=float)
    if np.any(r0 <= 0.0):
        raise SingularityError("zero distance in received power sum")
    out = L * np.sum(r0 ** (-float(alpha)), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def sample_nearest_distances(K, lam_b, size, rng):
    """Distances to the K nearest points of an infinite planar PPP.

    Uses the fact that pi * lam_b * r_k^2 are the arrival times of a
    unit-rate Poisson process.  Returns shape (size, K), rows nondecreasing.
    """
    arrivals = np.cumsum(rng.standard_exponential((size, K)), axis=1)
    return np.sqrt(arrivals / (math.pi * lam_b))


def sample_pk(K, L, alpha, lam_b, size, rng):
    """Draws of the received power sum for Poisson BSs of density lam_b."""
    return received_power_sum(sample_nearest_distances(K, lam_b, size, rng), L, alpha)

"""Uplink spectral efficiency of cooperating multi-antenna base stations in
Poisson and hexagonal networks: Monte Carlo, large-antenna limits, and design."""

__version__ = "0.1.0"

from .asymptotics import eta_asym, limit_constant, sigma2_asym, sir_asym
from .channel_mc import mf_sir, mmse_sir, run_realizations
from .design_opt import optimal_density, rate_density
from .geometry import BSModel, NetworkParams, build_topology
from .hex_model import cell_edge_eta, hex_pk
from .pk_dist import PkDistribution, eta_cdf, outage_pk, pk_cdf

__all__ = [
    "__version__",
    "BSModel",
    "NetworkParams",
    "PkDistribution",
    "build_topology",
    "cell_edge_eta",
    "eta_asym",
    "eta_cdf",
    "hex_pk",
    "limit_constant",
    "mf_sir",
    "mmse_sir",
    "optimal_density",
    "outage_pk",
    "pk_cdf",
    "rate_density",
    "run_realizations",
    "sigma2_asym",
    "sir_asym",
]

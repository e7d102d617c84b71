"""Stacked uplink channels, MMSE and matched-filter receivers, seeded Monte Carlo.

Realization ``i`` of a batch draws from its own generator, derived from
``(master_seed, i)`` with ``numpy.random.SeedSequence``, so a batch gives the
same samples whatever the execution order or number of worker processes.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ParameterError, SimulationError, SingularityError, TopologyError
from .geometry import build_topology, received_power_sum

log = logging.getLogger(__name__)

__all__ = [
    "ChannelRealization",
    "SirSample",
    "EigenDiagnostic",
    "standard_complex_normal",
    "channel_from_fades",
    "build_channel",
    "mmse_sir",
    "mf_sir",
    "min_eigenvalue_diagnostic",
    "min_eigenvalue_bound",
    "realization_seed",
    "simulate_realization",
    "run_realizations",
]

# crude lower bound on cond(H H^dagger) from the diagonal of its Cholesky factor
COND_LIMIT = 1e14
SIR_CEILING = 1e12
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ChannelRealization:
    h0: np.ndarray
    H: np.ndarray
    topology_ref: object = None


@dataclass(frozen=True)
class SirSample:
    sir_mmse: float
    sir_mf: float
    p_k: float
    eta: float
    realization_index: int
    seed: int
    min_eig: float = float("nan")
    below_eig_bound: bool = False

    @property
    def eta_mf(self):
        return math.log2(1.0 + self.sir_mf)


@dataclass(frozen=True)
class EigenDiagnostic:
    min_eig: float
    gamma_lb: float
    below_bound: bool


def standard_complex_normal(rng, shape):
    """CN(0, 1) draws: real and imaginary parts each with variance 1/2."""
    if isinstance(shape, int):
        shape = (shape,)
    z = rng.standard_normal(tuple(shape) + (2,)).view(np.complex128)[..., 0]
    return z * math.sqrt(0.5)


def channel_from_fades(topology, L, alpha, g0, G):
    """Apply the path loss of ``topology`` to given fades.

    ``g0`` has length K*L and ``G`` shape (K*L, n); entry (k*L + l) of each
    column is attenuated by the distance to cooperating BS k.
    """
    half = -0.5 * float(alpha)
    a0 = np.repeat(topology.r0 ** half, L)
    A = np.repeat(topology.r_matrix.T ** half, L, axis=0)
    return ChannelRealization(h0=a0 * g0, H=A * G, topology_ref=topology)


def build_channel(topology, L, alpha, rng):
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    N = topology.K * L
    g0 = standard_complex_normal(rng, N)
    G = standard_complex_normal(rng, (N, topology.n_mobiles))
    return channel_from_fades(topology, L, alpha, g0, G)


def mmse_sir(h0, H):
    """SIR of the MMSE receiver, h0^dagger (H H^dagger)^-1 h0, without noise.

    Evaluated as ||R^-dagger h0||^2 where R is the triangular factor of a QR
    decomposition of H^dagger, so H H^dagger = R^dagger R (R is the Cholesky
    factor of the Gram matrix) and the result is real and nonnegative by
    construction.  Factoring H rather than the Gram matrix keeps the
    condition number unsquared; a mobile right next to a cooperating BS
    otherwise costs about seven digits.  Interferers enter the QR in order of
    decreasing channel norm, which makes Householder QR insensitive to the
    huge spread of path losses between them.
    """
    h0 = np.asarray(h0, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    N, n = H.shape
    if n < N:
        raise SingularityError(f"Gram matrix is rank deficient (n={n} < K*L={N})")
    order = np.argsort(-np.einsum("ij,ij->j", H.real, H.real) - np.einsum("ij,ij->j", H.imag, H.imag))
    R = scipy.linalg.qr(H[:, order].conj().T, mode="r", check_finite=False)[0][:N]
    diag = np.abs(np.diag(R))
    if diag.min() == 0.0 or (diag.max() / diag.min()) ** 2 > COND_LIMIT:
        raise SingularityError(f"Gram matrix numerically singular (n={n}, K*L={N})")
    y = scipy.linalg.solve_triangular(R, h0, trans="C", lower=False, check_finite=False)
    return float(np.vdot(y, y).real)


def mf_sir(h0, H, ceiling=SIR_CEILING):
    """SIR of the matched filter c = h0; capped at ``ceiling``."""
    h0 = np.asarray(h0, dtype=np.complex128)
    signal = float(np.vdot(h0, h0).real)
    if signal == 0.0:
        raise ParameterError("matched filter needs a nonzero h0")
    leak = np.asarray(H).conj().T @ h0
    interference = float(np.vdot(leak, leak).real)
    if interference == 0.0 or signal ** 2 > ceiling * interference:
        return float(ceiling)
    return signal ** 2 / interference


def min_eigenvalue_bound(K, alpha, lam):
    """Asymptotic lower bound on the smallest eigenvalue of L^(alpha/2-1) H H^dagger."""
    return (math.pi * lam) ** (0.5 * alpha) * (1.5 - math.sqrt(2.0)) * (2.0 * K) ** (1.0 - 0.5 * alpha)


def min_eigenvalue_diagnostic(H, L, alpha, lam, K):
    """Smallest eigenvalue of the scaled Gram matrix next to its asymptotic bound.

    The bound only holds as L grows, so falling below it is flagged, not raised.
    """
    H = np.asarray(H)
    gram = (L ** (0.5 * alpha - 1.0)) * (H @ H.conj().T)
    ev = scipy.linalg.eigvalsh(gram, subset_by_index=[0, 0], check_finite=False)
    lo = max(float(ev[0]), 0.0)
    lb = min_eigenvalue_bound(K, alpha, lam)
    return EigenDiagnostic(min_eig=lo, gamma_lb=lb, below_bound=lo < lb)


def realization_seed(master_seed, index):
    """64-bit seed for realization ``index`` of a batch."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def simulate_realization(params, index, master_seed, diagnostics=False, bs_positions=None):
    seed = realization_seed(master_seed, index)
    rng = np.random.default_rng(seed)
    topo = build_topology(params, rng, bs_positions=bs_positions)
    ch = build_channel(topo, params.L, params.alpha, rng)
    sir = mmse_sir(ch.h0, ch.H)
    extra = {}
    if diagnostics:
        d = min_eigenvalue_diagnostic(ch.H, params.L, params.alpha, params.lam, params.K)
        extra = dict(min_eig=d.min_eig, below_eig_bound=d.below_bound)
    return SirSample(
        sir_mmse=sir,
        sir_mf=mf_sir(ch.h0, ch.H),
        p_k=received_power_sum(topo.r0, params.L, params.alpha),
        eta=math.log2(1.0 + sir),
        realization_index=index,
        seed=seed,
        **extra,
    )


def _run_one(args):
    params, index, master_seed, diagnostics, bs_positions = args
    try:
        return simulate_realization(params, index, master_seed, diagnostics, bs_positions)
    except (SingularityError, TopologyError) as exc:
        return (index, f"{type(exc).__name__}: {exc}")


def run_realizations(
    params,
    n_realizations,
    master_seed,
    jobs=1,
    diagnostics=False,
    bs_positions=None,
    failures=None,
):
    """Simulate ``n_realizations`` independent topologies and channels.

    Parameters
    ----------
    params : NetworkParams
    n_realizations : int
    master_seed : int
    jobs : int
        Worker processes; results do not depend on it.
    diagnostics : bool
        Also compute the smallest-eigenvalue diagnostic (one extra eigensolve).
    bs_positions : array, optional
        Fixed BS sites shared by every realization.
    failures : list, optional
        Receives ``(index, message)`` for each failed realization.

    Returns
    -------
    list of SirSample, ordered by realization index.

    Raises
    ------
    SimulationError
        More than 1% of realizations failed; successful samples are on
        ``exc.partial``.
    """
    if n_realizations < 0:
        raise ParameterError("n_realizations must be >= 0")
    tasks = [(params, i, master_seed, diagnostics, bs_positions) for i in range(n_realizations)]
    if jobs > 1 and n_realizations > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=max(1, n_realizations // (4 * jobs))))
    else:
        outcomes = [_run_one(t) for t in tasks]

    samples = [o for o in outcomes if isinstance(o, SirSample)]
    failed = [o for o in outcomes if not isinstance(o, SirSample)]
    for idx, msg in failed:
        log.warning("realization %d failed: %s", idx, msg)
    if failures is not None:
        failures.extend(failed)
    if n_realizations and len(failed) > MAX_FAILURE_FRACTION * n_realizations:
        raise SimulationError(
            f"{len(failed)} of {n_realizations} realizations failed", partial=samples, failures=failed
        )
    samples.sort(key=lambda s: s.realization_index)
    return samples

"""Tabulate how the P_K CDF series settles as the m-sum grows.

For each cluster size, prints the CDF at a few powers for several fixed
truncation lengths, plus the last-term magnitude used as the error proxy.
"""

import argparse
import warnings

import numpy as np

from coopnet.errors import AccuracyWarning, NumericalError
from coopnet.pk_dist import PkDistribution


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam-b", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=4.0)
    ap.add_argument("--K", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--terms", type=int, nargs="+", default=[5, 10, 15, 20, 40])
    args = ap.parse_args()

    warnings.simplefilter("ignore", AccuracyWarning)
    print(f"{'K':>3} {'x':>10} " + " ".join(f"{'M=' + str(m):>22}" for m in args.terms))
    for K in args.K:
        dists = [PkDistribution(K, args.lam_b, args.alpha, 1, m, m) for m in args.terms]
        # centre the grid on the typical power of K nearest BSs
        typical = K * (args.lam_b * np.pi / K) ** (0.5 * args.alpha)
        for x in typical * np.logspace(-0.5, 1.5, 5):
            cells = []
            for d in dists:
                try:
                    v = d.evaluate(x)
                    cells.append(f"{v.value:.8f} ({v.last_term:.0e})")
                except NumericalError:
                    cells.append(f"{'unresolved':>22}")
            print(f"{K:3d} {x:10.4g} " + " ".join(f"{c:>22}" for c in cells))


if __name__ == "__main__":
    main()

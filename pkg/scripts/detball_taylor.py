"""Inspect the Taylor matrices of log det(I - Z W^*)^-1 on 2x2 matrices.

Prints H_delta for a chosen delta, the most negative eigenvalues of the full
order-N matrix with the multi-indices that carry them, and the 2x2 block on
{z1 z4, z2 z3} responsible for the failure of positivity.

    python scripts/detball_taylor.py [--order 8] [--delta 1 0 0 3]
"""

import argparse

import numpy as np

from curvlab import posdef
from curvlab import series as S
from curvlab.kernels import DetBall2, taylor_expand


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=8)
    ap.add_argument("--delta", type=int, nargs=4, default=[1, 0, 0, 3])
    ap.add_argument("--top", type=int, default=5, help="number of negative eigenvalues to list")
    args = ap.parse_args()

    logs = S.log(taylor_expand(DetBall2(), np.zeros(4), args.order))
    tm = posdef.taylor_matrix(logs, args.delta)
    np.set_printoptions(precision=4, suppress=True, linewidth=140)
    print(f"H_delta for delta={tuple(args.delta)} (colex indices {list(tm.indices)}):")
    print(tm.entries.real)

    full = posdef.taylor_matrix(logs)
    vals, vecs = np.linalg.eigh(full.entries)
    print(f"\nfull order-{args.order} matrix: size {full.size}, {int(np.sum(vals < -1e-8))} negative eigenvalues")
    for lam, vec in zip(vals[: args.top], vecs.T[: args.top]):
        heavy = [full.indices[i] for i in np.argsort(-np.abs(vec))[:2]]
        print(f"  {lam:10.4f}  carried mostly by {heavy}")

    i, j = (1, 0, 0, 1), (0, 1, 1, 0)
    block = np.array([[logs.coeff(a, b) for b in (i, j)] for a in (i, j)]).real
    print(f"\nblock on z1z4, z2z3:\n{block}\neigenvalues {np.linalg.eigvalsh(block)}")


if __name__ == "__main__":
    main()

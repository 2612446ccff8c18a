"""Check the l2 Gershgorin constant: grid minimum of g and the random-Lindbladian bound."""

import argparse
import math

import numpy as np

from markdiv.criteria import IMPROVED_GERSHGORIN_CONSTANT, minimize_appendix_g
from markdiv.matcore import hermitian_eigenvalues_ascending
from markdiv.sampling import random_lindbladian
from markdiv.superop import LindbladGenerator, symmetrized_generator


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g, x, y = minimize_appendix_g()
    print(f"min g = {g:.10f} at ({x:.8f}, {y:.8f}); -2-sqrt(13/8) = {-IMPROVED_GERSHGORIN_CONSTANT:.10f}, "
          f"1/sqrt2 = {1 / math.sqrt(2):.8f}")

    rng = np.random.default_rng(args.seed)
    print("d  min over samples of lambda_1(L+L*) / ||L||_F^2")
    for d in range(2, 7):
        worst = math.inf
        for _ in range(args.samples):
            L = random_lindbladian(d, rng)
            lam = hermitian_eigenvalues_ascending(symmetrized_generator(LindbladGenerator.dissipative(L)).matrix)
            worst = min(worst, lam.values[0] / np.linalg.norm(L) ** 2)
        print(f"{d}  {worst:.6f}")


if __name__ == "__main__":
    main()

"""Recompute the worked examples and print how far each lands from its closed form."""

import argparse
import math

import numpy as np

from markdiv.criteria import channel_spectrum, full_report, max_valid_exponent
from markdiv.stochastic import counterexample_matrix, stochastic_exp
from markdiv.witnesses import (
    corner_extreme_singular_values,
    gellmann_boundary_witness,
    nilpotent_corner_channel,
    perturb_toward_identity,
    perturbed_identity_witness,
    scaled_corner_exponent_bound,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=6)
    args = ap.parse_args()

    big, small = corner_extreme_singular_values()
    print(f"corner block singular values: {big:.6f} {small:.6f}")
    print("\nnilpotent corner: d, max sv deviation, p*/d")
    for d in range(2, args.max_dim + 1):
        T, closed = nilpotent_corner_channel(d)
        dev = np.max(np.abs(channel_spectrum(T).singular_values - closed.values))
        print(f"  {d:2d}  {dev:.1e}  {max_valid_exponent(T) / d:.5f}")

    print("\nscaled corner exponent bound at d=6 (2d/(1+sqrt2) = %.5f)" % (12 / (1 + math.sqrt(2))))
    for n in (1, 10, 100, 1000):
        print(f"  n={n:<5d} {scaled_corner_exponent_bound(6, n):.5f}")

    print("\nGell-Mann boundary and perturbed witness: d, eps_max, eps*, failing criteria")
    for d in range(3, args.max_dim + 1):
        eps_max, T0 = gellmann_boundary_witness(d)
        eps, cert = perturbed_identity_witness(T0, zero_multiplicity=1)
        failing = ",".join(r.criterion_id for r in cert.failing_criteria)
        print(f"  {d:2d}  {eps_max:.6f}  {eps:.3g}  {failing}")

    print("\nstochastic counterexample: d, det - 1/e, det / s_1")
    for d in range(2, args.max_dim + 1):
        S = stochastic_exp(counterexample_matrix(d))
        s = np.sort(np.linalg.svd(S, compute_uv=False))
        det = np.linalg.det(S)
        print(f"  {d:2d}  {det - math.exp(-1):+.1e}  {det / s[0]:.4f}")

    print("\nfull report on the d=4 perturbed witness:")
    _, T0 = gellmann_boundary_witness(4)
    eps, _ = perturbed_identity_witness(T0)
    for r in full_report(perturb_toward_identity(T0, eps)).reports:
        print(f"  {r.criterion_id:26s} margin {r.margin:+.3e}  {r.verdict}")


if __name__ == "__main__":
    main()

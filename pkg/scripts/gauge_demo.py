#!/usr/bin/env python3
"""Run the gauge construction on the two-axis 2d potential and report the
structural checks: off-slab Fourier support of w, symbol symmetry, and the
decay of the generator norms order by order."""

import argparse

import numpy as np

from spectra_lab.frequency import FrequencySet, GeneratorBasis, algebraic_sum, freq
from spectra_lab.gauge import CutoffFamily, run_gauge, verify_b3
from spectra_lab.symbols import XiGrid, is_symmetric, multiplication_symbol
from spectra_lab.zones import ZoneParameters, sample_annulus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rho", type=float, default=1000.0)
    ap.add_argument("--ktilde", type=int, default=2)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    basis = GeneratorBasis(None)
    S = FrequencySet.build(2, basis, [freq([1, 0], basis), freq([0, 1], basis)])
    zp = ZoneParameters.create(args.rho, 2, ktilde=args.ktilde)
    cf = CutoffFamily(args.rho, zp.beta)
    b = multiplication_symbol({freq([1, 0], basis): 0.3,
                               freq([-1, 0], basis): 0.3,
                               freq([0, 1], basis): 0.25,
                               freq([0, -1], basis): 0.25})

    out = run_gauge(b, args.ktilde, cf, S)
    rng = np.random.default_rng(args.seed)
    pts = sample_annulus(2, args.rho, args.samples, rng)

    rep = verify_b3(out, pts, S, zp)
    grid = XiGrid(pts[:200], zp.beta)
    theta_k = set(algebraic_sum(S, args.ktilde).elements)

    print(f"rho = {args.rho}, ktilde = {args.ktilde}, samples = {args.samples}")
    print(f"off-slab w check: {rep['checked']} evaluations, "
          f"{len(rep['violations'])} violations")
    print(f"supp w in Theta_{args.ktilde}: {set(out.w.support()) <= theta_k}")
    for j, p in enumerate(out.psi, 1):
        print(f"psi_{j} symmetric: {is_symmetric(p, grid)}")
    print(f"w symmetric: {is_symmetric(out.w, grid)}")


if __name__ == "__main__":
    main()

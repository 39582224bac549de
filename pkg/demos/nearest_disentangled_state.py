"""Nearest disentangled state of a rank-2 two-qubit mixture.

Solves the norm-constrained maximization for the balanced mixture at a
chosen alpha, prints the optimal ensemble in the same layout as published
parameter tables (weight, then real and imaginary factor components), and
verifies the first-order optimality certificate.

The interesting twist of this family: at alpha = 1/2 the state itself is
separable (an equal mixture of |++> and |-->), so the measure dips to
exactly zero in the middle of the family while the endpoints are Bell
projectors with half squared measure 1/2.
"""

import numpy as np

from gme import (
    MixedProblem,
    SolverConfig,
    example1,
    frobenius_norm_squared,
    kkt_residual_blocks,
    solve,
)

ALPHA = 0.35


def main():
    rho = example1(ALPHA)
    cfg = SolverConfig(starts=12, seed=0)
    result = solve(MixedProblem(rho), cfg)

    print(f"alpha                 {ALPHA}")
    print(f"||rho||_F^2           {frobenius_norm_squared(rho):.9f}")
    print(f"chi (eigenvalue)      {result.chi:.9f}")
    print(f"half squared measure  {result.measure_sq_half:.9f}")
    print(f"measure E             {result.measure:.9f}")
    print(f"certificate residual  {result.kkt_residual:.2e}")
    print(f"converged             {result.converged}")

    e = result.ensemble
    print("\nnearest disentangled ensemble (active terms):")
    header = f"{'k':>3} {'p_k':>9}" + "".join(
        f" {c:>9}" for c in ("x1(1)", "x2(1)", "x1(2)", "x2(2)",
                             "y1(1)", "y2(1)", "y1(2)", "y2(2)")
    )
    print(header)
    row_idx = 0
    for w, s in zip(e.weights, e.states):
        if w == 0.0:
            continue
        row_idx += 1
        xs = np.concatenate([np.asarray(f).real for f in s.factors])
        ys = np.concatenate([np.asarray(f).imag for f in s.factors])
        cells = "".join(f" {v:>9.4f}" for v in np.concatenate([xs, ys]))
        print(f"{row_idx:>3} {w:>9.4f}" + cells)

    print("\noptimality residual by block:")
    for name, value in kkt_residual_blocks(rho, e, result.multipliers).items():
        print(f"  {name:<16} {value:.2e}")

    mult = result.multipliers
    combo = mult.lam * frobenius_norm_squared(rho) + mult.kappa
    print(f"\nlam*||rho||^2 + kappa = {combo:.9f}  (equals chi up to the residual)")


if __name__ == "__main__":
    main()

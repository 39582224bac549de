"""Parameterized rank-2 two-qubit mixture families and the sweep driver.

Both families mix a projector supported on span{|00>, |11>} with one
supported on span{|01>, |10>}:

    rho(alpha) = alpha * |g1 00 + g2 11><...| + (1 - alpha) * |g3 01 + g4 10><...|

with unit pairs ``g1^2 + g2^2 = 1`` and ``g3^2 + g4^2 = 1``.  The balanced
case ``g = 1/sqrt(2)`` everywhere gives the symmetric family whose squared
Frobenius norm is ``1 + 2*alpha^2 - 2*alpha``; unbalanced coefficient
pairs break the symmetry of the measure about ``alpha = 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixed import MixedProblem, SolverConfig, solve
from .states import DensityMatrix, SpaceShape

TWO_QUBITS = SpaceShape((2, 2))

# Named coefficient sets for the asymmetric family.
CASE_I_GAMMA = (1 / math.sqrt(3), math.sqrt(2 / 3), 1 / math.sqrt(3), math.sqrt(2 / 3))
CASE_II_GAMMA = (1 / math.sqrt(3), math.sqrt(2 / 3), 0.5, math.sqrt(3 / 4))

GAMMA_TOL = 1e-12


def example1(alpha: float) -> DensityMatrix:
    """Symmetric family: both components are balanced Bell projectors."""
    r = 1 / math.sqrt(2)
    return example2(alpha, (r, r, r, r))


def example2(alpha: float, gamma) -> DensityMatrix:
    """General family with coefficients ``gamma = (g1, g2, g3, g4)``."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    g = tuple(float(x) for x in gamma)
    if len(g) != 4:
        raise ValueError(f"gamma must have 4 entries, got {len(g)}")
    for lo, hi in ((0, 1), (2, 3)):
        ss = g[lo] ** 2 + g[hi] ** 2
        if abs(ss - 1.0) > GAMMA_TOL:
            raise ValueError(
                f"gamma[{lo}]^2 + gamma[{hi}]^2 must be 1, got {ss!r}"
            )
    first = np.array([g[0], 0.0, 0.0, g[1]], dtype=complex)
    second = np.array([0.0, g[2], g[3], 0.0], dtype=complex)
    mat = alpha * np.outer(first, first.conj()) \
        + (1.0 - alpha) * np.outer(second, second.conj())
    return DensityMatrix(TWO_QUBITS, mat)


def default_alpha_grid() -> np.ndarray:
    """21 evenly spaced values from 0 to 1."""
    return np.linspace(0.0, 1.0, 21)


@dataclass(frozen=True)
class SweepRow:
    """One solved grid point of a sweep; ``error`` records a failure."""

    alpha: float
    chi: float
    half_e_sq: float
    kkt_residual: float
    converged: bool
    error: str | None = None


def sweep(
    family: str,
    alphas,
    config: SolverConfig | None = None,
    gamma=None,
) -> list[SweepRow]:
    """Solve the measure along an alpha grid; one row per grid point.

    ``family`` is ``"example1"`` (balanced) or ``"example2"`` (requires
    ``gamma``).  A failing grid point produces a row with NaN values and
    the error message instead of aborting the sweep; row order follows the
    input grid.
    """
    if family == "example1":
        build = example1
    elif family == "example2":
        if gamma is None:
            raise ValueError("family 'example2' requires gamma coefficients")
        def build(alpha, _g=tuple(gamma)):
            return example2(alpha, _g)
    else:
        raise ValueError(f"unknown family {family!r}")

    cfg = config or SolverConfig()
    rows = []
    for alpha in alphas:
        alpha = float(alpha)
        try:
            rho = build(alpha)
            result = solve(MixedProblem(rho, num_terms=cfg.num_terms), cfg)
            rows.append(
                SweepRow(
                    alpha=alpha,
                    chi=result.chi,
                    half_e_sq=result.measure_sq_half,
                    kkt_residual=result.kkt_residual,
                    converged=result.converged,
                )
            )
        except (ValueError, FloatingPointError) as exc:
            rows.append(
                SweepRow(
                    alpha=alpha,
                    chi=float("nan"),
                    half_e_sq=float("nan"),
                    kkt_residual=float("nan"),
                    converged=False,
                    error=str(exc),
                )
            )
    return rows

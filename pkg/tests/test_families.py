"""The rank-2 two-qubit mixture families and the sweep driver."""

import math

import numpy as np
import pytest

from gme.families import (
    CASE_I_GAMMA,
    CASE_II_GAMMA,
    default_alpha_grid,
    example1,
    example2,
    sweep,
)
from gme.mixed import SolverConfig
from gme.states import DensityMatrix, bell_state, frobenius_norm_squared

FAST = SolverConfig(starts=5, seed=0)


class TestConstructors:
    def test_alpha_one_is_bell_projector(self):
        rho = example1(1.0)
        expected = DensityMatrix.from_pure(bell_state())
        np.testing.assert_allclose(rho.entries, expected.entries, atol=1e-15)

    def test_alpha_zero_is_cross_bell_projector(self):
        rho = example1(0.0)
        v = np.array([0, 1, 1, 0]) / math.sqrt(2)
        np.testing.assert_allclose(rho.entries, np.outer(v, v), atol=1e-15)

    def test_norm_identity_on_grid(self):
        for alpha in np.linspace(0, 1, 101):
            rho = example1(alpha)
            assert frobenius_norm_squared(rho) == pytest.approx(
                1 + 2 * alpha**2 - 2 * alpha, abs=1e-14
            )

    def test_example2_reduces_to_example1(self):
        r = 1 / math.sqrt(2)
        for alpha in (0.0, 0.3, 0.8):
            a = example1(alpha)
            b = example2(alpha, (r, r, r, r))
            np.testing.assert_allclose(a.entries, b.entries, atol=1e-14)

    def test_named_cases_are_normalized(self):
        for g in (CASE_I_GAMMA, CASE_II_GAMMA):
            assert g[0] ** 2 + g[1] ** 2 == pytest.approx(1.0, abs=1e-12)
            assert g[2] ** 2 + g[3] ** 2 == pytest.approx(1.0, abs=1e-12)
        # The second pair of Case II is the quarter/three-quarter split.
        assert CASE_II_GAMMA[2] == pytest.approx(0.5, abs=1e-15)

    def test_constructors_valid_for_random_parameters(self, rng):
        # DensityMatrix validation runs inside the constructors.
        for _ in range(1000):
            alpha = rng.uniform(0, 1)
            t1, t2 = rng.uniform(0, np.pi / 2, size=2)
            example2(alpha, (np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)))

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError, match="alpha"):
            example1(1.2)

    def test_gamma_normalization_enforced(self):
        with pytest.raises(ValueError, match="gamma"):
            example2(0.5, (0.9, 0.9, 0.5, math.sqrt(0.75)))

    def test_rank_at_most_two(self):
        for alpha in (0.0, 0.4, 1.0):
            evals = np.linalg.eigvalsh(example1(alpha).entries)
            assert np.sum(evals > 1e-12) <= 2


class TestSweep:
    def test_rows_preserve_order_and_converge(self):
        alphas = [0.0, 0.5, 1.0]
        rows = sweep("example1", alphas, FAST)
        assert [r.alpha for r in rows] == alphas
        assert all(r.error is None for r in rows)
        assert rows[0].half_e_sq == pytest.approx(0.5, abs=1e-3)
        assert rows[2].half_e_sq == pytest.approx(0.5, abs=1e-3)
        assert rows[1].half_e_sq == pytest.approx(0.0, abs=1e-5)

    def test_bad_alpha_recorded_not_raised(self):
        rows = sweep("example1", [0.5, 1.5], FAST)
        assert rows[0].error is None
        assert rows[1].error is not None
        assert math.isnan(rows[1].chi)

    def test_example2_requires_gamma(self):
        with pytest.raises(ValueError, match="gamma"):
            sweep("example2", [0.5], FAST)

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="family"):
            sweep("example3", [0.5], FAST)

    def test_default_grid(self):
        grid = default_alpha_grid()
        assert len(grid) == 21
        assert grid[0] == 0.0
        assert grid[-1] == 1.0
        assert np.allclose(np.diff(grid), 0.05)

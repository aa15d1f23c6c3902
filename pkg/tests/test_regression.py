import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausscond.checks import random_gaussian
from gausscond.errors import DimError, XInSubspace
from gausscond.gaussian import Gaussian, sample
from gausscond.regression import (
    extended_projection_delta,
    partial_out,
    partial_out_identity_check,
)
from gausscond.spectral import SymOperator, frob, maxabs, orthonormal_columns


def _law(mean, cov):
    return Gaussian(np.asarray(mean, dtype=float), SymOperator(np.asarray(cov, dtype=float)))


def _schur_conditional_cov(d):
    """Covariance of the first two coordinates given the rest, full-rank case."""
    d = np.asarray(d, dtype=float)
    a = d[:2, :2]
    b = d[:2, 2:]
    c = d[2:, 2:]
    return a - b @ np.linalg.solve(c, b.T)


class TestPartialOut:
    def test_matches_schur_complement(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            g = random_gaussian(rng, 4, 4)
            res = partial_out(g)
            cc = _schur_conditional_cov(g.cov.entries)
            coef = cc[0, 1] / cc[0, 0]
            assert res.cond_var_x == pytest.approx(cc[0, 0], abs=1e-9)
            assert res.cond_cov_xy == pytest.approx(cc[0, 1], abs=1e-9)
            assert res.coefficient == pytest.approx(coef, abs=1e-8)
            assert not res.degenerate

    def test_three_dim_hand_computed(self):
        # Cov [[2,1,1],[1,2,0],[1,0,1]]: given Y3, residual variance of Y1
        # is 2 - 1 = 1 and residual covariance with Y2 is 1 - 0 = 1.
        d = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 0.0], [1.0, 0.0, 1.0]])
        res = partial_out(_law([0.0, 0.0, 0.0], d))
        assert res.cond_var_x == pytest.approx(1.0, abs=1e-12)
        assert res.cond_cov_xy == pytest.approx(1.0, abs=1e-12)
        assert res.coefficient == pytest.approx(1.0, abs=1e-12)

    def test_requires_three_coordinates(self):
        with pytest.raises(DimError):
            partial_out(_law([0.0, 0.0], np.eye(2)))

    @given(st.integers(0, 10_000), st.booleans())
    @settings(max_examples=30, deadline=None)
    def test_identity_on_random_instances(self, seed, full_rank):
        rng = np.random.default_rng(seed)
        g = random_gaussian(rng, 4, 4 if full_rank else 3)
        y = sample(g, 1, seed)[0]
        res = partial_out(g)
        scale = 1.0 + abs(res.coefficient) * (1.0 + maxabs(y))
        assert partial_out_identity_check(g, y) <= 1e-8 * scale

    def test_degenerate_direction_in_conditioning_span(self):
        # D = F^2 with F e1 = F e3 + F e4: the conditional variance of the
        # first coordinate given the others vanishes, the coefficient is a
        # hard zero, and the identity still holds.
        rng = np.random.default_rng(3)
        u = np.array([1.0, 0.0, -1.0, -1.0])
        u /= np.linalg.norm(u)
        comp = orthonormal_columns(np.eye(4) - np.outer(u, u))
        f = (comp * rng.uniform(0.5, 2.0, comp.shape[1])) @ comp.T
        d = f @ f
        g = _law([0.5, -0.5, 1.0, 0.0], (d + d.T) / 2.0)
        res = partial_out(g)
        assert res.degenerate
        assert res.coefficient == 0.0
        assert res.cond_var_x <= res.rank_tol_scale * 1e-12 * (1.0 + frob(d))
        y = sample(g, 1, 1)[0]
        assert partial_out_identity_check(g, y) <= 1e-8

    def test_independent_coordinates_give_zero_coefficient(self):
        res = partial_out(_law([0.0] * 3, np.diag([1.0, 2.0, 3.0])))
        assert res.coefficient == pytest.approx(0.0, abs=1e-14)
        assert not res.degenerate


class TestExtendedProjectionDelta:
    def test_matches_direct_projection_difference(self):
        rng = np.random.default_rng(5)
        for k in range(20):
            dim_v = int(rng.integers(0, 5))
            basis = rng.standard_normal((6, dim_v))
            x = rng.standard_normal(6)
            y = rng.standard_normal(6)
            delta = extended_projection_delta(basis, x, y)
            q_small = orthonormal_columns(basis)
            q_big = orthonormal_columns(np.column_stack([basis, x]))
            direct = q_big @ (q_big.T @ y) - q_small @ (q_small.T @ y)
            assert maxabs(delta - direct) <= 1e-10

    def test_empty_subspace(self):
        x = np.array([2.0, 0.0, 0.0])
        y = np.array([3.0, 4.0, 5.0])
        delta = extended_projection_delta(np.zeros((3, 0)), x, y)
        assert np.allclose(delta, [3.0, 0.0, 0.0], atol=1e-14)

    def test_row_layout_accepted(self):
        rng = np.random.default_rng(6)
        basis_cols = rng.standard_normal((6, 2))
        x = rng.standard_normal(6)
        y = rng.standard_normal(6)
        a = extended_projection_delta(basis_cols, x, y)
        b = extended_projection_delta(basis_cols.T, x, y)
        assert maxabs(a - b) <= 1e-12

    def test_x_inside_subspace_rejected(self):
        basis = np.eye(4)[:, :2]
        with pytest.raises(XInSubspace):
            extended_projection_delta(basis, np.array([1.0, -2.0, 0.0, 0.0]), np.ones(4))

    def test_dim_mismatch(self):
        with pytest.raises(DimError):
            extended_projection_delta(np.zeros((3, 1)), np.ones(3), np.ones(4))

    def test_orthogonal_to_old_subspace(self):
        rng = np.random.default_rng(12)
        basis = rng.standard_normal((5, 3))
        delta = extended_projection_delta(basis, rng.standard_normal(5), rng.standard_normal(5))
        assert maxabs(basis.T @ delta) <= 1e-10 * (1.0 + frob(basis))

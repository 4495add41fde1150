"""Change-of-variable transforms: all four variants and their builders."""

import numpy as np
import pytest

from dense_oracles import assemble_blockdiag, assemble_step_residual_matrix
from wc4dvar import (
    CovarianceSet,
    LinearizationState,
    ModelConfig,
    Preconditioner,
    apply_error_cov_sqrt,
    apply_transform,
    apply_transform_t,
    build_lowrank_linv,
    build_lowrank_s,
    integrate,
    make_covariance,
    make_preconditioner,
    scaled_strict_propagation,
    strict_propagation,
)
from wc4dvar.precond import propagation_tail_operator


def identity_lin(rng, n=4, window=3, sigma_b=0.2, sigma_q=0.05):
    model = ModelConfig(n=n, forcing=8.0, dt=0.025)
    covs = CovarianceSet(
        make_covariance(np.eye(n), sigma_b),
        (make_covariance(np.eye(n), sigma_q),) * window,
    )
    ref = integrate(model, 8.0 + rng.standard_normal(n), window)
    return LinearizationState(model, ref, covs)


class TestVariants:
    def test_none_is_identity(self, tiny_problem, rng):
        prec = make_preconditioner("none", tiny_problem.lin)
        v = rng.standard_normal(tiny_problem.lin.reference.shape)
        np.testing.assert_array_equal(apply_transform(prec, v), v)
        np.testing.assert_array_equal(apply_transform_t(prec, v), v)

    def test_unknown_variant_rejected(self, tiny_problem):
        with pytest.raises(ValueError):
            make_preconditioner("cholesky", tiny_problem.lin)

    def test_exact_matches_dense(self, tiny_problem, rng):
        lin = tiny_problem.lin
        prec = make_preconditioner("exact", lin)
        dense = np.linalg.inv(assemble_step_residual_matrix(lin)) @ assemble_blockdiag(lin, "sqrt")
        v = rng.standard_normal(lin.reference.shape)
        np.testing.assert_allclose(
            apply_transform(prec, v).reshape(-1),
            dense @ v.reshape(-1),
            rtol=0,
            atol=1e-10 * np.abs(dense @ v.reshape(-1)).max(),
        )
        np.testing.assert_allclose(
            apply_transform_t(prec, v).reshape(-1),
            dense.T @ v.reshape(-1),
            rtol=0,
            atol=1e-10 * np.abs(dense.T @ v.reshape(-1)).max(),
        )

    def test_rank_zero_degenerates_to_cov_sqrt(self, tiny_problem, rng):
        lin = tiny_problem.lin
        v = rng.standard_normal(lin.reference.shape)
        for prec in (build_lowrank_linv(lin, 0), build_lowrank_s(lin, 0)):
            np.testing.assert_array_equal(apply_transform(prec, v), apply_error_cov_sqrt(lin, v))
            np.testing.assert_array_equal(
                apply_transform_t(prec, v), apply_error_cov_sqrt(lin, v)
            )

    @pytest.mark.parametrize("kind,k", [("none", 0), ("exact", 0), ("lowrank-linv", 4), ("lowrank-s", 4)])
    def test_adjoint_consistency(self, tiny_problem, rng, kind, k):
        prec = make_preconditioner(kind, tiny_problem.lin, k, 5, np.random.default_rng(3))
        for _ in range(20):
            u = rng.standard_normal(tiny_problem.lin.reference.shape)
            v = rng.standard_normal(tiny_problem.lin.reference.shape)
            lhs = float(np.vdot(apply_transform(prec, u), v))
            rhs = float(np.vdot(u, apply_transform_t(prec, v)))
            assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), 1e-300)


class TestBuilders:
    def test_full_rank_matches_exact(self, rng):
        # rank(P) <= n * window = 12, so k = 12 recovers the exact transform
        lin = identity_lin(rng)
        with pytest.warns(UserWarning, match="rank deficient"):
            lr = build_lowrank_linv(lin, 12, 4, np.random.default_rng(17))
        exact = make_preconditioner("exact", lin)
        for _ in range(5):
            v = rng.standard_normal(lin.reference.shape)
            np.testing.assert_allclose(
                apply_transform(lr, v), apply_transform(exact, v), rtol=0, atol=1e-8
            )

    def test_scaled_full_rank_matches_exact(self, rng):
        lin = identity_lin(rng)
        with pytest.warns(UserWarning, match="rank deficient"):
            lr = build_lowrank_s(lin, 12, 4, np.random.default_rng(18))
        exact = make_preconditioner("exact", lin)
        for _ in range(5):
            v = rng.standard_normal(lin.reference.shape)
            np.testing.assert_allclose(
                apply_transform(lr, v), apply_transform(exact, v), rtol=0, atol=1e-8
            )

    def test_identity_covariances_collapse_scaled_to_plain(self, rng):
        # with unit B and Q the scaled tail equals the plain tail
        lin = identity_lin(rng, sigma_b=1.0, sigma_q=1.0)
        v = rng.standard_normal(lin.reference.shape)
        np.testing.assert_allclose(
            scaled_strict_propagation(lin, v), strict_propagation(lin, v), rtol=0, atol=1e-13
        )

    def test_single_block_window_gives_zero_factors(self, rng):
        model = ModelConfig(n=5)
        covs = CovarianceSet(make_covariance(np.eye(5), 0.2), ())
        lin = LinearizationState(model, np.full((1, 5), 8.0), covs)
        with pytest.warns(UserWarning, match="rank deficient"):
            prec = build_lowrank_linv(lin, 2, 2, np.random.default_rng(4))
        np.testing.assert_array_equal(prec.factors.singular_values, np.zeros(2))
        v = rng.standard_normal((1, 5))
        np.testing.assert_allclose(
            apply_transform(prec, v), apply_error_cov_sqrt(lin, v), rtol=0, atol=1e-12
        )

    def test_tail_operator_blocks_roundtrip(self, tiny_problem, rng):
        op = propagation_tail_operator(tiny_problem.lin)
        block = rng.standard_normal((op.dim, 3))
        out = op.matmat(block)
        for c in range(3):
            expected = strict_propagation(
                tiny_problem.lin, block[:, c].reshape(tiny_problem.lin.reference.shape)
            )
            np.testing.assert_array_equal(out[:, c], expected.reshape(-1))

    def test_missing_factors_rejected(self, tiny_problem):
        with pytest.raises(ValueError):
            Preconditioner("lowrank-s", tiny_problem.lin, None)
        with pytest.raises(ValueError):
            Preconditioner("exact", None)

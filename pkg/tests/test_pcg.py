"""Traced conjugate-gradient solver against a dense direct solve."""

import numpy as np
import pytest

from conftest import small_problem
from dense_oracles import assemble_hessian, assemble_rhs
from wc4dvar import (
    CovarianceSet,
    InnerProblem,
    LinearizationState,
    ModelConfig,
    ObservationSet,
    SolverConfig,
    compute_mismatches,
    integrate,
    make_covariance,
    make_preconditioner,
    pcg_solve,
    quadratic_cost,
    read_trace_csv,
    write_trace_csv,
)

TOL_CFG = SolverConfig(max_iterations=300, residual_tolerance=1e-12, fixed_iterations=False)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(max_iterations=0)
        with pytest.raises(ValueError):
            SolverConfig(residual_tolerance=0.0)


class TestTrivialSolves:
    def test_identity_system_converges_in_one_iteration(self, rng):
        model = ModelConfig(n=6)
        covs = CovarianceSet(make_covariance(np.eye(6), 1.0), ())
        lin = LinearizationState(model, 8.0 + rng.standard_normal((1, 6)), covs)
        obs = ObservationSet((), (), (), 1.0)
        mismatch = rng.standard_normal((1, 6))
        problem = InnerProblem(lin, obs, mismatch, np.zeros(0))
        prec = make_preconditioner("none", lin)
        dx, trace = pcg_solve(problem, prec, TOL_CFG)
        assert trace.status == "converged"
        assert len(trace) == 2  # record 0 plus one iteration
        np.testing.assert_allclose(dx, mismatch, rtol=0, atol=1e-12)

    def test_zero_rhs_returns_zero(self, rng):
        model = ModelConfig(n=5)
        covs = CovarianceSet(make_covariance(np.eye(5), 0.2), ())
        lin = LinearizationState(model, np.full((1, 5), 8.0), covs)
        obs = ObservationSet((), (), (), 1.0)
        problem = InnerProblem(lin, obs, np.zeros((1, 5)), np.zeros(0))
        dx, trace = pcg_solve(problem, make_preconditioner("none", lin), TOL_CFG)
        assert len(trace) == 1
        assert trace.status == "converged"
        np.testing.assert_array_equal(dx, np.zeros((1, 5)))

    def test_record_zero_is_initial_cost(self, tiny_problem):
        prec = make_preconditioner("none", tiny_problem.lin)
        _, trace = pcg_solve(tiny_problem, prec, SolverConfig(max_iterations=3))
        assert trace.iterations[0] == 0
        assert trace.costs[0] == quadratic_cost(tiny_problem, None)


class TestAgainstDenseSolve:
    @pytest.mark.parametrize("kind,k", [("none", 0), ("exact", 0), ("lowrank-linv", 6), ("lowrank-s", 6)])
    def test_matches_direct_solve(self, tiny_problem, kind, k):
        dense = assemble_hessian(tiny_problem.lin, tiny_problem.obs)
        rhs = assemble_rhs(
            tiny_problem.lin, tiny_problem.obs, tiny_problem.state_mismatch, tiny_problem.innovation
        )
        expected = np.linalg.solve(dense, rhs)
        prec = make_preconditioner(kind, tiny_problem.lin, k, 5, np.random.default_rng(5))
        dx, trace = pcg_solve(tiny_problem, prec, TOL_CFG)
        assert trace.status == "converged"
        rel = np.linalg.norm(dx.reshape(-1) - expected) / np.linalg.norm(expected)
        assert rel < 1e-8

    def test_solution_invariant_across_preconditioners(self, tiny_problem):
        results = {}
        for kind, k in [("none", 0), ("exact", 0), ("lowrank-s", 6)]:
            prec = make_preconditioner(kind, tiny_problem.lin, k, 5, np.random.default_rng(5))
            dx, _ = pcg_solve(tiny_problem, prec, TOL_CFG)
            results[kind] = dx.reshape(-1)
        base = results["none"]
        for kind in ("exact", "lowrank-s"):
            rel = np.linalg.norm(results[kind] - base) / np.linalg.norm(base)
            assert rel < 1e-6, kind

    def test_monotone_cost_traces(self, tiny_problem):
        for kind, k in [("none", 0), ("exact", 0), ("lowrank-linv", 4), ("lowrank-s", 4)]:
            prec = make_preconditioner(kind, tiny_problem.lin, k, 5, np.random.default_rng(6))
            _, trace = pcg_solve(tiny_problem, prec, SolverConfig(max_iterations=40))
            costs = np.array(trace.costs)
            assert np.all(costs[1:] <= costs[:-1] * (1 + 1e-10)), kind


class TestSpectrumDrivenConvergence:
    def test_exact_transform_converges_within_p_plus_one(self):
        # noiseless observations of the truth, perturbed background:
        # the transformed system is identity plus a rank-p term
        rng = np.random.default_rng(12)
        base = small_problem(seed=12)
        lin = base.lin
        truth = integrate(lin.cfg, lin.reference[0] + 0.05 * rng.standard_normal(5), 4)
        obs = ObservationSet(
            times=base.obs.times,
            components=base.obs.components,
            values=tuple(truth[t][c] for t, c in zip(base.obs.times, base.obs.components)),
            sigma_obs=base.obs.sigma_obs,
        )
        mismatch, innovation = compute_mismatches(lin, lin.reference[0], obs)
        problem = InnerProblem(lin, obs, mismatch, innovation)
        prec = make_preconditioner("exact", lin)
        cfg = SolverConfig(max_iterations=obs.total + 1, residual_tolerance=1e-10, fixed_iterations=False)
        _, trace = pcg_solve(problem, prec, cfg)
        assert trace.status == "converged"
        assert trace.iterations[-1] <= obs.total + 1


class TestFixedIterationMode:
    def test_runs_exactly_max_iterations(self, tiny_problem):
        prec = make_preconditioner("none", tiny_problem.lin)
        _, trace = pcg_solve(tiny_problem, prec, SolverConfig(max_iterations=17))
        assert trace.status == "max-iter"
        assert trace.iterations[-1] == 17
        assert len(trace) == 18


class TestTraceCsv:
    def test_roundtrip_and_format(self, tiny_problem, tmp_path):
        prec = make_preconditioner("none", tiny_problem.lin)
        _, trace = pcg_solve(tiny_problem, prec, SolverConfig(max_iterations=5))
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        raw = path.read_bytes()
        assert b"\r" not in raw  # LF endings only
        lines = raw.decode().splitlines()
        assert lines[0] == "iteration,cost,resnorm"
        assert len(lines) == len(trace) + 1
        # 17 significant digits survive the round trip exactly
        back = read_trace_csv(path)
        np.testing.assert_array_equal(np.array(back.costs), np.array(trace.costs))
        np.testing.assert_array_equal(np.array(back.resnorms), np.array(trace.resnorms))

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_trace_csv(path)

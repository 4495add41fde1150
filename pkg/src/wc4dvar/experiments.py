"""Identical-twin experiment harness.

Builds the twin data (truth trajectory, noisy background, noisy direct
observations), assembles the inner problem linearised at the propagated
background, runs the traced solves for the three observation cases, drives
ensembles over sketch realisations, performs outer Gauss-Newton updates,
and dumps singular-value tables.

Random streams are split by purpose (truth, background noise, observation
noise, sketch) so that ensembles vary only the sketch stream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .covariance import (
    LAPLACIAN,
    SOAR,
    CorrelationSpec,
    CovarianceSet,
    build_correlation,
    make_covariance,
    sample_gaussian,
)
from .lorenz96 import ModelConfig, ModelOverflowError, integrate
from .operators import (
    InnerProblem,
    LinearizationState,
    ObservationSet,
    compute_mismatches,
    nonlinear_cost,
)
from .pcg import BREAKDOWN, SolveTrace, SolverConfig, pcg_solve
from .precond import (
    Preconditioner,
    make_preconditioner,
    propagation_tail_operator,
    scaled_propagation_tail_operator,
)
from .rsvd import rsvd

#: case id -> (observation error std, total observation count)
CASES = {1: (1.5e-1, 300), 2: (4.5e-1, 300), 3: (1.5e-1, 60)}

SPINUP_STEPS = 500
TRUTH_PERTURBATION_STD = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved twin-experiment configuration.

    The observation error std and total count are fixed by the case id.
    The model-error std and correlation length scale switch together when
    ``large_model_error`` is set; ``cq_lengthscale_factor`` can still be
    pinned explicitly to run the other reading of that variant.
    """

    case: int = 1
    n: int = 100
    forcing: float = 8.0
    dt: float = 2.5e-2
    window: int = 149
    sigma_background: float = 0.2
    background_lengthscale_factor: float = 2.0  # times dx
    sigma_model_error: float = 0.05
    model_error_lengthscale_factor: float = 0.75  # times dx
    precond: str = "none"
    rank: int = 30
    oversample: int = 5
    seed_truth: int = 1000
    seed_noise: int = 2000
    seed_sketch: int = 3000
    iterations: int = 100
    outer_iterations: int = 1

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise ValueError(f"case must be one of {sorted(CASES)}, got {self.case}")
        for name in ("n", "window", "iterations", "outer_iterations"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def for_case(
        cls,
        case: int,
        large_model_error: bool = False,
        cq_lengthscale_factor: float | None = None,
        **overrides,
    ) -> "ExperimentConfig":
        """Resolve a configuration from the case id and variant switches."""
        params = dict(case=case)
        if large_model_error:
            params["sigma_model_error"] = 0.1
            params["model_error_lengthscale_factor"] = 2.0
        if cq_lengthscale_factor is not None:
            params["model_error_lengthscale_factor"] = cq_lengthscale_factor
        params.update(overrides)
        return cls(**params)

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @property
    def sigma_obs(self) -> float:
        return CASES[self.case][0]

    @property
    def obs_total(self) -> int:
        return CASES[self.case][1]

    @property
    def obs_times(self) -> tuple[int, ...]:
        """Every 10th step, placed so the final time is observed."""
        return tuple(range(9, self.window + 1, 10))

    @property
    def obs_per_time(self) -> int:
        times = self.obs_times
        if self.obs_total % len(times):
            raise ValueError(
                f"{self.obs_total} observations do not spread evenly over {len(times)} times"
            )
        return self.obs_total // len(times)

    @property
    def model(self) -> ModelConfig:
        return ModelConfig(n=self.n, forcing=self.forcing, dt=self.dt)

    def as_items(self) -> list[tuple[str, str]]:
        """Resolved configuration as (key, value) pairs for provenance dumps."""
        items = [
            ("case", str(self.case)),
            ("n", str(self.n)),
            ("forcing", repr(self.forcing)),
            ("dt", repr(self.dt)),
            ("window", str(self.window)),
            ("dx", repr(self.dx)),
            ("sigma_background", repr(self.sigma_background)),
            ("background_lengthscale", repr(self.background_lengthscale_factor * self.dx)),
            ("sigma_model_error", repr(self.sigma_model_error)),
            ("model_error_lengthscale", repr(self.model_error_lengthscale_factor * self.dx)),
            ("sigma_obs", repr(self.sigma_obs)),
            ("obs_total", str(self.obs_total)),
            ("obs_times", ",".join(map(str, self.obs_times))),
            ("obs_per_time", str(self.obs_per_time)),
            ("precond", self.precond),
            ("rank", str(self.rank)),
            ("oversample", str(self.oversample)),
            ("seed_truth", str(self.seed_truth)),
            ("seed_noise", str(self.seed_noise)),
            ("seed_sketch", str(self.seed_sketch)),
            ("iterations", str(self.iterations)),
            ("outer_iterations", str(self.outer_iterations)),
        ]
        return items


@dataclass(frozen=True)
class TwinData:
    """Truth trajectory, noisy background state, and noisy observations."""

    truth: np.ndarray  # (N+1, n)
    background: np.ndarray  # (n,)
    observations: ObservationSet


def build_covariances(cfg: ExperimentConfig) -> CovarianceSet:
    """Background and per-step model-error covariance operators."""
    corr_b = build_correlation(
        CorrelationSpec(SOAR, cfg.n, cfg.dx, cfg.background_lengthscale_factor * cfg.dx)
    )
    corr_q = build_correlation(
        CorrelationSpec(LAPLACIAN, cfg.n, cfg.dx, cfg.model_error_lengthscale_factor * cfg.dx)
    )
    background = make_covariance(corr_b, cfg.sigma_background)
    model_error = make_covariance(corr_q, cfg.sigma_model_error)
    return CovarianceSet(background=background, model_error=(model_error,) * cfg.window)


def observation_components(n: int, per_time: int) -> np.ndarray:
    """Evenly spaced observed grid indices starting at 0."""
    if per_time > n:
        raise ValueError("cannot observe more components than the state has")
    return (np.arange(per_time) * n) // per_time


def generate_truth(
    cfg: ExperimentConfig,
    rng: np.random.Generator,
    perturbation_std: float = TRUTH_PERTURBATION_STD,
) -> np.ndarray:
    """Spin up from a perturbed equilibrium and return the window trajectory.

    The equilibrium state is perturbed with small Gaussian noise, integrated
    for a fixed spin-up period that is discarded, and the window trajectory
    starts from the spun-up state. Overflow during spin-up retries with
    fresh noise (at most 5 attempts).
    """
    model = cfg.model
    equilibrium = np.full(cfg.n, cfg.forcing)
    for _ in range(5):
        x0 = equilibrium + perturbation_std * rng.standard_normal(cfg.n)
        try:
            spun = integrate(model, x0, SPINUP_STEPS)[-1]
            return integrate(model, spun, cfg.window)
        except ModelOverflowError:
            continue
    raise ModelOverflowError("truth generation overflowed in 5 consecutive attempts")


def generate_twin(
    cfg: ExperimentConfig,
    truth_rng: np.random.Generator | None = None,
    noise_rng: np.random.Generator | None = None,
) -> TwinData:
    """Generate twin data: truth, perturbed background, noisy observations.

    The noise seed is split into independent background-noise and
    observation-noise streams.
    """
    truth_rng = truth_rng or np.random.default_rng(cfg.seed_truth)
    if noise_rng is None:
        bg_seq, obs_seq = np.random.SeedSequence(cfg.seed_noise).spawn(2)
        bg_rng = np.random.default_rng(bg_seq)
        obs_rng = np.random.default_rng(obs_seq)
    else:
        bg_rng = obs_rng = noise_rng

    truth = generate_truth(cfg, truth_rng)
    covs = build_covariances(cfg)
    background = truth[0] + sample_gaussian(covs.background, bg_rng)

    comps = observation_components(cfg.n, cfg.obs_per_time)
    times = cfg.obs_times
    values = tuple(
        truth[t][comps] + cfg.sigma_obs * obs_rng.standard_normal(comps.size) for t in times
    )
    obs = ObservationSet(
        times=times,
        components=(comps,) * len(times),
        values=values,
        sigma_obs=cfg.sigma_obs,
    )
    obs.validate(cfg.n, cfg.window)
    return TwinData(truth=truth, background=background, observations=obs)


def reference_trajectory(cfg: ExperimentConfig, background: np.ndarray) -> np.ndarray:
    """Initial outer trajectory: the background propagated by the nonlinear
    model, which makes the state mismatch vanish at the first outer step."""
    return integrate(cfg.model, background, cfg.window)


def build_inner_problem(
    cfg: ExperimentConfig,
    twin: TwinData,
    reference: np.ndarray | None = None,
    covs: CovarianceSet | None = None,
) -> InnerProblem:
    """Assemble the inner problem linearised at ``reference`` (default: the
    propagated background)."""
    covs = covs if covs is not None else build_covariances(cfg)
    if reference is None:
        reference = reference_trajectory(cfg, twin.background)
    lin = LinearizationState(cfg.model, reference, covs)
    mismatch, innovation = compute_mismatches(lin, twin.background, twin.observations)
    return InnerProblem(lin, twin.observations, mismatch, innovation)


def _solver_config(cfg: ExperimentConfig) -> SolverConfig:
    return SolverConfig(max_iterations=cfg.iterations, fixed_iterations=True)


def solve_inner(
    cfg: ExperimentConfig,
    prob: InnerProblem,
    sketch_rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, SolveTrace, Preconditioner]:
    """Build the configured preconditioner and run the traced solve."""
    rng = sketch_rng or np.random.default_rng(cfg.seed_sketch)
    prec = make_preconditioner(cfg.precond, prob.lin, cfg.rank, cfg.oversample, rng)
    dx, trace = pcg_solve(prob, prec, _solver_config(cfg))
    return dx, trace, prec


def run_inner(cfg: ExperimentConfig, twin: TwinData) -> SolveTrace:
    """One inner solve at the propagated-background linearisation."""
    prob = build_inner_problem(cfg, twin)
    _, trace, _ = solve_inner(cfg, prob)
    return trace


@dataclass
class EnsembleResult:
    """Per-iteration cost statistics over sketch realisations."""

    member_traces: list[SolveTrace]
    mean: np.ndarray
    min: np.ndarray
    max: np.ndarray
    std: np.ndarray
    breakdown_count: int = 0

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(len(self.mean))


def run_ensemble(cfg: ExperimentConfig, twin: TwinData, realisations: int) -> EnsembleResult:
    """Repeat the inner solve over ``realisations`` sketch streams.

    The twin data and the linearisation are shared; only the Gaussian test
    matrix changes. Members that break down are excluded from the statistics
    and counted.
    """
    if realisations < 1:
        raise ValueError("realisations must be >= 1")
    prob = build_inner_problem(cfg, twin)
    seeds = np.random.SeedSequence(cfg.seed_sketch).spawn(realisations)

    traces: list[SolveTrace] = []
    for seq in seeds:
        _, trace, _ = solve_inner(cfg, prob, np.random.default_rng(seq))
        traces.append(trace)

    complete = [t for t in traces if t.status != BREAKDOWN]
    if not complete:
        raise RuntimeError("every ensemble member broke down")
    costs = np.array([t.costs for t in complete])  # (members, iters+1)
    return EnsembleResult(
        member_traces=traces,
        mean=costs.mean(axis=0),
        min=costs.min(axis=0),
        max=costs.max(axis=0),
        std=costs.std(axis=0),
        breakdown_count=len(traces) - len(complete),
    )


def gauss_newton(
    cfg: ExperimentConfig, twin: TwinData, outer: int | None = None
) -> tuple[np.ndarray, list[float]]:
    """Outer loop: linearise, solve the inner problem, add the increment.

    Returns the final trajectory and the nonlinear cost history (evaluated
    before the first update and after every update). A cost increase across
    an outer step warns; there is no line search.
    """
    outer = cfg.outer_iterations if outer is None else outer
    if outer < 1:
        raise ValueError("outer iteration count must be >= 1")
    covs = build_covariances(cfg)
    x = reference_trajectory(cfg, twin.background)
    costs = [nonlinear_cost(cfg.model, covs, twin.background, twin.observations, x)]
    sketch_seeds = np.random.SeedSequence(cfg.seed_sketch).spawn(outer)
    for j in range(outer):
        prob = build_inner_problem(cfg, twin, reference=x, covs=covs)
        dx, _, _ = solve_inner(cfg, prob, np.random.default_rng(sketch_seeds[j]))
        x = x + dx
        costs.append(nonlinear_cost(cfg.model, covs, twin.background, twin.observations, x))
        if costs[-1] > costs[-2]:
            warnings.warn(
                f"nonlinear cost increased at outer step {j + 1}: "
                f"{costs[-2]:.6g} -> {costs[-1]:.6g}",
                stacklevel=2,
            )
    return x, costs


REDUCED_SCALE = dict(n=20, window=29)


@dataclass
class SingularValueTable:
    """Leading singular values: sketch approximations per rank, and the dense
    reference spectrum when the scale permits computing it."""

    which: str
    ranks: tuple[int, ...]
    approximations: dict[int, np.ndarray]
    exact: np.ndarray | None = None


def singular_value_table(
    cfg: ExperimentConfig,
    which: str,
    ranks: tuple[int, ...],
    seed: int | None = None,
    reduced_scale: bool = False,
) -> SingularValueTable:
    """Approximate leading singular values of the strict propagation map
    (``which='P'``) or its covariance-scaled form (``which='W'``).

    One Gaussian test matrix is drawn at the widest requested rank and
    narrower runs use its leading columns, so all ranks share the same seed
    and their sketches are nested. At reduced scale the operator is also
    assembled densely for the reference spectrum.
    """
    if which not in ("P", "W"):
        raise ValueError("which must be 'P' or 'W'")
    if not ranks:
        raise ValueError("at least one rank is required")
    if reduced_scale:
        cfg = replace(cfg, **REDUCED_SCALE)

    # the sketched operators do not involve the observation terms, so only
    # the reference trajectory and the covariances are needed
    truth_rng = np.random.default_rng(cfg.seed_truth)
    bg_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed_noise).spawn(2)[0])
    covs = build_covariances(cfg)
    truth = generate_truth(cfg, truth_rng)
    background = truth[0] + sample_gaussian(covs.background, bg_rng)
    lin = LinearizationState(cfg.model, reference_trajectory(cfg, background), covs)
    op = (
        propagation_tail_operator(lin)
        if which == "P"
        else scaled_propagation_tail_operator(lin)
    )

    seed = cfg.seed_sketch if seed is None else seed
    widest = max(ranks) + cfg.oversample
    sketch = np.random.default_rng(seed).standard_normal((op.dim, widest))

    approximations = {
        k: rsvd(op, k, cfg.oversample, sketch=sketch[:, : k + cfg.oversample]).singular_values
        for k in sorted(ranks)
    }
    exact = None
    if reduced_scale:
        dense = op.matmat(np.eye(op.dim))
        exact = np.linalg.svd(dense, compute_uv=False)[: max(ranks)]
    return SingularValueTable(
        which=which, ranks=tuple(sorted(ranks)), approximations=approximations, exact=exact
    )


# ---------------------------------------------------------------------------
# CSV serialisation (17 significant digits, LF endings)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_singular_values_csv(table: SingularValueTable, path) -> None:
    """Columns: index, exact (reduced scale only), one column per rank.
    Rows beyond a rank's length are left empty."""
    headers = ["index"]
    if table.exact is not None:
        headers.append("exact")
    headers += [f"rank_{k}" for k in table.ranks]
    depth = max(table.ranks)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(headers) + "\n")
        for i in range(depth):
            row = [str(i + 1)]
            if table.exact is not None:
                row.append(_fmt(table.exact[i]) if i < len(table.exact) else "")
            for k in table.ranks:
                values = table.approximations[k]
                row.append(_fmt(values[i]) if i < len(values) else "")
            fh.write(",".join(row) + "\n")


def write_ensemble_csv(result: EnsembleResult, path) -> None:
    """Aggregate statistics: iteration, mean, min, max, std."""
    with open(path, "w", newline="") as fh:
        fh.write("iteration,mean,min,max,std\n")
        for i in range(len(result.mean)):
            fh.write(
                f"{i},{_fmt(result.mean[i])},{_fmt(result.min[i])},"
                f"{_fmt(result.max[i])},{_fmt(result.std[i])}\n"
            )


def write_config_dump(cfg: ExperimentConfig, fh) -> None:
    """Resolved configuration as one key=value line per field."""
    for key, value in cfg.as_items():
        fh.write(f"{key}={value}\n")

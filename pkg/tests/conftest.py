import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wc4dvar import (
    CorrelationSpec,
    CovarianceSet,
    InnerProblem,
    LinearizationState,
    ModelConfig,
    ObservationSet,
    build_correlation,
    compute_mismatches,
    integrate,
    make_covariance,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)


def small_problem(seed=7, n=5, window=4, sigma_obs=0.15):
    """Small inner problem with p = 6 observations for dense-oracle tests.

    SOAR background correlation with length scale 1*dx (the 2*dx family is
    not positive definite at n=5) and diffusion-family model error.
    """
    rng = np.random.default_rng(seed)
    model = ModelConfig(n=n, forcing=8.0, dt=0.025)
    dx = 1.0 / n
    corr_b = build_correlation(CorrelationSpec("soar", n, dx, 1.0 * dx))
    corr_q = build_correlation(CorrelationSpec("laplacian", n, dx, 0.75 * dx))
    covs = CovarianceSet(
        background=make_covariance(corr_b, 0.2),
        model_error=(make_covariance(corr_q, 0.05),) * window,
    )
    truth = integrate(model, 8.0 + rng.standard_normal(n), window)
    background = truth[0] + 0.1 * rng.standard_normal(n)
    reference = integrate(model, background, window)
    comps = np.array([0, 2, 4])
    obs = ObservationSet(
        times=(2, 4),
        components=(comps, comps),
        values=(
            truth[2][comps] + 0.01 * rng.standard_normal(3),
            truth[4][comps] + 0.01 * rng.standard_normal(3),
        ),
        sigma_obs=sigma_obs,
    )
    lin = LinearizationState(model, reference, covs)
    mismatch, innovation = compute_mismatches(lin, background, obs)
    return InnerProblem(lin, obs, mismatch, innovation)


@pytest.fixture
def tiny_problem():
    return small_problem()

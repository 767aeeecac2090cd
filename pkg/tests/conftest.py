"""Shared fixtures: small, deterministic integrator budgets."""

import numpy as np
import pytest

from qutrit_assign import IntegratorConfig, PriorSpec, pure_state_bloch


@pytest.fixture
def fast_cfg():
    """Smallest allowed budget; good enough for structural checks.

    The small chunks keep 16 error-bar replicates even at this budget,
    which keeps the symmetry gate's false-alarm rate low."""
    return IntegratorConfig(n_samples=1 << 17, seed=42, chunk_size=1 << 13)


@pytest.fixture
def medium_cfg():
    """Budget for checks that compare values, not just shapes."""
    return IntegratorConfig(n_samples=1 << 20, seed=42, chunk_size=1 << 14)


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


@pytest.fixture(params=["constant", "slater", "gauss_pure1", "gauss_pure0"])
def any_prior(request):
    return {
        "constant": PriorSpec.constant(),
        "slater": PriorSpec.slater(),
        "gauss_pure1": PriorSpec.gaussian_like(pure_state_bloch(1), 0.25),
        "gauss_pure0": PriorSpec.gaussian_like(pure_state_bloch(0), 0.25),
    }[request.param]

import logging
import math

import pytest

from mixedspec.models.domain import RectDomain
from mixedspec.models.forcing import (
    Exponential,
    Forcing,
    ForcingTerm,
    PolyBubble,
    PolynomialInT,
    SampledProfile,
    SampledSignal,
    SineMode,
    Trig,
)
from mixedspec.operations.series import solve
from mixedspec.schemas.config import TruncationPolicy

# ======================================================================================
# Logging Configuration
# ======================================================================================
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# ======================================================================================
# Helper Functions
# ======================================================================================
def separable(domain: RectDomain, spatial, temporal, alpha=None) -> Forcing:
    """A one-term forcing spatial(x) * temporal(t)."""
    return Forcing(domain=domain, terms=(ForcingTerm(spatial, temporal),), smoothness_alpha=alpha)


def bubble_coefficient(n: int) -> float:
    """int_0^1 x (1 - x) sqrt(2) sin(n pi x) dx."""
    return 2.0 * math.sqrt(2.0) * (1.0 - (-1.0) ** n) / (n * math.pi) ** 3

# ======================================================================================
# Domain Fixtures
# ======================================================================================
@pytest.fixture
def unit_domain() -> RectDomain:
    """p = T = 1."""
    return RectDomain(p=1.0, T=1.0)


@pytest.fixture
def pi_domain() -> RectDomain:
    """p = T = pi, so lambda_n = n."""
    return RectDomain(p=math.pi, T=math.pi)

# ======================================================================================
# Forcing Fixtures
# ======================================================================================
@pytest.fixture
def single_mode_forcing(unit_domain) -> Forcing:
    """X_1(x) * 1."""
    return separable(unit_domain, SineMode(1, unit_domain.p), PolynomialInT((1.0,)))


@pytest.fixture
def bubble_forcing(unit_domain) -> Forcing:
    """x (1 - x) * 1."""
    return separable(unit_domain, PolyBubble(1.0, unit_domain.p), PolynomialInT((1.0,)), alpha=0.5)


@pytest.fixture
def trig_forcing(unit_domain) -> Forcing:
    """X_1(x) sin(2 t + 0.5) + X_3(x) exp(t / 2)."""
    return Forcing(domain=unit_domain, terms=(
        ForcingTerm(SineMode(1, unit_domain.p), Trig(1.0, 2.0, 0.5)),
        ForcingTerm(SineMode(3, unit_domain.p), Exponential(0.5, 0.5)),
    ))


@pytest.fixture
def sampled_forcing(unit_domain) -> Forcing:
    """A hat profile times a sampled ramp, both piecewise linear."""
    return separable(
        unit_domain,
        SampledProfile((0.0, 0.5, 1.0, 0.5, 0.0), unit_domain.p),
        SampledSignal(tuple(0.1 * k for k in range(-5, 6)), unit_domain.t_max),
        alpha=0.5,
    )


@pytest.fixture
def zero_forcing(unit_domain) -> Forcing:
    return Forcing.zero_for(unit_domain)

# ======================================================================================
# Solution Fixtures
# ======================================================================================
@pytest.fixture
def single_mode_solution(single_mode_forcing, unit_domain):
    """The exact one-mode solution of X_1(x) * 1."""
    return solve(single_mode_forcing, unit_domain, TruncationPolicy.fixed(1))


@pytest.fixture
def bubble_solution(bubble_forcing, unit_domain):
    """x (1 - x) * 1 with 16 modes."""
    return solve(bubble_forcing, unit_domain, TruncationPolicy.fixed(16))

# ======================================================================================
# Pytest Command-Line Options
# ======================================================================================
def pytest_addoption(parser):
    """
    Add custom command line options:
      --run-slow    : Run tests marked as 'slow'
    """
    parser.addoption("--run-slow", action="store_true", help="Run tests marked as slow")


def pytest_collection_modifyitems(config, items):
    """
    Skip tests marked as 'slow' unless --run-slow is specified.
    """
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="use --run-slow to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)

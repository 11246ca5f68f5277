# tests/unit/test_basis.py
import math

import numpy as np
import pytest

from mixedspec.core.errors import DomainError, InsufficientDataError, InvalidModeError, UnsupportedDerivativeError
from mixedspec.models.domain import RectDomain
from mixedspec.models.forcing import (
    Exponential,
    PolyBubble,
    PolynomialInT,
    SampledProfile,
    SampledSignal,
    SineMode,
    Trig,
)
from mixedspec.operations.basis import (
    decay_estimate,
    eigenpair,
    eval_Xn,
    fit_power_law,
    mode_samples,
    project,
    project_dt,
)
from mixedspec.operations.quadrature import integrate
from mixedspec.schemas.report import TailBasis
from tests.conftest import bubble_coefficient, separable


# ---------------------------------------------
# Eigenpairs
# ---------------------------------------------

@pytest.mark.parametrize(
    "n, p, expected",
    [(1, math.pi, 1.0), (3, math.pi, 3.0), (1, 1.0, math.pi), (2, 2.0, math.pi)],
    ids=["unit_frequency", "third_mode", "unit_width", "wide_rectangle"],
)
def test_eigenpair_frequency(n, p, expected):
    pair = eigenpair(n, RectDomain(p=p, T=1.0))
    assert pair.lambda_n == pytest.approx(expected, rel=1e-15)
    assert pair.mu == pytest.approx(expected ** 2, rel=1e-15)


@pytest.mark.parametrize("n", [0, -2, 1.5], ids=["zero", "negative", "fractional"])
def test_eigenpair_rejects_invalid_index(unit_domain, n):
    with pytest.raises(InvalidModeError):
        eigenpair(n, unit_domain)


def test_eval_xn_values(unit_domain):
    pair = eigenpair(1, unit_domain)
    values = eval_Xn(pair, np.array([0.0, 0.5, 1.0]))
    assert values[0] == 0.0
    assert values[1] == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert values[2] == 0.0
    assert float(eval_Xn(eigenpair(2, unit_domain), 0.25)) == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_eval_xn_outside_interval(unit_domain):
    with pytest.raises(DomainError):
        eval_Xn(eigenpair(1, unit_domain), 1.1)


def test_orthonormality(unit_domain):
    for m in range(1, 13):
        for n in range(m, 13):
            result = integrate(
                lambda x: eval_Xn(eigenpair(m, unit_domain), x) * eval_Xn(eigenpair(n, unit_domain), x),
                0.0, 1.0, 1e-14, min_panels=8,
            )
            assert result.value == pytest.approx(1.0 if m == n else 0.0, abs=1e-12), (m, n)


# ---------------------------------------------
# Projection
# ---------------------------------------------

def test_sine_mode_projects_exactly(single_mode_forcing, unit_domain):
    assert float(project(single_mode_forcing, eigenpair(1, unit_domain), 0.3, 1e-12)) == 1.0
    assert float(project(single_mode_forcing, eigenpair(2, unit_domain), 0.3, 1e-12)) == 0.0


def test_bubble_coefficients_match_closed_form(bubble_forcing, unit_domain):
    assert bubble_coefficient(1) == pytest.approx(0.182442, abs=1e-6)
    for n in range(1, 21):
        value = float(project(bubble_forcing, eigenpair(n, unit_domain), 0.0, 1e-13))
        assert value == pytest.approx(bubble_coefficient(n), abs=1e-10), n


def test_projection_follows_temporal_profile(unit_domain):
    forcing = separable(unit_domain, PolyBubble(1.0, 1.0), Trig(2.0, 1.5, 0.0))
    t = np.array([-0.5, 0.0, 0.8])
    values = project(forcing, eigenpair(1, unit_domain), t, 1e-13)
    assert np.allclose(values, bubble_coefficient(1) * 2.0 * np.sin(1.5 * t), atol=1e-12)


@pytest.mark.parametrize(
    "temporal, order, expected",
    [(Trig(1.0, 3.0, 0.0), 1, 3.0), (Exponential(1.0, 2.0), 2, 4.0), (PolynomialInT((0.0, 0.0, 1.0)), 2, 2.0)],
    ids=["trig_slope", "exponential_curvature", "quadratic_curvature"],
)
def test_project_dt_at_seam(unit_domain, temporal, order, expected):
    forcing = separable(unit_domain, SineMode(1, 1.0), temporal)
    assert float(project_dt(forcing, eigenpair(1, unit_domain), 0.0, order, 1e-12)) == pytest.approx(expected)


def test_project_dt_unavailable_for_sampled_signal(sampled_forcing, unit_domain):
    with pytest.raises(UnsupportedDerivativeError):
        project_dt(sampled_forcing, eigenpair(1, unit_domain), 0.0, 2, 1e-12)


def test_project_rejects_time_outside(bubble_forcing, unit_domain):
    with pytest.raises(DomainError):
        project(bubble_forcing, eigenpair(1, unit_domain), 1.5, 1e-12)


def test_zero_weights_are_dropped(trig_forcing, unit_domain):
    samples = mode_samples(trig_forcing, eigenpair(2, unit_domain), 1e-12)
    assert samples.is_zero
    assert samples.f_n0 == 0.0
    third = mode_samples(trig_forcing, eigenpair(3, unit_domain), 1e-12)
    assert len(third.weights) == 1
    assert third.f_n0 == pytest.approx(0.5)
    assert third.fp_n0 == pytest.approx(0.25)


def test_mode_samples_convolution_matches_quadrature(unit_domain):
    forcing = separable(unit_domain, SineMode(1, 1.0), Trig(1.0, 2.0, 0.5))
    samples = mode_samples(forcing, eigenpair(1, unit_domain), 1e-13)
    lam = math.pi
    t = 0.7
    closed = complex(samples.convolve(1j * lam, np.array(t)))
    reference = integrate(lambda s: samples.value(s) * np.exp(1j * lam * (t - s)), 0.0, t, 1e-14).value
    assert closed == pytest.approx(complex(reference), abs=1e-12)


def test_grid_convolution_matches_pointwise_quadrature(unit_domain):
    forcing = separable(unit_domain, SineMode(1, 1.0), SampledSignal(tuple(math.sin(0.7 * k) for k in range(-8, 9)), 1.0))
    samples = mode_samples(forcing, eigenpair(1, unit_domain), 1e-12)
    lam = samples.lambda_n
    # unordered, with a repeat and the origin
    t_hyp = np.array([0.9, 0.1, 0.45, 0.0, 0.45, 1.0, 0.3])
    t_par = -t_hyp
    for kappa, t in ((1j * lam, t_hyp), (lam ** 2, t_par)):
        grid = samples.convolve(kappa, t)
        for tk, value in zip(t, grid):
            reference = integrate(
                lambda s: samples.value(s) * np.exp(kappa * (tk - s)), 0.0, float(tk), 1e-13,
                min_panels=64, breakpoints=[k / 8.0 for k in range(-8, 9)],
            ).value
            assert complex(value) == pytest.approx(complex(reference), abs=1e-10)
    assert samples.convolve(1j * lam, t_hyp)[3] == 0.0


def test_sup_bound_and_envelope(unit_domain):
    forcing = separable(unit_domain, SineMode(1, 1.0), Trig(2.0, 3.0, 0.0))
    samples = mode_samples(forcing, eigenpair(1, unit_domain), 1e-12)
    assert samples.sup_bound() == 2.0
    assert samples.sup_bound(order=1) == 6.0
    # max over f, f', f'' amplitudes 2, 6, 18
    assert samples.envelope() == pytest.approx(18.0)


# ---------------------------------------------
# Decay estimates
# ---------------------------------------------

def test_bubble_decay_rate(bubble_forcing, unit_domain):
    fit = decay_estimate(bubble_forcing, unit_domain, 32, 0.0)
    assert -3.2 <= fit.rate <= -2.8
    assert fit.basis == TailBasis.FITTED
    assert fit.points == 16


def test_hat_profile_decays_like_inverse_square(unit_domain):
    forcing = separable(unit_domain, SampledProfile((0.0, 0.5, 1.0, 0.5, 0.0), 1.0), PolynomialInT((1.0,)), alpha=0.5)
    fit = decay_estimate(forcing, unit_domain, 32, 0.0)
    assert fit.rate == pytest.approx(-2.0, abs=0.05)


def test_decay_estimate_of_single_mode_has_too_few_points(single_mode_forcing, unit_domain):
    with pytest.raises(InsufficientDataError):
        decay_estimate(single_mode_forcing, unit_domain, 16, 0.0)


def test_decay_estimate_needs_enough_modes(bubble_forcing, unit_domain):
    with pytest.raises(InsufficientDataError):
        decay_estimate(bubble_forcing, unit_domain, 4, 0.0)


def test_fit_power_law_recovers_exact_law():
    ns = np.arange(1, 11)
    C, rate, points = fit_power_law(ns, 3.0 * ns ** -2.5)
    assert C == pytest.approx(3.0, rel=1e-10)
    assert rate == pytest.approx(-2.5, rel=1e-10)
    assert points == 10


def test_fit_power_law_all_zero():
    with pytest.raises(InsufficientDataError):
        fit_power_law([1, 2, 3, 4], [0.0, 0.0, 0.0, 0.0])

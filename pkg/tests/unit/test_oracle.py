# tests/unit/test_oracle.py
import math

import numpy as np
import pytest

from mixedspec.core.errors import CFLError, StabilityError, StepSizeError
from mixedspec.models.forcing import PolynomialInT, Trig
from mixedspec.operations.basis import ModeCoefficientSamples, eigenpair
from mixedspec.operations.modes import ModeSolution, mode_coefficients
from mixedspec.operations.oracle import (
    conjugation_solve,
    conjugation_system,
    fd_propagate,
    integrate_mode_hyp,
    integrate_mode_par,
    quad_reference,
)
from tests.conftest import bubble_coefficient


def one_term_samples(domain, n, temporal, weight=1.0):
    return ModeCoefficientSamples.build(eigenpair(n, domain), (weight,), (temporal,), domain, 1e-12)


# ---------------------------------------------
# Seam coefficient system
# ---------------------------------------------

@pytest.mark.parametrize(
    "f_n0, fp_n0, lam, expected",
    [
        (0.0, 0.0, 2.0, (0.0, 0.0, 0.0)),
        (1.0, 0.0, math.pi, (-0.082678, 0.058569, -0.082678)),
        (0.0, 1.0, 1.0, (-0.5, -0.5, -0.5)),
    ],
    ids=["homogeneous", "unit_value", "unit_slope"],
)
def test_conjugation_solve_examples(f_n0, fp_n0, lam, expected):
    assert conjugation_solve(f_n0, fp_n0, lam) == pytest.approx(expected, abs=1e-6)


def test_conjugation_solve_agrees_with_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        f0, fp0 = (float(v) for v in rng.uniform(-10.0, 10.0, size=2))
        lam = math.pi * int(rng.integers(1, 21))
        closed = mode_coefficients(f0, fp0, lam)
        a, b, c = conjugation_solve(f0, fp0, lam)
        assert abs(a - closed.a) <= 1e-12
        assert abs(b - closed.b) <= 1e-12
        assert abs(c - closed.c) <= 1e-12


@pytest.mark.parametrize("lam", [0.1, 1.0, math.pi, 10.0 * math.pi], ids=["small", "one", "pi", "ten_pi"])
def test_conjugation_system_is_nonsingular(lam):
    det = conjugation_system(1.0, 1.0, lam).determinant
    assert abs(det) >= lam ** 3
    assert abs(det) == pytest.approx(lam ** 3 * (lam ** 2 + 1.0), rel=1e-10)


def test_conjugation_system_rejects_non_positive_frequency():
    with pytest.raises(ValueError):
        conjugation_system(1.0, 0.0, -1.0)


# ---------------------------------------------
# Hyperbolic RK4
# ---------------------------------------------

def test_rk4_homogeneous_cosine(pi_domain):
    samples = one_term_samples(pi_domain, 2, PolynomialInT((1.0,)), weight=0.0)
    t = np.linspace(0.0, 1.0, 101)
    alpha = integrate_mode_hyp(samples, 2.0, 1.0, 0.0, t)
    assert np.max(np.abs(alpha - np.cos(2.0 * t))) <= 1e-8


def test_rk4_constant_forcing(pi_domain):
    samples = one_term_samples(pi_domain, 1, PolynomialInT((1.0,)))
    # h = pi / 314, just over 0.01
    t = np.linspace(0.0, math.pi, 315)
    alpha = integrate_mode_hyp(samples, 1.0, 0.0, 0.0, t)
    assert np.max(np.abs(alpha - (1.0 - np.cos(t)))) <= 1e-8


def test_rk4_matches_closed_form_at_half(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)))
    lam = math.pi
    coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, lam)
    mode = ModeSolution(pair=eigenpair(1, unit_domain), coeffs=coeffs, samples=samples, tol=1e-12)
    t = np.linspace(0.0, 0.5, 51)
    alpha = integrate_mode_hyp(samples, lam, coeffs.a, coeffs.b, t)
    assert alpha[-1] == pytest.approx(float(mode.alpha(0.5)), abs=1e-8)


def test_rk4_error_drops_sixteenfold_when_step_halves(unit_domain):
    samples = one_term_samples(unit_domain, 1, Trig(1.0, 3.0, 0.2))
    lam = math.pi
    coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, lam)
    mode = ModeSolution(pair=eigenpair(1, unit_domain), coeffs=coeffs, samples=samples, tol=1e-12)
    errors = []
    for steps in (64, 128):
        t = np.linspace(0.0, 1.0, steps + 1)
        errors.append(abs(integrate_mode_hyp(samples, lam, coeffs.a, coeffs.b, t)[-1] - float(mode.alpha(1.0))))
    assert 12.0 <= errors[0] / errors[1] <= 20.0


def test_rk4_rejects_coarse_step(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)))
    with pytest.raises(StepSizeError) as exc_info:
        integrate_mode_hyp(samples, 10.0, 0.0, 0.0, np.linspace(0.0, 1.0, 101))
    assert exc_info.value.max_step == pytest.approx(0.005)


def test_rk4_rejects_non_uniform_grid(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)))
    with pytest.raises(ValueError):
        integrate_mode_hyp(samples, 1.0, 0.0, 0.0, np.array([0.0, 0.01, 0.03]))


# ---------------------------------------------
# Parabolic exponential stepper
# ---------------------------------------------

def test_backward_march_homogeneous(pi_domain):
    samples = one_term_samples(pi_domain, 1, PolynomialInT((1.0,)), weight=0.0)
    t = np.linspace(0.0, -1.0, 101)
    beta = integrate_mode_par(samples, 1.0, 1.0, t)
    assert np.max(np.abs(beta - np.exp(t))) <= 1e-10


def test_backward_march_constant_forcing(pi_domain):
    samples = one_term_samples(pi_domain, 1, PolynomialInT((1.0,)))
    t = np.linspace(0.0, -1.0, 101)
    beta = integrate_mode_par(samples, 1.0, 0.0, t)
    assert np.max(np.abs(beta + (1.0 - np.exp(t)))) <= 1e-10


def test_backward_march_matches_closed_form_for_trig(unit_domain):
    samples = one_term_samples(unit_domain, 3, Trig(0.7, 2.5, 1.0))
    lam = samples.lambda_n
    coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, lam)
    mode = ModeSolution(pair=eigenpair(3, unit_domain), coeffs=coeffs, samples=samples, tol=1e-12)
    t = np.linspace(0.0, -1.0, 101)
    assert np.max(np.abs(integrate_mode_par(samples, lam, coeffs.c, t) - mode.beta(t))) <= 1e-8


def test_forward_march_is_refused(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)))
    with pytest.raises(StabilityError):
        integrate_mode_par(samples, math.pi, 0.0, np.linspace(0.0, 1.0, 11))


# ---------------------------------------------
# Reference projections and CFL guard
# ---------------------------------------------

def test_quad_reference_sine_mode(trig_forcing, unit_domain):
    t = np.array([-0.5, 0.25])
    assert np.allclose(quad_reference(trig_forcing, 1, t, unit_domain), np.sin(2.0 * t + 0.5), atol=1e-13)
    assert np.all(quad_reference(trig_forcing, 2, t, unit_domain) == 0.0)


def test_quad_reference_bubble(bubble_forcing, unit_domain):
    assert float(quad_reference(bubble_forcing, 1, 0.0, unit_domain)) == pytest.approx(
        4.0 * math.sqrt(2.0) / math.pi ** 3, abs=1e-13)
    assert bubble_coefficient(1) == pytest.approx(4.0 * math.sqrt(2.0) / math.pi ** 3, rel=1e-15)
    for n in (2, 4, 6):
        assert abs(float(quad_reference(bubble_forcing, n, 0.0, unit_domain))) <= 1e-13


def test_fd_propagate_rejects_cfl_violation(single_mode_solution, single_mode_forcing):
    with pytest.raises(CFLError):
        fd_propagate(single_mode_solution, single_mode_forcing, 101, 11)

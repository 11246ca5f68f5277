# tests/unit/test_modes.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedspec.core.errors import DomainError, UnsupportedDerivativeError
from mixedspec.models.forcing import PolynomialInT, SineMode, Trig
from mixedspec.operations.basis import ModeCoefficientSamples, eigenpair
from mixedspec.operations.modes import (
    ModeSolution,
    build_mode,
    duhamel_hyp,
    duhamel_par,
    mode_coefficients,
    printed_form_checks,
    uxx_mode,
)
from tests.conftest import separable


def one_term_samples(domain, n, temporal, weight=1.0, tol=1e-12):
    return ModeCoefficientSamples.build(eigenpair(n, domain), (weight,), (temporal,), domain, tol)


def closed_mode(domain, n, temporal):
    samples = one_term_samples(domain, n, temporal)
    coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, samples.lambda_n)
    return ModeSolution(pair=eigenpair(n, domain), coeffs=coeffs, samples=samples, tol=samples.tol)


def random_trig(rng):
    return Trig(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(0.5, 5.0)), float(rng.uniform(0.0, 2.0 * math.pi)))


# ---------------------------------------------
# mode_coefficients
# ---------------------------------------------

@pytest.mark.parametrize(
    "f_n0, fp_n0, lam, expected",
    [
        (0.0, 0.0, math.pi, (0.0, 0.0, 0.0)),
        (1.0, 0.0, math.pi, (-0.082678, 0.058569, -0.082678)),
        (0.0, 1.0, 1.0, (-0.5, -0.5, -0.5)),
    ],
    ids=["homogeneous", "unit_value", "unit_slope"],
)
def test_mode_coefficients_examples(f_n0, fp_n0, lam, expected):
    coeffs = mode_coefficients(f_n0, fp_n0, lam)
    assert (coeffs.a, coeffs.b, coeffs.c) == pytest.approx(expected, abs=1e-6)
    assert coeffs.a == coeffs.c


@settings(max_examples=200, deadline=None)
@given(
    f_n0=st.floats(-10.0, 10.0),
    fp_n0=st.floats(-10.0, 10.0),
    n=st.integers(1, 20),
)
def test_mode_coefficients_satisfy_seam_system(f_n0, fp_n0, n):
    lam = n * math.pi
    mu = lam * lam
    c = mode_coefficients(f_n0, fp_n0, lam)
    # value, slope and curvature of the two general solutions agree at t = 0
    assert c.a - c.c == 0.0
    assert lam * c.b - mu * c.c == pytest.approx(f_n0, abs=1e-12 * (1.0 + abs(f_n0) + abs(fp_n0)))
    assert -mu * c.a - mu * mu * c.c == pytest.approx(
        mu * f_n0 + fp_n0 - f_n0, abs=1e-12 * mu * (1.0 + abs(f_n0) + abs(fp_n0)))


def test_mode_coefficients_reject_non_positive_frequency():
    with pytest.raises(ValueError):
        mode_coefficients(1.0, 0.0, 0.0)


# ---------------------------------------------
# Duhamel terms
# ---------------------------------------------

@pytest.mark.parametrize("n", [1, 4], ids=["lambda_pi", "lambda_4pi"])
def test_duhamel_hyp_constant_forcing(unit_domain, n):
    samples = one_term_samples(unit_domain, n, PolynomialInT((1.0,)))
    lam = samples.lambda_n
    t = np.linspace(0.0, 1.0, 11)
    assert np.allclose(duhamel_hyp(samples, lam, t), (1.0 - np.cos(lam * t)) / lam ** 2, rtol=0, atol=1e-14)


def test_duhamel_hyp_resonant_forcing(pi_domain):
    samples = one_term_samples(pi_domain, 1, Trig(1.0, 1.0, 0.0))
    assert float(duhamel_hyp(samples, 1.0, math.pi / 2)) == pytest.approx(0.5, abs=1e-13)


def test_duhamel_terms_vanish_for_zero_coefficient(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)), weight=0.0)
    assert samples.is_zero
    assert float(duhamel_hyp(samples, math.pi, 0.5)) == 0.0
    assert float(duhamel_par(samples, math.pi, -0.5)) == 0.0


@pytest.mark.parametrize(
    "n, expected",
    [(1, -(1.0 - math.exp(-1.0))), (10, -(1.0 - math.exp(-100.0)) / 100.0)],
    ids=["lambda_one", "stiff_lambda_ten"],
)
def test_duhamel_par_constant_forcing(pi_domain, n, expected):
    samples = one_term_samples(pi_domain, n, PolynomialInT((1.0,)))
    assert float(duhamel_par(samples, samples.lambda_n, -1.0)) == pytest.approx(expected, rel=1e-13)


def test_duhamel_ranges_are_enforced(unit_domain):
    samples = one_term_samples(unit_domain, 1, PolynomialInT((1.0,)))
    with pytest.raises(DomainError):
        duhamel_hyp(samples, math.pi, -0.1)
    with pytest.raises(DomainError):
        duhamel_par(samples, math.pi, 0.1)


# ---------------------------------------------
# Amplitudes and their derivatives
# ---------------------------------------------

def test_homogeneous_mode_vanishes(zero_forcing, unit_domain):
    mode = build_mode(zero_forcing, eigenpair(1, unit_domain), 1e-12)
    assert mode.coeffs.is_zero()
    t_plus, t_minus = np.linspace(0.0, 1.0, 5), np.linspace(-1.0, 0.0, 5)
    for values in (mode.alpha(t_plus), mode.alpha_dt(t_plus), mode.alpha_dtt(t_plus),
                   mode.beta(t_minus), mode.beta_dt(t_minus), mode.beta_dtt(t_minus)):
        assert np.all(values == 0.0)


def test_seam_identities_for_random_smooth_modes(unit_domain):
    rng = np.random.default_rng(7)
    for _ in range(100):
        mode = closed_mode(unit_domain, int(rng.integers(1, 11)), random_trig(rng))
        assert abs(mode.alpha(0.0) - mode.beta(0.0)) <= 1e-9
        assert abs(mode.alpha_dt(0.0) - mode.beta_dt(0.0)) <= 1e-9
        assert abs(mode.alpha_dtt(0.0) - mode.beta_dtt(0.0)) <= 1e-9
        assert float(mode.alpha_dt(0.0)) == pytest.approx(mode.seam_slope, abs=1e-12)
        assert float(mode.beta_dtt(0.0)) == pytest.approx(mode.seam_curvature, abs=1e-12)


def test_ode_residuals_on_grid(unit_domain):
    rng = np.random.default_rng(11)
    t_plus = np.linspace(0.0, 1.0, 50)
    t_minus = np.linspace(-1.0, 0.0, 50)
    for _ in range(10):
        mode = closed_mode(unit_domain, int(rng.integers(1, 11)), random_trig(rng))
        f_plus, f_minus = mode.samples.value(t_plus), mode.samples.value(t_minus)
        hyp = mode.alpha_dtt(t_plus) + mode.mu * mode.alpha(t_plus) - f_plus
        par = mode.beta_dt(t_minus) - mode.mu * mode.beta(t_minus) - f_minus
        assert np.max(np.abs(hyp)) <= 1e-8
        assert np.max(np.abs(par)) <= 1e-8


def test_alpha_dtt_of_constant_forcing(pi_domain):
    mode = closed_mode(pi_domain, 1, PolynomialInT((1.0,)))
    assert float(mode.alpha_dtt(0.3)) == pytest.approx(1.0 - float(mode.alpha(0.3)), abs=1e-9)


def test_uxx_identities(trig_forcing, unit_domain):
    mode = build_mode(trig_forcing, eigenpair(1, unit_domain), 1e-12)
    t_plus = np.linspace(0.05, 1.0, 20)
    t_minus = -t_plus
    assert np.allclose(mode.alpha_dtt(t_plus) - mode.uxx(t_plus, "plus"), mode.samples.value(t_plus), atol=1e-10)
    assert np.allclose(mode.beta_dt(t_minus) + mode.uxx(t_minus, "minus"), mode.samples.value(t_minus), atol=1e-10)
    with pytest.raises(ValueError):
        mode.uxx(0.5, "seam")


def test_uxx_mode_spans_both_sides(trig_forcing, unit_domain):
    mode = build_mode(trig_forcing, eigenpair(1, unit_domain), 1e-12)
    t = np.array([-1.0, -0.3, 0.0, 0.4, 1.0])
    values = uxx_mode(mode, t)
    assert values[1] == pytest.approx(float(mode.uxx(-0.3, "minus")), abs=1e-12)
    assert values[3] == pytest.approx(float(mode.uxx(0.4, "plus")), abs=1e-12)
    assert values[2] == pytest.approx(float(mode.uxx(0.0, "minus")), abs=1e-12)


def test_by_parts_first_derivative_agrees(trig_forcing, unit_domain):
    mode = build_mode(trig_forcing, eigenpair(3, unit_domain), 1e-12)
    t = np.linspace(0.0, 1.0, 21)
    assert np.allclose(mode.alpha_dt(t), mode.alpha_dt_by_parts(t), atol=1e-10)


def test_second_derivative_unavailable_for_sampled_signal(sampled_forcing, unit_domain):
    mode = build_mode(sampled_forcing, eigenpair(1, unit_domain), 1e-12)
    assert not mode.has_dtt
    with pytest.raises(UnsupportedDerivativeError):
        mode.alpha_dtt(0.5)
    with pytest.raises(UnsupportedDerivativeError):
        mode.amplitude("utt", -0.5, "minus")


def test_perturbed_b_breaks_slope_condition(single_mode_forcing, unit_domain):
    mode = build_mode(single_mode_forcing, eigenpair(1, unit_domain), 1e-12)
    broken = mode.perturbed(1e-3)
    assert float(broken.alpha_dt(0.0) - broken.beta_dt(0.0)) == pytest.approx(math.pi * 1e-3, rel=1e-9)
    assert float(broken.alpha(0.0)) == float(broken.beta(0.0))


# ---------------------------------------------
# Expanded derivative forms
# ---------------------------------------------

def test_printed_form_checks_flag_printed_forms(unit_domain):
    forcing = separable(unit_domain, SineMode(1, 1.0), Trig(1.0, 2.0, 0.5))
    mode = build_mode(forcing, eigenpair(1, unit_domain), 1e-12)
    t_plus = np.linspace(0.0, 1.0, 21)[1:]
    checks = {c.form: c for c in printed_form_checks(mode, t_plus, -t_plus[::-1])}
    assert set(checks) == {"alpha_dt", "beta_dt", "uxx_minus", "alpha_dtt", "uxx_plus", "beta_dtt"}
    assert all(c.passed for c in checks.values())
    assert all(c.corrected_discrepancy <= 1e-7 for c in checks.values())
    for form in ("alpha_dt", "uxx_plus", "beta_dtt"):
        assert checks[form].printed_discrepancy > 1e-3, form
    assert checks["beta_dt"].printed_discrepancy == checks["beta_dt"].corrected_discrepancy


def test_printed_form_checks_skip_second_order_without_f_dtt(sampled_forcing, unit_domain):
    mode = build_mode(sampled_forcing, eigenpair(1, unit_domain), 1e-12)
    t_plus = np.linspace(0.1, 1.0, 10)
    forms = [c.form for c in printed_form_checks(mode, t_plus, -t_plus[::-1])]
    assert forms == ["alpha_dt", "beta_dt", "uxx_minus"]

# mixedspec/operations/modes.py

"""
Module: modes.py

Closed-form solution of one mode of the conjugated problem.

On the hyperbolic side the mode amplitude solves alpha'' + lambda^2 alpha = f_n, on the
parabolic side beta' - lambda^2 beta = f_n, and the two are glued at t = 0 by matching
the value and the first two time derivatives:

    alpha(t) = a cos(lambda t) + b sin(lambda t) + (1/lambda) int_0^t f_n(s) sin(lambda (t - s)) ds
    beta(t)  = c exp(mu t) - int_t^0 f_n(s) exp(mu (t - s)) ds,        mu = lambda^2

Every integral is expressed through ModeCoefficientSamples.convolve, with kappa = i lambda
on the hyperbolic side (imaginary part gives the sine kernel, real part the cosine kernel)
and kappa = mu on the parabolic side.

Time derivatives use the integrated-by-parts forms whose integrands are f_n, f_n' and
f_n''. Three of the expanded forms are known to be misprinted in the usual write-up of
this solution; the printed variants are kept as ``printed_*`` evaluators so that the
corrections stay measurable.

Functions:
- mode_coefficients(f_n0, fp_n0, lam) -> ModeCoefficients
- duhamel_hyp(samples, lam, t, tol) -> hyperbolic Duhamel term
- duhamel_par(samples, lam, t, tol) -> parabolic Duhamel term
- build_mode(forcing, pair, tol) -> ModeSolution
- uxx_mode(mode, t) -> u_xx amplitude on either side of the seam
- printed_form_checks(mode, t_plus, t_minus) -> list of PrintedFormCheck
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from mixedspec.core.errors import UnsupportedDerivativeError
from mixedspec.models.domain import ArrayLike
from mixedspec.models.forcing import Forcing
from mixedspec.operations.basis import Eigenpair, ModeCoefficientSamples, mode_samples
from mixedspec.schemas.report import PrintedFormCheck

logger = logging.getLogger(__name__)

PRINTED_FORM_TOL = 1e-7


@dataclass(frozen=True)
class ModeCoefficients:
    """Amplitudes of cos(lambda t), sin(lambda t) and exp(lambda^2 t)."""
    a: float
    b: float
    c: float

    def is_zero(self) -> bool:
        return self.a == 0.0 and self.b == 0.0 and self.c == 0.0


def mode_coefficients(f_n0: float, fp_n0: float, lam: float) -> ModeCoefficients:
    """
    Coefficients fixed by the three seam conditions.

    Parameters:
    - f_n0 (float): f_n(0).
    - fp_n0 (float): f_n'(0).
    - lam (float): the eigenfrequency, > 0.

    Returns:
    - ModeCoefficients with a = c = ((1 - lam^2) f_n0 - fp_n0) / (lam^2 (lam^2 + 1))
      and b = (2 f_n0 - fp_n0) / (lam (lam^2 + 1)).

    Example:
    >>> mode_coefficients(0.0, 1.0, 1.0)
    ModeCoefficients(a=-0.5, b=-0.5, c=-0.5)
    """
    if not lam > 0:
        raise ValueError("Eigenfrequency must be positive")
    mu = lam * lam
    a = ((1.0 - mu) * f_n0 - fp_n0) / (mu * (mu + 1.0))
    b = (2.0 * f_n0 - fp_n0) / (lam * (mu + 1.0))
    return ModeCoefficients(a=a, b=b, c=a)


def _with_tol(samples: ModeCoefficientSamples, tol: Optional[float]) -> ModeCoefficientSamples:
    if tol is None or tol == samples.tol:
        return samples
    return dataclasses.replace(samples, tol=tol)


def duhamel_hyp(samples: ModeCoefficientSamples, lam: float, t: ArrayLike, tol: Optional[float] = None,
                order: int = 0) -> np.ndarray:
    """
    (1/lam) int_0^t f_n^(order)(s) sin(lam (t - s)) ds for 0 <= t <= T.

    Example:
    f_n = 1 gives (1 - cos(lam t)) / lam^2.
    """
    samples.domain.check_t(t, 0.0, samples.domain.t_max)
    conv = _with_tol(samples, tol).convolve(1j * lam, t, order)
    return np.imag(conv) / lam


def duhamel_par(samples: ModeCoefficientSamples, lam: float, t: ArrayLike, tol: Optional[float] = None,
                order: int = 0) -> np.ndarray:
    """
    -int_t^0 f_n^(order)(s) exp(lam^2 (t - s)) ds for -T <= t <= 0.

    The exponent is non-positive over the whole range of integration.

    Example:
    f_n = 1 gives -(1 - exp(lam^2 t)) / lam^2.
    """
    samples.domain.check_t(t, samples.domain.t_min, 0.0)
    conv = _with_tol(samples, tol).convolve(lam * lam, t, order)
    return np.real(conv)


@dataclass(frozen=True)
class ModeSolution:
    pair: Eigenpair
    coeffs: ModeCoefficients
    samples: ModeCoefficientSamples
    tol: float

    @property
    def n(self) -> int:
        return self.pair.n

    @property
    def lam(self) -> float:
        return self.pair.lambda_n

    @property
    def mu(self) -> float:
        return self.pair.mu

    @property
    def has_dtt(self) -> bool:
        """Whether f_n'' exists, which the second-derivative forms need."""
        return self.samples.has_order(2)

    @property
    def seam_slope(self) -> float:
        """(2 f_n(0) - f_n'(0)) / (lambda^2 + 1), the common value of alpha'(0) and beta'(0)."""
        return (2.0 * self.samples.f_n0 - self.samples.fp_n0) / (self.mu + 1.0)

    @property
    def seam_curvature(self) -> float:
        """(2 lambda^2 f_n(0) + f_n'(0)) / (lambda^2 + 1), the common value of alpha''(0) and beta''(0)."""
        return (2.0 * self.mu * self.samples.f_n0 + self.samples.fp_n0) / (self.mu + 1.0)

    def _plus(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        self.samples.domain.check_t(t, 0.0, self.samples.domain.t_max)
        return t

    def _minus(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        self.samples.domain.check_t(t, self.samples.domain.t_min, 0.0)
        return t

    def _conv_hyp(self, t: np.ndarray, order: int) -> np.ndarray:
        return self.samples.convolve(1j * self.lam, t, order)

    def _conv_par(self, t: np.ndarray, order: int) -> np.ndarray:
        return np.real(self.samples.convolve(self.mu, t, order))

    def _require_dtt(self) -> None:
        if not self.has_dtt:
            raise UnsupportedDerivativeError(
                f"Mode {self.n}: f_n'' is unavailable, second time derivatives are not checked"
            )

    # ----------------------------------------------------------------------------------
    # amplitudes
    # ----------------------------------------------------------------------------------
    def alpha(self, t: ArrayLike) -> np.ndarray:
        t = self._plus(t)
        lt = self.lam * t
        if self.samples.is_zero:
            return self.coeffs.a * np.cos(lt) + self.coeffs.b * np.sin(lt)
        return (self.coeffs.a * np.cos(lt) + self.coeffs.b * np.sin(lt)
                + np.imag(self._conv_hyp(t, 0)) / self.lam)

    def beta(self, t: ArrayLike) -> np.ndarray:
        t = self._minus(t)
        if self.samples.is_zero:
            return self.coeffs.c * np.exp(self.mu * t)
        return self.coeffs.c * np.exp(self.mu * t) + self._conv_par(t, 0)

    def alpha_dt(self, t: ArrayLike) -> np.ndarray:
        """Cosine-kernel form: -lam a sin + lam b cos + int_0^t f_n cos(lam (t - s)) ds."""
        t = self._plus(t)
        lt = self.lam * t
        out = -self.lam * self.coeffs.a * np.sin(lt) + self.lam * self.coeffs.b * np.cos(lt)
        if self.samples.is_zero:
            return out
        return out + np.real(self._conv_hyp(t, 0))

    def beta_dt(self, t: ArrayLike) -> np.ndarray:
        """beta'(0) exp(mu t) - int_t^0 f_n'(s) exp(mu (t - s)) ds, with beta'(0) = f_n(0) + lam^2 c."""
        t = self._minus(t)
        out = (self.samples.f_n0 + self.mu * self.coeffs.c) * np.exp(self.mu * t)
        if self.samples.is_zero:
            return out
        return out + self._conv_par(t, 1)

    def alpha_dtt(self, t: ArrayLike) -> np.ndarray:
        """
        alpha''(0) cos + (alpha'''(0) / lam) sin + (1/lam) int_0^t f_n'' sin(lam (t - s)) ds.

        Seam values follow from this side's own coefficients through the mode ODE:
        alpha''(0) = f_n(0) - lam^2 a and alpha'''(0) = f_n'(0) - lam^3 b.
        """
        t = self._plus(t)
        self._require_dtt()
        lt = self.lam * t
        f0, fp0 = self.samples.f_n0, self.samples.fp_n0
        out = ((f0 - self.mu * self.coeffs.a) * np.cos(lt)
               + (fp0 / self.lam - self.mu * self.coeffs.b) * np.sin(lt))
        if self.samples.is_zero:
            return out
        return out + np.imag(self._conv_hyp(t, 2)) / self.lam

    def beta_dtt(self, t: ArrayLike) -> np.ndarray:
        """beta''(0) exp(mu t) - int_t^0 f_n''(s) exp(mu (t - s)) ds, with beta''(0) = f_n'(0) + lam^2 beta'(0)."""
        t = self._minus(t)
        self._require_dtt()
        f0, fp0 = self.samples.f_n0, self.samples.fp_n0
        out = (fp0 + self.mu * (f0 + self.mu * self.coeffs.c)) * np.exp(self.mu * t)
        if self.samples.is_zero:
            return out
        return out + self._conv_par(t, 2)

    def _sin_coefficient_dtt(self, printed: bool = False) -> float:
        f0, fp0 = self.samples.f_n0, self.samples.fp_n0
        lam, mu = self.lam, self.mu
        weight = 2.0 * lam if printed else 2.0 * mu
        return ((2.0 * mu + 1.0) * fp0 - weight * f0) / (lam * (mu + 1.0))

    def uxx(self, t: ArrayLike, side: str) -> np.ndarray:
        """Amplitude of u_xx: -lambda^2 times alpha (side 'plus') or beta (side 'minus')."""
        if side == "plus":
            return -self.mu * self.alpha(t)
        if side == "minus":
            return -self.mu * self.beta(t)
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")

    def amplitude(self, field: str, t: ArrayLike, side: str) -> np.ndarray:
        """Mode amplitude of u, u_t, u_tt or u_xx on one side of the seam."""
        plus = side == "plus"
        if field == "u":
            return self.alpha(t) if plus else self.beta(t)
        if field == "ut":
            return self.alpha_dt(t) if plus else self.beta_dt(t)
        if field == "utt":
            return self.alpha_dtt(t) if plus else self.beta_dtt(t)
        if field == "uxx":
            return self.uxx(t, side)
        raise ValueError(f"Unknown field {field!r}")

    # ----------------------------------------------------------------------------------
    # independent paths used by the equivalence checks
    # ----------------------------------------------------------------------------------
    def alpha_dt_by_parts(self, t: ArrayLike) -> np.ndarray:
        """alpha' with the Duhamel term integrated by parts onto f_n'."""
        t = self._plus(t)
        lt = self.lam * t
        out = -self.lam * self.coeffs.a * np.sin(lt) + self.lam * self.coeffs.b * np.cos(lt)
        if self.samples.is_zero:
            return out
        return (out + self.samples.f_n0 * np.sin(lt) / self.lam
                + np.imag(self._conv_hyp(t, 1)) / self.lam)

    def alpha_dtt_ode(self, t: ArrayLike) -> np.ndarray:
        """alpha'' = f_n - lambda^2 alpha."""
        t = self._plus(t)
        return self.samples.value(t) - self.mu * self.alpha(t)

    def beta_dt_ode(self, t: ArrayLike) -> np.ndarray:
        """beta' = f_n + lambda^2 beta."""
        t = self._minus(t)
        return self.samples.value(t) + self.mu * self.beta(t)

    def beta_dtt_ode(self, t: ArrayLike) -> np.ndarray:
        """beta'' = f_n' + lambda^2 (f_n + lambda^2 beta)."""
        t = self._minus(t)
        return self.samples.value(t, 1) + self.mu * self.beta_dt_ode(t)

    # ----------------------------------------------------------------------------------
    # expanded forms, corrected and as printed
    # ----------------------------------------------------------------------------------
    def alpha_dt_expanded(self, t: ArrayLike, printed: bool = False) -> np.ndarray:
        """
        alpha' written with explicit seam data. The printed sin coefficient
        ((lam^2 - 1) f_n(0) + f_n'(0)) / (lam^2 + 1) lacks a factor 1/lam.
        """
        t = self._plus(t)
        f0, fp0 = self.samples.f_n0, self.samples.fp_n0
        sin_coef = ((self.mu - 1.0) * f0 + fp0) / (self.mu + 1.0)
        if not printed:
            sin_coef /= self.lam
        lt = self.lam * t
        out = sin_coef * np.sin(lt) + self.seam_slope * np.cos(lt)
        if self.samples.is_zero:
            return out
        return out + np.real(self._conv_hyp(t, 0))

    def uxx_plus_expanded(self, t: ArrayLike, printed: bool = False) -> np.ndarray:
        """u_xx amplitude as alpha'' - f_n; the printed sin coefficient uses 2 lam f_n(0) for 2 lam^2 f_n(0)."""
        t = self._plus(t)
        self._require_dtt()
        lt = self.lam * t
        out = (self.seam_curvature * np.cos(lt) + self._sin_coefficient_dtt(printed) * np.sin(lt)
               - self.samples.value(t))
        if self.samples.is_zero:
            return out
        return out + np.imag(self._conv_hyp(t, 2)) / self.lam

    def uxx_minus_expanded(self, t: ArrayLike) -> np.ndarray:
        """u_xx amplitude as f_n - beta'."""
        t = self._minus(t)
        out = -self.seam_slope * np.exp(self.mu * t) + self.samples.value(t)
        if self.samples.is_zero:
            return out
        return out - self._conv_par(t, 1)

    def beta_dtt_expanded(self, t: ArrayLike, printed: bool = False) -> np.ndarray:
        """beta''; the printed exponent is lam t instead of lam^2 t."""
        t = self._minus(t)
        self._require_dtt()
        rate = self.lam if printed else self.mu
        out = self.seam_curvature * np.exp(rate * t)
        if self.samples.is_zero:
            return out
        return out + self._conv_par(t, 2)

    def perturbed(self, delta_b: float) -> "ModeSolution":
        """A copy with b shifted by delta_b; breaks the u_t seam condition by lambda * delta_b."""
        coeffs = dataclasses.replace(self.coeffs, b=self.coeffs.b + delta_b)
        return dataclasses.replace(self, coeffs=coeffs)

    def __repr__(self):
        c = self.coeffs
        return f"<ModeSolution(n={self.n}, a={c.a:.6g}, b={c.b:.6g}, c={c.c:.6g})>"


def build_mode(forcing: Forcing, pair: Eigenpair, tol: float) -> ModeSolution:
    """Project the forcing onto X_n and close the mode with the seam coefficients."""
    samples = mode_samples(forcing, pair, tol)
    if samples.is_zero:
        coeffs = ModeCoefficients(0.0, 0.0, 0.0)
    else:
        coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, pair.lambda_n)
    return ModeSolution(pair=pair, coeffs=coeffs, samples=samples, tol=tol)


def _max_abs(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values))) if values.size else 0.0


def uxx_mode(mode: ModeSolution, t: ArrayLike) -> np.ndarray:
    """-lambda^2 T_n(t) on the whole interval; u itself is continuous, so t = 0 needs no side."""
    t = np.asarray(t, dtype=float)
    plus = mode.uxx(np.where(t >= 0.0, t, 0.0), "plus")
    minus = mode.uxx(np.where(t < 0.0, t, 0.0), "minus")
    return np.where(t >= 0.0, plus, minus)


def printed_form_checks(mode: ModeSolution, t_plus: ArrayLike, t_minus: ArrayLike,
                      tol: float = PRINTED_FORM_TOL) -> List[PrintedFormCheck]:
    """
    Compare each expanded derivative form with an independent evaluation.

    The references are the by-parts alpha' and the ODE identities; second-derivative
    forms are skipped with a warning when f_n'' is unavailable.
    """
    t_plus = np.asarray(t_plus, dtype=float)
    t_minus = np.asarray(t_minus, dtype=float)
    t_report_plus = float(t_plus.reshape(-1)[-1]) if t_plus.size else 0.0
    t_report_minus = float(t_minus.reshape(-1)[0]) if t_minus.size else 0.0
    checks: List[PrintedFormCheck] = []

    def record(form: str, t_report: float, reference, corrected, printed):
        corrected_gap = _max_abs(corrected - reference)
        printed_gap = _max_abs(printed - reference)
        if printed_gap > tol:
            logger.info("Mode %d: printed form %s differs from the corrected one by %.3e",
                        mode.n, form, printed_gap)
        checks.append(PrintedFormCheck(form=form, n=mode.n, t=t_report,
                                     corrected_discrepancy=corrected_gap,
                                     printed_discrepancy=printed_gap,
                                     passed=corrected_gap <= tol))

    reference = mode.alpha_dt_by_parts(t_plus)
    record("alpha_dt", t_report_plus, reference,
           mode.alpha_dt_expanded(t_plus), mode.alpha_dt_expanded(t_plus, printed=True))
    beta_dt = mode.beta_dt(t_minus)
    record("beta_dt", t_report_minus, mode.beta_dt_ode(t_minus), beta_dt, beta_dt)
    uxx_minus = mode.uxx_minus_expanded(t_minus)
    record("uxx_minus", t_report_minus, mode.uxx(t_minus, "minus"), uxx_minus, uxx_minus)

    if not mode.has_dtt:
        logger.warning("Mode %d: f_n'' unavailable, second-derivative forms not checked", mode.n)
        return checks
    alpha_dtt = mode.alpha_dtt(t_plus)
    record("alpha_dtt", t_report_plus, mode.alpha_dtt_ode(t_plus), alpha_dtt, alpha_dtt)
    record("uxx_plus", t_report_plus, mode.uxx(t_plus, "plus"),
           mode.uxx_plus_expanded(t_plus), mode.uxx_plus_expanded(t_plus, printed=True))
    record("beta_dtt", t_report_minus, mode.beta_dtt_ode(t_minus),
           mode.beta_dtt_expanded(t_minus), mode.beta_dtt_expanded(t_minus, printed=True))
    return checks

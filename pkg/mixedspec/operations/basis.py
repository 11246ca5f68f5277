# mixedspec/operations/basis.py

"""
Module: basis.py

The Dirichlet sine eigenbasis of (0, p) and the projection of the forcing onto it.

Every catalog term is separable, so the n-th coefficient of the forcing is

    f_n(t) = sum_k w_{n,k} g_k(t),   w_{n,k} = int_0^p s_k(x) X_n(x) dx

and the spatial weights are computed once per mode. Sine-mode terms use orthonormality
instead of quadrature. The per-mode sampler (ModeCoefficientSamples) evaluates f_n and
its time derivatives at arbitrary t and the convolutions every Duhamel term needs.

Functions:
- eigenpair(n, domain) -> Eigenpair
- eval_Xn(pair, x) -> values of X_n
- mode_samples(forcing, pair, tol) -> ModeCoefficientSamples
- project(forcing, pair, t, tol) -> f_n(t)
- project_dt(forcing, pair, t, order, tol) -> f_n^(order)(t)
- decay_estimate(forcing, domain, n_max, t) -> DecayFit
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mixedspec.core.errors import DomainError, InsufficientDataError, InvalidModeError, UnsupportedDerivativeError
from mixedspec.models.domain import COORD_SLACK, ArrayLike, RectDomain
from mixedspec.models.forcing import Forcing, SpatialProfile, TemporalProfile, dirichlet_sine, smoothness_hint
from mixedspec.operations.quadrature import boundary_layer_breakpoints, integrate, oscillation_panels
from mixedspec.schemas.report import DecayFit, TailBasis

logger = logging.getLogger(__name__)

# Coefficients smaller than this fraction of the largest are treated as zero by fits
DECAY_FLOOR = 1e-13
MIN_FIT_POINTS = 4
# Parabolic kernels with mu |t| above this get boundary-layer panels at s = t
STIFF_THRESHOLD = 30.0


@dataclass(frozen=True)
class Eigenpair:
    """Mode n with eigenfrequency lambda_n = n pi / p and X_n = sqrt(2/p) sin(lambda_n x)."""
    n: int
    lambda_n: float
    p: float

    @property
    def mu(self) -> float:
        """Parabolic rate lambda_n ** 2."""
        return self.lambda_n * self.lambda_n

    @property
    def norm(self) -> float:
        return math.sqrt(2.0 / self.p)


def eigenpair(n: int, domain: RectDomain) -> Eigenpair:
    """
    Build the n-th eigenpair of the rectangle.

    Raises:
    - InvalidModeError: if n < 1.

    Example:
    >>> eigenpair(1, RectDomain(p=math.pi, T=1.0)).lambda_n
    1.0
    """
    if int(n) != n or n < 1:
        raise InvalidModeError(f"Mode index must be an integer >= 1, got {n}")
    n = int(n)
    return Eigenpair(n=n, lambda_n=n * math.pi / domain.p, p=domain.p)


def eval_Xn(pair: Eigenpair, x: ArrayLike) -> np.ndarray:
    """X_n(x) = sqrt(2/p) sin(lambda_n x) for x in [0, p]."""
    xs = np.asarray(x, dtype=float)
    slack = COORD_SLACK * pair.p
    if not np.all(np.isfinite(xs)) or np.any(xs < -slack) or np.any(xs > pair.p + slack):
        raise DomainError(f"x outside [0, {pair.p}]")
    return dirichlet_sine(pair.n, pair.p, xs)


def spatial_weight(profile: SpatialProfile, pair: Eigenpair, tol: float, density: int = 1) -> float:
    """int_0^p profile(x) X_n(x) dx, exact for sine modes."""
    k = profile.sine_index
    if k is not None:
        return 1.0 if k == pair.n else 0.0
    panels = density * max(4, oscillation_panels(pair.lambda_n, pair.p))
    result = integrate(
        lambda x: profile.value(x) * dirichlet_sine(pair.n, pair.p, x),
        0.0,
        pair.p,
        tol,
        min_panels=panels,
        breakpoints=profile.breakpoints(),
    )
    return float(result.value)


@dataclass(frozen=True)
class ModeCoefficientSamples:
    """
    f_n(t) = sum_k weights[k] * temporals[k](t) for one mode.

    Terms whose weight is exactly zero are dropped at construction, so a missing
    derivative of a term that does not reach this mode does not matter.
    """
    n: int
    lambda_n: float
    weights: Tuple[float, ...]
    temporals: Tuple[TemporalProfile, ...]
    domain: RectDomain
    tol: float

    @classmethod
    def build(cls, pair: Eigenpair, weights: Sequence[float], temporals: Sequence[TemporalProfile],
              domain: RectDomain, tol: float) -> "ModeCoefficientSamples":
        kept = [(w, g) for w, g in zip(weights, temporals) if w != 0.0]
        return cls(
            n=pair.n,
            lambda_n=pair.lambda_n,
            weights=tuple(w for w, _ in kept),
            temporals=tuple(g for _, g in kept),
            domain=domain,
            tol=tol,
        )

    @property
    def is_zero(self) -> bool:
        return not self.weights

    @property
    def max_order(self) -> int:
        return min((g.max_order for g in self.temporals), default=2)

    def has_order(self, order: int) -> bool:
        return order <= self.max_order

    @property
    def f_n0(self) -> float:
        return float(self.value(0.0))

    @property
    def fp_n0(self) -> float:
        return float(self.value(0.0, order=1))

    def value(self, t: ArrayLike, order: int = 0) -> np.ndarray:
        """f_n^(order)(t)."""
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape, dtype=float)
        for w, g in zip(self.weights, self.temporals):
            total = total + w * g.dt(t, order)
        return total

    __call__ = value

    def breakpoints(self) -> Tuple[float, ...]:
        points = set()
        for g in self.temporals:
            points.update(g.breakpoints())
        return tuple(sorted(points))

    def convolve(self, kappa: complex, t: ArrayLike, order: int = 0) -> np.ndarray:
        """
        int_0^t f_n^(order)(s) exp(kappa (t - s)) ds, closed form where the catalog has one.

        Parabolic kernels (real kappa) are only evaluated for t <= 0 where the
        exponent stays non-positive.
        """
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape, dtype=complex)
        leftovers: List[Tuple[float, TemporalProfile]] = []
        for w, g in zip(self.weights, self.temporals):
            profile = g.derivative(order)
            closed = profile.convolve(kappa, t)
            if closed is None:
                leftovers.append((w, profile))
            else:
                total = total + w * closed
        if leftovers:
            total = total + self._convolve_by_quadrature(leftovers, kappa, t)
        return total

    def _convolve_by_quadrature(self, parts, kappa: complex, t: np.ndarray) -> np.ndarray:
        breaks = set()
        for _, profile in parts:
            breaks.update(profile.breakpoints())

        def integrand_at(tk: float):
            def integrand(s):
                acc = np.zeros(np.shape(s), dtype=float)
                for w, profile in parts:
                    acc = acc + w * profile.value(s)
                return acc * np.exp(kappa * (tk - s))
            return integrand

        rate = complex(kappa).real

        def segment(start: float, tk: float) -> complex:
            # int_start^tk g(s) exp(kappa (tk - s)) ds
            points = [c for c in breaks if min(start, tk) < c < max(start, tk)]
            panels = max(4, oscillation_panels(complex(kappa).imag, tk - start))
            if rate > 0 and rate * abs(tk - start) > STIFF_THRESHOLD:
                points.extend(boundary_layer_breakpoints(tk, start, 1.0 / rate))
            return integrate(integrand_at(tk), start, tk, self.tol, min_panels=panels, breakpoints=points).value

        # March outwards from t = 0 on each side, carrying the running integral:
        # I(t_k) = exp(kappa (t_k - t_{k-1})) I(t_{k-1}) + int_{t_{k-1}}^{t_k} ...
        flat = t.reshape(-1)
        out = np.zeros(flat.size, dtype=complex)
        for side in (flat > 0.0, flat < 0.0):
            indices = np.flatnonzero(side)
            indices = indices[np.argsort(np.abs(flat[indices]), kind="stable")]
            running, previous = 0j, 0.0
            for idx in indices:
                tk = float(flat[idx])
                if tk != previous:
                    running = np.exp(kappa * (tk - previous)) * running + segment(previous, tk)
                    previous = tk
                out[idx] = running
        return out.reshape(t.shape)

    def sup_bound(self, order: int = 0, lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        """Upper bound of |f_n^(order)| on [lo, hi] (default [-T, T])."""
        lo = self.domain.t_min if lo is None else lo
        hi = self.domain.t_max if hi is None else hi
        return float(sum(abs(w) * g.derivative(order).sup_bound(lo, hi)
                         for w, g in zip(self.weights, self.temporals)))

    def l2_norm(self, order: int, lo: float, hi: float) -> float:
        """||f_n^(order)||_{L2(lo, hi)} by quadrature."""
        if self.is_zero or lo == hi:
            return 0.0
        span = abs(hi - lo)
        freq = max((abs(getattr(g, "omega", 0.0)) for g in self.temporals), default=0.0)
        result = integrate(
            lambda s: self.value(s, order) ** 2,
            min(lo, hi),
            max(lo, hi),
            self.tol,
            min_panels=max(4, oscillation_panels(2.0 * freq, span)),
            breakpoints=self.breakpoints(),
        )
        return math.sqrt(max(float(result.value), 0.0))

    def envelope(self) -> float:
        """
        sum_k |w_k| max_j sup|g_k^(j)| over [-T, T], j running over the available orders <= 2.

        Bounds |f_n^(j)| for every j the tail estimates use.
        """
        lo, hi = self.domain.t_min, self.domain.t_max
        total = 0.0
        for w, g in zip(self.weights, self.temporals):
            total += abs(w) * max(g.derivative(j).sup_bound(lo, hi) for j in range(g.max_order + 1))
        return total


def mode_samples(forcing: Forcing, pair: Eigenpair, tol: float, density: int = 1) -> ModeCoefficientSamples:
    """Spatial weights of every forcing term against X_n, packed with the temporal parts."""
    weights = [spatial_weight(term.spatial, pair, tol, density) for term in forcing.terms]
    temporals = [term.temporal for term in forcing.terms]
    return ModeCoefficientSamples.build(pair, weights, temporals, forcing.domain, tol)


def project(forcing: Forcing, pair: Eigenpair, t: ArrayLike, tol: float) -> np.ndarray:
    """
    f_n(t) = int_0^p f(x, t) X_n(x) dx within absolute tolerance tol.

    Raises:
    - DomainError: if t lies outside [-T, T].
    - QuadratureError: if a spatial weight does not converge within the panel budget.
    """
    return project_dt(forcing, pair, t, 0, tol)


def project_dt(forcing: Forcing, pair: Eigenpair, t: ArrayLike, order: int, tol: float) -> np.ndarray:
    """Projection of d^order f / dt^order onto X_n."""
    forcing.domain.check_t(t)
    samples = mode_samples(forcing, pair, tol)
    if not samples.has_order(order):
        raise UnsupportedDerivativeError(f"Order {order} time derivative unavailable for mode {pair.n}")
    return samples.value(t, order)


def fit_power_law(ns: Sequence[int], magnitudes: Sequence[float]) -> Tuple[float, float, int]:
    """
    Least-squares line through (log n, log |c_n|) over the coefficients above the noise floor.

    Returns (C, rate, points). Raises InsufficientDataError with fewer than four points.
    """
    ns = np.asarray(ns, dtype=float)
    mags = np.abs(np.asarray(magnitudes, dtype=float))
    peak = float(np.max(mags)) if mags.size else 0.0
    if peak == 0.0:
        raise InsufficientDataError("All coefficients vanish; nothing to fit")
    keep = mags > DECAY_FLOOR * peak
    points = int(np.count_nonzero(keep))
    if points < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"Decay fit needs at least {MIN_FIT_POINTS} nonzero coefficients, found {points}"
        )
    rate, intercept = np.polyfit(np.log(ns[keep]), np.log(mags[keep]), 1)
    return float(math.exp(intercept)), float(rate), points


def decay_estimate(forcing: Forcing, domain: RectDomain, n_max: int, t: float, tol: float = 1e-12) -> DecayFit:
    """
    Fit |f_n(t)| ~ C n**rate over n = 1..n_max.

    Hypothesis-satisfying forcings give rate <= -(1 + alpha); the constant C is
    empirical only.
    """
    if n_max < 8:
        raise InsufficientDataError(f"Decay estimate needs n_max >= 8, got {n_max}")
    domain.check_t(t)
    for hint in smoothness_hint(forcing):
        logger.warning("Decay fit on non-smooth data: %s", hint)
    ns = np.arange(1, n_max + 1)
    coefficients = [float(project(forcing, eigenpair(int(n), domain), t, tol)) for n in ns]
    C, rate, points = fit_power_law(ns, coefficients)
    logger.debug("Decay fit over n <= %d at t = %g: C = %.4g, rate = %.4f", n_max, t, C, rate)
    return DecayFit(C=C, rate=rate, points=points, basis=TailBasis.FITTED)

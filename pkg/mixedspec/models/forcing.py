# mixedspec/models/forcing.py
"""
The forcing catalog.

A forcing is a finite sum of separable terms ``spatial(x) * temporal(t)`` bound to a
RectDomain. Spatial profiles know their values and quadrature breakpoints; temporal
profiles additionally know their time derivatives, a sup bound, and (for the analytic
kinds) a closed form of the convolution

    conv(g, kappa, t) = int_0^t g(s) exp(kappa (t - s)) ds

which every Duhamel term of the solver reduces to. Profiles are built from validated
schemas through the registries at the bottom of the module, keyed on ``kind``.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
from numpy.polynomial import Polynomial

from mixedspec.core.errors import UnsupportedDerivativeError
from mixedspec.models.domain import ArrayLike, RectDomain
from mixedspec.schemas.forcing import ForcingSchema, ForcingTermSchema
from mixedspec.schemas.report import Violation, ViolationCode


FD_STEP_FACTOR = float(np.cbrt(np.finfo(float).eps))
BOUNDARY_TOL = 1e-12
SEAM_TOL = 1e-9
# Below this |kappa| the repeated integration by parts for polynomials cancels badly
POLY_CONV_MIN_KAPPA = 0.5


def phi1(w: np.ndarray) -> np.ndarray:
    """(exp(w) - 1) / w, accurate near w = 0, for complex arrays."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    tiny = np.abs(w) < 1e-3
    wt = w[tiny]
    out[tiny] = 1.0 + wt / 2.0 * (1.0 + wt / 3.0 * (1.0 + wt / 4.0 * (1.0 + wt / 5.0)))
    wb = w[~tiny]
    out[~tiny] = np.expm1(wb) / wb
    return out


def exp_sum_convolve(terms: Sequence[Tuple[complex, complex]], kappa: complex, t: ArrayLike) -> np.ndarray:
    """
    conv(g, kappa, t) for g(s) = sum_j c_j exp(z_j s).

    Each term is (exp(z t) - exp(kappa t)) / (z - kappa), switched to the
    exp(kappa t) * t * phi1((z - kappa) t) form when (z - kappa) t is small so that
    resonant and near-resonant terms stay accurate.
    """
    t = np.asarray(t, dtype=float)
    flat = t.reshape(-1)
    ekt = np.exp(kappa * flat)
    out = np.zeros(flat.shape, dtype=complex)
    for coef, z in terms:
        d = z - kappa
        w = d * flat
        small = np.abs(w) < 0.5
        part = np.empty(flat.shape, dtype=complex)
        part[small] = ekt[small] * flat[small] * phi1(w[small])
        big = ~small
        part[big] = (np.exp(z * flat[big]) - ekt[big]) / d
        out += coef * part
    return out.reshape(t.shape)


def dirichlet_sine(n: int, p: float, x: ArrayLike) -> np.ndarray:
    """
    sqrt(2/p) sin(n pi x / p), evaluated on the half of [0, p] nearest a wall so that
    both walls give exactly zero.
    """
    x = np.asarray(x, dtype=float)
    lam = n * math.pi / p
    near_left = x <= 0.5 * p
    y = np.where(near_left, x, p - x)
    sign = np.where(near_left, 1.0, 1.0 if n % 2 == 1 else -1.0)
    return math.sqrt(2.0 / p) * sign * np.sin(lam * y)


# ======================================================================================
# Spatial profiles
# ======================================================================================
class SpatialProfile(ABC):
    """A function of x on [0, p] that should vanish at both walls."""
    kind: ClassVar[str]
    piecewise_linear: ClassVar[bool] = False

    @abstractmethod
    def value(self, x: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @property
    def sine_index(self) -> Optional[int]:
        """Mode index when the profile is exactly X_k, else None."""
        return None

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def samples(self) -> Optional[np.ndarray]:
        return None

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "SpatialProfile":
        raise NotImplementedError


@dataclass(frozen=True)
class SineMode(SpatialProfile):
    """X_k(x) = sqrt(2/p) sin(k pi x / p)."""
    k: int
    p: float
    kind: ClassVar[str] = "sine_mode"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("Sine mode index must be at least 1")

    def value(self, x: ArrayLike) -> np.ndarray:
        return dirichlet_sine(self.k, self.p, x)

    @property
    def sine_index(self) -> int:
        return self.k

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "SineMode":
        return cls(k=schema.k, p=domain.p)


@dataclass(frozen=True)
class PolyBubble(SpatialProfile):
    """amplitude * x (p - x)."""
    amplitude: float
    p: float
    kind: ClassVar[str] = "poly_bubble"

    def value(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude * x * (self.p - x)

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "PolyBubble":
        return cls(amplitude=schema.amplitude, p=domain.p)


@dataclass(frozen=True)
class SampledProfile(SpatialProfile):
    """Piecewise-linear interpolant of samples on a uniform grid over [0, p]."""
    values: Tuple[float, ...]
    p: float
    kind: ClassVar[str] = "sampled_profile"
    piecewise_linear: ClassVar[bool] = True

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("A sampled profile needs at least two samples")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.p, len(self.values))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def value(self, x: ArrayLike) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.nodes, self.array)

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(self.nodes[1:-1])

    def samples(self) -> np.ndarray:
        return self.array

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "SampledProfile":
        return cls(values=tuple(schema.values), p=domain.p)


# ======================================================================================
# Temporal profiles
# ======================================================================================
class TemporalProfile(ABC):
    """A function of t on [-T, T] with a known number of available derivatives."""
    kind: ClassVar[str]
    max_order: ClassVar[int] = 2
    piecewise_linear: ClassVar[bool] = False

    @abstractmethod
    def value(self, t: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def _differentiate(self) -> "TemporalProfile":
        raise NotImplementedError

    @abstractmethod
    def sup_bound(self, lo: float, hi: float) -> float:
        """An upper bound of |g| on [lo, hi]."""
        raise NotImplementedError

    def derivative(self, order: int) -> "TemporalProfile":
        if order not in (0, 1, 2):
            raise UnsupportedDerivativeError(f"Derivative order must be 0, 1 or 2, got {order}")
        if order > self.max_order:
            raise UnsupportedDerivativeError(
                f"{self.kind} provides time derivatives up to order {self.max_order}, "
                f"order {order} requested"
            )
        profile = self
        for _ in range(order):
            profile = profile._differentiate()
        return profile

    def dt(self, t: ArrayLike, order: int) -> np.ndarray:
        return self.derivative(order).value(t)

    def convolve(self, kappa: complex, t: ArrayLike) -> Optional[np.ndarray]:
        """Closed form of conv(self, kappa, t), or None when only quadrature applies."""
        return None

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def samples(self) -> Optional[np.ndarray]:
        return None

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "TemporalProfile":
        raise NotImplementedError


@dataclass(frozen=True)
class PolynomialInT(TemporalProfile):
    """sum_j coefficients[j] t**j."""
    coefficients: Tuple[float, ...]
    kind: ClassVar[str] = "polynomial"

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("A polynomial needs at least one coefficient")

    @cached_property
    def poly(self) -> Polynomial:
        return Polynomial(np.asarray(self.coefficients, dtype=float))

    def value(self, t: ArrayLike) -> np.ndarray:
        return self.poly(np.asarray(t, dtype=float))

    def _differentiate(self) -> "PolynomialInT":
        coef = self.poly.deriv().coef
        return PolynomialInT(tuple(float(c) for c in coef) or (0.0,))

    def sup_bound(self, lo: float, hi: float) -> float:
        candidates = [lo, hi]
        if len(self.coefficients) > 2:
            for root in self.poly.deriv().roots():
                if abs(root.imag) < 1e-12 and lo < root.real < hi:
                    candidates.append(root.real)
        return float(np.max(np.abs(self.poly(np.asarray(candidates)))))

    def convolve(self, kappa: complex, t: ArrayLike) -> Optional[np.ndarray]:
        t = np.asarray(t, dtype=float)
        if len(self.coefficients) > 1 and abs(kappa) < POLY_CONV_MIN_KAPPA:
            return None
        ekt = np.exp(kappa * t)
        total = np.zeros(t.shape, dtype=complex)
        current = self.poly
        power = complex(kappa)
        # int_0^t g(s) e^{kappa (t-s)} ds = -sum_j (g^(j)(t) - g^(j)(0) e^{kappa t}) / kappa^(j+1)
        for _ in range(len(self.coefficients)):
            total += (current(t) - current(0.0) * ekt) / power
            current = current.deriv()
            power *= kappa
        return -total

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "PolynomialInT":
        return cls(coefficients=tuple(schema.coefficients))


@dataclass(frozen=True)
class Trig(TemporalProfile):
    """amplitude * sin(omega t + phase)."""
    amplitude: float
    omega: float
    phase: float = 0.0
    kind: ClassVar[str] = "trig"

    def value(self, t: ArrayLike) -> np.ndarray:
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float) + self.phase)

    def _differentiate(self) -> "Trig":
        return Trig(self.amplitude * self.omega, self.omega, self.phase + 0.5 * math.pi)

    def sup_bound(self, lo: float, hi: float) -> float:
        return abs(self.amplitude)

    def exp_terms(self) -> List[Tuple[complex, complex]]:
        half = self.amplitude / 2j
        return [
            (half * np.exp(1j * self.phase), 1j * self.omega),
            (-half * np.exp(-1j * self.phase), -1j * self.omega),
        ]

    def convolve(self, kappa: complex, t: ArrayLike) -> np.ndarray:
        return exp_sum_convolve(self.exp_terms(), kappa, t)

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "Trig":
        return cls(amplitude=schema.amplitude, omega=schema.omega, phase=schema.phase)


@dataclass(frozen=True)
class Exponential(TemporalProfile):
    """amplitude * exp(rate t)."""
    amplitude: float
    rate: float
    kind: ClassVar[str] = "exponential"

    def value(self, t: ArrayLike) -> np.ndarray:
        return self.amplitude * np.exp(self.rate * np.asarray(t, dtype=float))

    def _differentiate(self) -> "Exponential":
        return Exponential(self.amplitude * self.rate, self.rate)

    def sup_bound(self, lo: float, hi: float) -> float:
        return abs(self.amplitude) * max(math.exp(self.rate * lo), math.exp(self.rate * hi))

    def convolve(self, kappa: complex, t: ArrayLike) -> np.ndarray:
        return exp_sum_convolve([(complex(self.amplitude), complex(self.rate))], kappa, t)

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "Exponential":
        return cls(amplitude=schema.amplitude, rate=schema.rate)


@dataclass(frozen=True)
class SampledSignal(TemporalProfile):
    """Piecewise-linear interpolant of samples on a uniform grid over [-T, T]."""
    values: Tuple[float, ...]
    t_max: float
    kind: ClassVar[str] = "sampled_signal"
    max_order: ClassVar[int] = 1
    piecewise_linear: ClassVar[bool] = True

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("A sampled signal needs at least two samples")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.t_max, self.t_max, len(self.values))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def value(self, t: ArrayLike) -> np.ndarray:
        return np.interp(np.asarray(t, dtype=float), self.nodes, self.array)

    def _differentiate(self) -> "FiniteDifferenceDerivative":
        return FiniteDifferenceDerivative(self)

    def sup_bound(self, lo: float, hi: float) -> float:
        inside = self.array[(self.nodes >= lo) & (self.nodes <= hi)]
        ends = self.value(np.array([lo, hi]))
        return float(np.max(np.abs(np.concatenate([inside, ends]))))

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(self.nodes[1:-1])

    def seam_slopes(self) -> Tuple[float, float]:
        """One-sided slopes at t = 0; they can differ only when t = 0 is a node."""
        v = self.array
        step = 2.0 * self.t_max / (len(v) - 1)
        m = len(v) // 2
        if len(v) % 2 == 0:
            slope = float((v[m] - v[m - 1]) / step)
            return slope, slope
        return float((v[m] - v[m - 1]) / step), float((v[m + 1] - v[m]) / step)

    def samples(self) -> np.ndarray:
        return self.array

    @classmethod
    def from_schema(cls, schema, domain: RectDomain) -> "SampledSignal":
        return cls(values=tuple(schema.values), t_max=domain.t_max)


@dataclass(frozen=True)
class FiniteDifferenceDerivative(TemporalProfile):
    """
    First derivative of a sampled signal by differences with step
    h = cbrt(eps) * max(1, |t|): centered inside, one-sided within h of t = +-T.
    """
    signal: SampledSignal
    kind: ClassVar[str] = "finite_difference"
    max_order: ClassVar[int] = 0
    piecewise_linear: ClassVar[bool] = True

    def value(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        g = self.signal.value
        t_max = self.signal.t_max
        h = FD_STEP_FACTOR * np.maximum(1.0, np.abs(t))
        centered = (g(t + h) - g(t - h)) / (2.0 * h)
        backward = (g(t) - g(t - h)) / h
        forward = (g(t + h) - g(t)) / h
        out = np.where(t + h > t_max, backward, centered)
        return np.where(t - h < -t_max, forward, out)

    def _differentiate(self) -> TemporalProfile:
        raise UnsupportedDerivativeError("Sampled signals have no second time derivative")

    def sup_bound(self, lo: float, hi: float) -> float:
        slopes = np.diff(self.signal.array) / np.diff(self.signal.nodes)
        return float(np.max(np.abs(slopes)))

    def breakpoints(self) -> Tuple[float, ...]:
        return self.signal.breakpoints()


# ======================================================================================
# Terms and forcings
# ======================================================================================
SPATIAL_CLASSES: Dict[str, Type[SpatialProfile]] = {
    "sine_mode": SineMode,
    "poly_bubble": PolyBubble,
    "sampled_profile": SampledProfile,
}

TEMPORAL_CLASSES: Dict[str, Type[TemporalProfile]] = {
    "polynomial": PolynomialInT,
    "trig": Trig,
    "exponential": Exponential,
    "sampled_signal": SampledSignal,
}


@dataclass(frozen=True)
class ForcingTerm:
    spatial: SpatialProfile
    temporal: TemporalProfile

    @classmethod
    def create(cls, schema: ForcingTermSchema, domain: RectDomain) -> "ForcingTerm":
        """Factory method building a term from its schema"""
        spatial_class = SPATIAL_CLASSES.get(schema.spatial.kind)
        temporal_class = TEMPORAL_CLASSES.get(schema.temporal.kind)
        if not spatial_class:
            raise ValueError(f"Unsupported spatial profile: {schema.spatial.kind}")
        if not temporal_class:
            raise ValueError(f"Unsupported temporal profile: {schema.temporal.kind}")
        return cls(spatial_class.from_schema(schema.spatial, domain),
                   temporal_class.from_schema(schema.temporal, domain))

    def __repr__(self):
        return f"<ForcingTerm(spatial={self.spatial!r}, temporal={self.temporal!r})>"


@dataclass(frozen=True)
class Forcing:
    """f(x, t) = sum over terms of spatial(x) * temporal(t), on a fixed rectangle."""
    domain: RectDomain
    terms: Tuple[ForcingTerm, ...] = ()
    smoothness_alpha: Optional[float] = None
    zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms and not self.zero:
            raise ValueError("Forcing needs at least one term, or zero=True")
        if self.terms and self.zero:
            raise ValueError("A zero forcing cannot also carry terms")

    @classmethod
    def from_schema(cls, schema: ForcingSchema, domain: RectDomain) -> "Forcing":
        terms = tuple(ForcingTerm.create(term, domain) for term in schema.terms)
        return cls(domain=domain, terms=terms,
                   smoothness_alpha=schema.smoothness_alpha, zero=schema.zero)

    @classmethod
    def zero_for(cls, domain: RectDomain) -> "Forcing":
        return cls(domain=domain, zero=True)

    def __add__(self, other: "Forcing") -> "Forcing":
        if not isinstance(other, Forcing):
            return NotImplemented
        if other.domain != self.domain:
            raise ValueError("Cannot add forcings on different domains")
        terms = self.terms + other.terms
        alphas = [a for a in (self.smoothness_alpha, other.smoothness_alpha) if a is not None]
        return Forcing(domain=self.domain, terms=terms,
                       smoothness_alpha=min(alphas) if alphas else None,
                       zero=not terms)

    @property
    def max_time_order(self) -> int:
        """Highest time derivative every term can supply."""
        return min((term.temporal.max_order for term in self.terms), default=2)

    @property
    def sine_band(self) -> Optional[int]:
        """Largest k when every spatial profile is a sine mode (0 for the zero forcing)."""
        indices = [term.spatial.sine_index for term in self.terms]
        if any(k is None for k in indices):
            return None
        return max(indices, default=0)

    def __repr__(self):
        return f"<Forcing(terms={len(self.terms)}, zero={self.zero}, domain={self.domain!r})>"


def _broadcast(forcing: Forcing, x: ArrayLike, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    forcing.domain.check_point(x, t)
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))


def eval_f(forcing: Forcing, x: ArrayLike, t: ArrayLike) -> np.ndarray:
    """f(x, t); raises DomainError outside the closed rectangle."""
    return eval_f_dt(forcing, x, t, 0)


def eval_f_dt(forcing: Forcing, x: ArrayLike, t: ArrayLike, order: int) -> np.ndarray:
    """d^order f / dt^order at (x, t), order 0, 1 or 2."""
    xs, ts = _broadcast(forcing, x, t)
    temporals = [term.temporal.derivative(order) for term in forcing.terms]
    total = np.zeros(xs.shape, dtype=float)
    for term, temporal in zip(forcing.terms, temporals):
        total = total + term.spatial.value(xs) * temporal.value(ts)
    return total


def validate_compat(forcing: Forcing, domain: RectDomain) -> List[Violation]:
    """Every way the forcing breaks the solver's hypotheses; empty when it is admissible."""
    violations: List[Violation] = []
    if forcing.domain != domain:
        violations.append(Violation(
            code=ViolationCode.DOMAIN_MISMATCH,
            message=f"forcing is bound to {forcing.domain!r}, problem is posed on {domain!r}",
        ))
    alpha = forcing.smoothness_alpha
    if alpha is not None and not 0.0 < alpha < 1.0:
        violations.append(Violation(
            code=ViolationCode.SMOOTHNESS_OUT_OF_RANGE,
            message=f"smoothness_alpha = {alpha} is outside (0, 1)",
        ))
    for index, term in enumerate(forcing.terms):
        for name, samples in (("spatial", term.spatial.samples()), ("temporal", term.temporal.samples())):
            if samples is not None and not np.all(np.isfinite(samples)):
                violations.append(Violation(
                    code=ViolationCode.NONFINITE_SAMPLES,
                    message=f"term {index}: {name} samples contain NaN or infinity",
                ))
        ends = term.spatial.value(np.array([0.0, forcing.domain.p]))
        if not np.all(np.abs(ends) <= BOUNDARY_TOL):
            violations.append(Violation(
                code=ViolationCode.BOUNDARY_NONZERO,
                message=(f"term {index}: spatial profile is {ends[0]!r} at x = 0 and "
                         f"{ends[1]!r} at x = p; both must vanish"),
            ))
        if isinstance(term.temporal, SampledSignal):
            # the interpolant is continuous, so C^1 across the seam is decided by its slopes
            left, right = term.temporal.seam_slopes()
            jump = abs(right - left)
            if not jump <= SEAM_TOL * max(1.0, abs(left), abs(right)):
                violations.append(Violation(
                    code=ViolationCode.SEAM_DISCONTINUITY,
                    message=f"term {index}: df/dt of the temporal samples jumps by {jump!r} across t = 0",
                ))
    return violations


def smoothness_hint(forcing: Forcing) -> List[str]:
    """Warnings about piecewise-linear data, which limits coefficient decay and f''."""
    hints = []
    for index, term in enumerate(forcing.terms):
        if term.spatial.piecewise_linear:
            hints.append(f"term {index}: piecewise-linear spatial profile; sine coefficients "
                         "decay like n^-2 and df/dx is only piecewise constant")
        if term.temporal.piecewise_linear:
            hints.append(f"term {index}: piecewise-linear temporal signal; df/dt uses finite "
                         "differences and d2f/dt2 is unavailable")
    return hints

# mixedspec/operations/series.py
"""
Truncated series solution u = sum_n T_n(t) X_n(x) and its derivative fields.

T_n is alpha_n on the hyperbolic side (t > 0) and beta_n on the parabolic side (t < 0).
On t = 0 itself a side must be named, so both one-sided values stay observable.

Sums are accumulated in ascending n one mode at a time, never through a BLAS product,
so the floating point result does not depend on the number of worker threads.
"""
import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mixedspec.core.config import get_settings
from mixedspec.core.errors import (
    DomainError,
    InsufficientDataError,
    MixedSpecError,
    RejectedForcingError,
    SeamAmbiguityError,
    UnsupportedDerivativeError,
)
from mixedspec.models.domain import ArrayLike, RectDomain
from mixedspec.models.forcing import Forcing, dirichlet_sine, validate_compat
from mixedspec.operations.basis import eigenpair, fit_power_law
from mixedspec.operations.modes import ModeSolution, build_mode
from mixedspec.schemas.config import TruncationMode, TruncationPolicy
from mixedspec.schemas.report import DecayFit, TailBasis, TailReport

logger = logging.getLogger(__name__)

FIELDS = ("u", "ut", "utt", "uxx")
FIELD_UNITS = {"u": "u", "ut": "u/time", "utt": "u/time^2", "uxx": "u/length^2", "ux": "u/length"}
SIDES = ("auto", "plus", "minus")

ADAPTIVE_START = 8
# Explicit terms summed past the last built mode before the integral closure
TAIL_EXPLICIT_TERMS = 1000
SEAM_CHECK_TOL = 1e-9


def _threads(threads: Optional[int]) -> int:
    return max(1, int(threads if threads is not None else get_settings().THREADS))


def _map(func, items: Sequence, threads: Optional[int]) -> list:
    workers = _threads(threads)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# ======================================================================================
# Tail majorants
# ======================================================================================
def _majorant(field_name: str, side: str, lam, env, a_abs, b_abs, c_abs, t_max: float):
    """Bound of |mode amplitude| of a field over one side, from |a|, |b|, |c| and the envelope."""
    s = math.sqrt(t_max / 2.0)
    mu = lam * lam
    if side == "plus":
        ab = a_abs + b_abs
        if field_name == "u":
            return ab + t_max * env / lam
        if field_name == "ut":
            return lam * ab + t_max * env
        if field_name == "uxx":
            return mu * ab + (2.0 + t_max) * env
        if field_name == "utt":
            return mu * ab + (3.0 + t_max) * env
    else:
        if field_name == "u":
            return c_abs + s * env / lam
        if field_name == "ut":
            return 3.0 * env / (mu + 1.0) + s * env / lam
        if field_name == "uxx":
            return env + 3.0 * env / (mu + 1.0) + s * env / lam
        if field_name == "utt":
            return 2.0 * env + s * env / lam
    raise ValueError(f"Unknown field {field_name!r}")


def _coefficient_bounds(lam, env):
    """|a| = |c| and |b| in terms of the envelope alone."""
    mu = lam * lam
    a_abs = (np.abs(1.0 - mu) + 1.0) * env / (mu * (mu + 1.0))
    b_abs = 3.0 * env / (lam * (mu + 1.0))
    return a_abs, b_abs


def _power_terms(field_name: str, side: str, t_max: float) -> List[Tuple[float, float]]:
    """(coefficient, power of lambda) pairs bounding the majorant / envelope for lambda >= 1."""
    s = math.sqrt(t_max / 2.0)
    table = {
        ("u", "plus"): [(1.0, -2.0), (3.0, -3.0), (t_max, -1.0)],
        ("u", "minus"): [(1.0, -2.0), (s, -1.0)],
        ("ut", "plus"): [(1.0, -1.0), (3.0, -2.0), (t_max, 0.0)],
        ("ut", "minus"): [(3.0, -2.0), (s, -1.0)],
        ("utt", "plus"): [(4.0 + t_max, 0.0), (3.0, -1.0)],
        ("utt", "minus"): [(2.0, 0.0), (s, -1.0)],
        ("uxx", "plus"): [(3.0 + t_max, 0.0), (3.0, -1.0)],
        ("uxx", "minus"): [(1.0, 0.0), (3.0, -2.0), (s, -1.0)],
    }
    return table[(field_name, side)]


@dataclass(frozen=True)
class EnvelopeFit:
    """Upper envelope C n**rate of the per-mode forcing envelopes."""
    C: float
    rate: float
    points: int
    basis: TailBasis

    def __call__(self, n):
        return self.C * np.power(np.asarray(n, dtype=float), self.rate)

    def to_schema(self) -> DecayFit:
        return DecayFit(C=self.C, rate=self.rate, points=self.points, basis=self.basis)


def fit_envelope(envelopes: Sequence[float], smoothness_alpha: Optional[float]) -> EnvelopeFit:
    """
    Fit C n**rate to the envelopes, then raise C until every observed point lies under it.

    With fewer than four usable points the rate falls back to -(1 + alpha), or -2 when
    alpha is unknown, and the fit is labelled extrapolated.
    """
    env = np.abs(np.asarray(envelopes, dtype=float))
    ns = np.arange(1, env.size + 1, dtype=float)
    try:
        _, rate, points = fit_power_law(ns, env)
        basis = TailBasis.FITTED
    except InsufficientDataError:
        rate = -(1.0 + smoothness_alpha) if smoothness_alpha is not None else -2.0
        points = int(np.count_nonzero(env))
        basis = TailBasis.EXTRAPOLATED
    positive = env > 0
    C = float(np.max(env[positive] / ns[positive] ** rate)) if np.any(positive) else 0.0
    return EnvelopeFit(C=C, rate=float(rate), points=points, basis=basis)


# ======================================================================================
# Solution
# ======================================================================================
@dataclass(frozen=True)
class SpectralSolution:
    domain: RectDomain
    forcing: Forcing
    modes: Tuple[ModeSolution, ...]
    tol: float
    band: Optional[int] = None
    target_tail: Optional[float] = None
    envelope_fit: Optional[EnvelopeFit] = None
    warnings: Tuple[str, ...] = field(default=())

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def utt_available(self) -> bool:
        return all(mode.has_dtt for mode in self.modes)

    @property
    def band_limited(self) -> bool:
        return self.band is not None and self.band <= self.n_modes

    def truncated(self, n: int) -> "SpectralSolution":
        """The first n modes; modes do not depend on where the series is cut."""
        if not 1 <= n <= self.n_modes:
            raise ValueError(f"Cannot truncate {self.n_modes} modes to {n}")
        return _replace(self, modes=self.modes[:n])

    def with_modes(self, modes: Sequence[ModeSolution]) -> "SpectralSolution":
        return _replace(self, modes=tuple(modes))

    def tail_report(self) -> TailReport:
        bounds = {name: tail_bound(self, name, "all") for name in FIELDS}
        if self.band_limited:
            basis = TailBasis.BAND_LIMITED
        else:
            basis = self.envelope_fit.basis if self.envelope_fit else TailBasis.EXTRAPOLATED
        certified = basis != TailBasis.EXTRAPOLATED and math.isfinite(bounds["u"])
        if self.target_tail is not None:
            certified = certified and bounds["u"] <= self.target_tail
        return TailReport(n_modes=self.n_modes, bounds=bounds, basis=basis, certified=certified)

    def __repr__(self):
        return f"<SpectralSolution(N={self.n_modes}, domain={self.domain!r})>"


def _replace(sol: SpectralSolution, **changes) -> SpectralSolution:
    return dataclasses.replace(sol, **changes)


def _check_seam(mode: ModeSolution) -> None:
    pairs = [(mode.alpha(0.0), mode.beta(0.0)), (mode.alpha_dt(0.0), mode.beta_dt(0.0))]
    if mode.has_dtt:
        pairs.append((mode.alpha_dtt(0.0), mode.beta_dtt(0.0)))
    for plus, minus in pairs:
        scale = max(1.0, abs(float(plus)), abs(float(minus)))
        if abs(float(plus) - float(minus)) > SEAM_CHECK_TOL * scale:
            raise MixedSpecError(f"Mode {mode.n} fails its seam identities: {float(plus)!r} vs {float(minus)!r}")


def _build_modes(forcing: Forcing, domain: RectDomain, first: int, last: int, tol: float,
                 threads: Optional[int]) -> List[ModeSolution]:
    def build(n: int) -> ModeSolution:
        mode = build_mode(forcing, eigenpair(n, domain), tol)
        _check_seam(mode)
        return mode
    return _map(build, list(range(first, last + 1)), threads)


def tail_bound(sol: SpectralSolution, field_name: str, t_region: str = "all") -> float:
    """
    Bound on sup |sum_{n > N} X_n(x) T_n(t)| for a field over a region ('plus', 'minus', 'all').

    Band-limited forcings give exactly 0. Otherwise the per-mode majorants are summed
    explicitly past N using the fitted envelope and closed with a power-law integral;
    +inf means the majorant is not summable.
    """
    if field_name not in FIELDS:
        raise ValueError(f"Unknown field {field_name!r}")
    if t_region not in ("plus", "minus", "all"):
        raise ValueError(f"t_region must be 'plus', 'minus' or 'all', got {t_region!r}")
    if sol.band_limited:
        return 0.0
    if field_name == "utt" and not sol.utt_available:
        return math.inf
    fit = sol.envelope_fit
    if fit is None:
        return math.inf
    sides = ("plus", "minus") if t_region == "all" else (t_region,)
    return max(_tail_side(sol, fit, field_name, side) for side in sides)


def _tail_side(sol: SpectralSolution, fit: EnvelopeFit, field_name: str, side: str) -> float:
    p, t_max = sol.domain.p, sol.domain.t_max
    norm = math.sqrt(2.0 / p)
    start = sol.n_modes + 1
    stop = max(start + TAIL_EXPLICIT_TERMS, int(math.ceil(p / math.pi)) + 1)
    ns = np.arange(start, stop + 1, dtype=float)
    lam = ns * math.pi / p
    env = fit(ns)
    a_abs, b_abs = _coefficient_bounds(lam, env)
    explicit = float(np.sum(_majorant(field_name, side, lam, env, a_abs, b_abs, a_abs, t_max)))
    closure = 0.0
    for coef, power in _power_terms(field_name, side, t_max):
        exponent = fit.rate + power
        if fit.C == 0.0:
            continue
        if exponent >= -1.0:
            return math.inf
        scale = fit.C * coef * (math.pi / p) ** power
        closure += scale * stop ** (exponent + 1.0) / (-exponent - 1.0)
    return norm * (explicit + closure)


def solve(forcing: Forcing, domain: RectDomain, policy: TruncationPolicy, tol: float = 1e-12,
          threads: Optional[int] = None) -> SpectralSolution:
    """
    Build modes 1..N for the forcing.

    Fixed policies build exactly N modes. Adaptive policies double N from 8 until the
    tail bound of u falls under tail_tol or n_cap is reached, then cut back to the
    smallest N whose bound still meets the target.

    Raises:
    - RejectedForcingError: if validate_compat reports violations.
    """
    violations = validate_compat(forcing, domain)
    if violations:
        raise RejectedForcingError(violations)
    band = forcing.sine_band
    warnings = []
    if policy.mode == TruncationMode.FIXED:
        n_target = policy.n
    elif band is not None:
        n_target = min(max(1, band), policy.n_cap)
    else:
        n_target = min(ADAPTIVE_START, policy.n_cap)
    logger.info("Solving with %s truncation, starting at N = %d", policy.mode.value, n_target)

    modes = _build_modes(forcing, domain, 1, n_target, tol, threads)
    sol = _finish(forcing, domain, modes, tol, band, policy)

    if policy.mode == TruncationMode.ADAPTIVE and band is None:
        while True:
            bound = tail_bound(sol, "u", "all")
            logger.debug("Adaptive round: N = %d, tail bound of u = %.3e", sol.n_modes, bound)
            if bound <= policy.tail_tol or sol.n_modes >= policy.n_cap:
                break
            n_next = min(2 * sol.n_modes, policy.n_cap)
            modes = modes + _build_modes(forcing, domain, sol.n_modes + 1, n_next, tol, threads)
            sol = _finish(forcing, domain, modes, tol, band, policy)
        sol = _cut_back(sol, policy.tail_tol)
        if tail_bound(sol, "u", "all") > policy.tail_tol:
            warnings.append(f"tail not certified: n_cap = {policy.n_cap} reached before tail_tol")
            logger.warning("Tail bound not under %.3e at n_cap = %d", policy.tail_tol, policy.n_cap)
    elif band is not None and band > sol.n_modes:
        warnings.append(f"forcing reaches mode {band} but only {sol.n_modes} modes were kept")

    sol = _replace(sol, warnings=tuple(warnings))
    report = sol.tail_report()
    logger.info("Solved with N = %d modes, tail bound of u = %.3e (%s, certified=%s)",
                sol.n_modes, report.bounds["u"], report.basis.value, report.certified)
    return sol


def _finish(forcing, domain, modes, tol, band, policy) -> SpectralSolution:
    envelopes = [mode.samples.envelope() for mode in modes]
    fit = fit_envelope(envelopes, forcing.smoothness_alpha) if any(envelopes) else EnvelopeFit(
        C=0.0, rate=-2.0, points=0, basis=TailBasis.EXTRAPOLATED)
    target = policy.tail_tol if policy.mode == TruncationMode.ADAPTIVE else None
    return SpectralSolution(domain=domain, forcing=forcing, modes=tuple(modes), tol=tol,
                            band=band, target_tail=target, envelope_fit=fit)


def _cut_back(sol: SpectralSolution, tail_tol: float) -> SpectralSolution:
    """Smallest prefix whose u tail bound still meets tail_tol; the bound shrinks as N grows."""
    if tail_bound(sol, "u", "all") > tail_tol:
        return sol
    lo, hi = 1, sol.n_modes
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_bound(sol.truncated(mid), "u", "all") <= tail_tol:
            hi = mid
        else:
            lo = mid + 1
    return sol.truncated(lo)


# ======================================================================================
# Field evaluation
# ======================================================================================
def _sides_for(domain: RectDomain, t: np.ndarray, side: str) -> np.ndarray:
    """Boolean mask of points evaluated on the hyperbolic (plus) side."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if side == "auto":
        if np.any(t == 0.0):
            raise SeamAmbiguityError("t = 0 lies on the seam; pass side='plus' or side='minus'")
        return t > 0.0
    if side == "plus":
        if np.any(t < 0.0):
            raise DomainError("side='plus' requested at t < 0")
        return np.ones(t.shape, dtype=bool)
    if np.any(t > 0.0):
        raise DomainError("side='minus' requested at t > 0")
    return np.zeros(t.shape, dtype=bool)


def _mode_amplitudes(mode: ModeSolution, field_name: str, t: np.ndarray, plus: np.ndarray) -> np.ndarray:
    base = "u" if field_name == "ux" else field_name
    out = np.zeros(t.shape, dtype=float)
    if np.any(plus):
        out[plus] = mode.amplitude(base, t[plus], "plus")
    if np.any(~plus):
        out[~plus] = mode.amplitude(base, t[~plus], "minus")
    return out


def _spatial(mode: ModeSolution, field_name: str, x: np.ndarray) -> np.ndarray:
    if field_name == "ux":
        return mode.pair.norm * mode.lam * np.cos(mode.lam * x)
    return dirichlet_sine(mode.n, mode.pair.p, x)


def eval_field(sol: SpectralSolution, field_name: str, x: ArrayLike, t: ArrayLike, side: str = "auto",
               threads: Optional[int] = None) -> np.ndarray:
    """sum_n X_n(x) T_n(t) for a field, pointwise over broadcast x and t."""
    if field_name not in FIELDS + ("ux",):
        raise ValueError(f"Unknown field {field_name!r}")
    sol.domain.check_point(x, t)
    xs, ts = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if field_name == "utt" and not sol.utt_available:
        raise UnsupportedDerivativeError("u_tt needs f'' for every mode")
    plus = _sides_for(sol.domain, ts, side)
    flat_t = ts.reshape(-1)
    flat_plus = plus.reshape(-1)
    amplitudes = _map(lambda mode: _mode_amplitudes(mode, field_name, flat_t, flat_plus), sol.modes, threads)
    total = np.zeros(flat_t.shape, dtype=float)
    flat_x = xs.reshape(-1)
    for mode, amp in zip(sol.modes, amplitudes):
        total = total + _spatial(mode, field_name, flat_x) * amp
    return total.reshape(xs.shape)


def eval_u(sol, x, t, side="auto", threads=None):
    return eval_field(sol, "u", x, t, side, threads)


def eval_ut(sol, x, t, side="auto", threads=None):
    return eval_field(sol, "ut", x, t, side, threads)


def eval_utt(sol, x, t, side="auto", threads=None):
    return eval_field(sol, "utt", x, t, side, threads)


def eval_uxx(sol, x, t, side="auto", threads=None):
    return eval_field(sol, "uxx", x, t, side, threads)


def eval_ux(sol, x, t, side="auto", threads=None):
    return eval_field(sol, "ux", x, t, side, threads)


def eval_forcing_truncated(sol: SpectralSolution, x: ArrayLike, t: ArrayLike) -> np.ndarray:
    """f_N(x, t) = sum_{n <= N} f_n(t) X_n(x)."""
    xs, ts = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    total = np.zeros(xs.shape, dtype=float)
    for mode in sol.modes:
        total = total + _spatial(mode, "u", xs) * mode.samples.value(ts)
    return total


def field_table(sol: SpectralSolution, field_name: str, xs: np.ndarray, ts: np.ndarray, plus: np.ndarray,
                threads: Optional[int] = None) -> np.ndarray:
    """Field on the tensor grid xs by ts, shape (len(xs), len(ts)), plus marking hyperbolic rows."""
    amplitudes = _map(lambda mode: _mode_amplitudes(mode, field_name, ts, plus), sol.modes, threads)
    total = np.zeros((xs.size, ts.size), dtype=float)
    for mode, amp in zip(sol.modes, amplitudes):
        total = total + _spatial(mode, field_name, xs)[:, None] * amp[None, :]
    return total


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """
    Fields tabulated on a uniform x grid and a uniform t grid over [-T, T] whose seam
    node is stored twice, once per side. A field is None when it cannot be evaluated.
    """
    x: np.ndarray
    t: np.ndarray
    plus: np.ndarray
    seam: np.ndarray
    values: Dict[str, Optional[np.ndarray]]
    units: Dict[str, str]

    @property
    def side_labels(self) -> List[str]:
        labels = []
        for is_plus, is_seam in zip(self.plus, self.seam):
            labels.append(("+" if is_plus else "-") if is_seam else "interior")
        return labels

    def rows(self):
        """(x, t, side, u, ut, utt, uxx) tuples, x-major then t; utt is None when absent."""
        labels = self.side_labels
        for i, x in enumerate(self.x):
            for j, t in enumerate(self.t):
                yield (float(x), float(t), labels[j]) + tuple(
                    None if self.values[name] is None else float(self.values[name][i, j])
                    for name in FIELDS
                )


def time_rows(domain: RectDomain, nt: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """t values, plus-side mask and seam mask with the seam duplicated (nt+1 rows for odd nt, nt+2 for even)."""
    if nt < 3:
        raise ValueError("nt must be at least 3")
    nodes = domain.t_max * np.linspace(-1.0, 1.0, nt)
    if nt % 2 == 1:
        nodes[nt // 2] = 0.0
        negative, positive = nodes[: nt // 2], nodes[nt // 2 + 1:]
    else:
        negative, positive = nodes[: nt // 2], nodes[nt // 2:]
    t = np.concatenate([negative, [0.0, 0.0], positive])
    plus = np.concatenate([np.zeros(negative.size, bool), [False, True], np.ones(positive.size, bool)])
    seam = np.concatenate([np.zeros(negative.size, bool), [True, True], np.zeros(positive.size, bool)])
    return t, plus, seam


def sample_grid(sol: SpectralSolution, nx: int, nt: int, threads: Optional[int] = None) -> FieldGrid:
    """Tabulate u, u_t, u_tt and u_xx; u_tt is None when f'' is unavailable."""
    if nx < 3:
        raise ValueError("nx must be at least 3")
    xs = np.linspace(0.0, sol.domain.p, nx)
    ts, plus, seam = time_rows(sol.domain, nt)
    values: Dict[str, Optional[np.ndarray]] = {}
    for name in FIELDS:
        try:
            if name == "utt" and not sol.utt_available:
                raise UnsupportedDerivativeError("u_tt needs f''")
            values[name] = field_table(sol, name, xs, ts, plus, threads)
        except UnsupportedDerivativeError:
            logger.warning("Field %s is unavailable for this forcing and is left empty", name)
            values[name] = None
    return FieldGrid(x=xs, t=ts, plus=plus, seam=seam, values=values,
                     units={name: FIELD_UNITS[name] for name in FIELDS})

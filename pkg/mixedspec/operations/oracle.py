# mixedspec/operations/oracle.py

"""
Module: oracle.py

Independent ground truth for the closed-form solver. Nothing here uses the closed-form
coefficients or the Duhamel convolutions:

- the seam coefficients come from a 3x3 linear system assembled from the general ODE
  solutions and the three seam conditions at t = 0;
- the hyperbolic mode ODE is integrated by classical RK4;
- the parabolic mode ODE is marched backward from the seam by an exponential stepper;
- the whole field is propagated by leapfrog (t > 0) and Crank-Nicolson (t < 0);
- projections are recomputed at ten times the panel density.

Functions:
- conjugation_system(f_n0, fp_n0, lam) -> ConjugationSystem
- conjugation_solve(f_n0, fp_n0, lam) -> (a, b, c)
- integrate_mode_hyp(samples, lam, a, b, t_grid) -> alpha values
- integrate_mode_par(samples, lam, c, t_grid) -> beta values
- fd_propagate(sol, forcing, nx, nt, seam_velocity_scale) -> FdPropagation
- quad_reference(forcing, n, t, domain) -> f_n(t)
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import solve, solve_banded
from scipy.special import gamma, gammainc

from mixedspec.core.errors import CFLError, StabilityError, StepSizeError
from mixedspec.models.domain import RectDomain
from mixedspec.models.forcing import Forcing, eval_f
from mixedspec.operations.basis import ModeCoefficientSamples, eigenpair, mode_samples
from mixedspec.operations.series import SpectralSolution, field_table

logger = logging.getLogger(__name__)

RK4_STEP_FACTOR = 0.05
REFERENCE_TOL = 1e-13
REFERENCE_DENSITY = 10
GRID_SLACK = 1e-9

# Cubic through s = 0, 1/3, 2/3, 1 on the unit step: values -> monomial coefficients
_CUBIC_NODES = np.array([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
_CUBIC_INVERSE = np.linalg.inv(np.vander(_CUBIC_NODES, 4, increasing=True))


@dataclass(frozen=True)
class ConjugationSystem:
    """
    Seam conditions at t = 0 for the general solutions
    alpha = a cos + b sin + particular, beta = c exp(lam^2 t) + particular:

        a - c                 = 0
        lam b - lam^2 c       = f_n(0)
        -lam^2 a - lam^4 c    = lam^2 f_n(0) + f_n'(0) - f_n(0)
    """
    matrix: np.ndarray
    rhs: np.ndarray

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    def solve(self) -> Tuple[float, float, float]:
        # rows differ by powers of lam; equilibrate before LU with partial pivoting
        scale = np.max(np.abs(self.matrix), axis=1)
        a, b, c = solve(self.matrix / scale[:, None], self.rhs / scale)
        return float(a), float(b), float(c)


def conjugation_system(f_n0: float, fp_n0: float, lam: float) -> ConjugationSystem:
    if not lam > 0:
        raise ValueError("Eigenfrequency must be positive")
    mu = lam * lam
    matrix = np.array([
        [1.0, 0.0, -1.0],
        [0.0, lam, -mu],
        [-mu, 0.0, -mu * mu],
    ])
    rhs = np.array([0.0, f_n0, mu * f_n0 + fp_n0 - f_n0])
    return ConjugationSystem(matrix=matrix, rhs=rhs)


def conjugation_solve(f_n0: float, fp_n0: float, lam: float) -> Tuple[float, float, float]:
    """
    Seam coefficients (a, b, c) by direct elimination.

    Example:
    >>> conjugation_solve(0.0, 1.0, 1.0)
    (-0.5, -0.5, -0.5)
    """
    return conjugation_system(f_n0, fp_n0, lam).solve()


def _uniform_step(t_grid: np.ndarray) -> float:
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise ValueError("Time grid needs at least two points")
    steps = np.diff(t_grid)
    h = float(steps[0])
    if h == 0.0 or np.any(np.abs(steps - h) > GRID_SLACK * max(1.0, abs(h))):
        raise ValueError("Time grid must be uniform")
    return h


def integrate_mode_hyp(samples: ModeCoefficientSamples, lam: float, a: float, b: float,
                       t_grid) -> np.ndarray:
    """
    RK4 for alpha'' + lam^2 alpha = f_n with alpha(0) = a, alpha'(0) = lam b.

    Raises:
    - StepSizeError: if the step exceeds 0.05 / lam.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    h = _uniform_step(t_grid)
    if t_grid[0] != 0.0 or h < 0:
        raise ValueError("Hyperbolic grid must start at t = 0 and increase")
    max_step = RK4_STEP_FACTOR / lam
    if h > max_step * (1.0 + GRID_SLACK):
        raise StepSizeError(h, max_step)
    samples.domain.check_t(t_grid, 0.0, samples.domain.t_max)
    mu = lam * lam

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], float(samples.value(t)) - mu * y[0]])

    y = np.array([a, lam * b], dtype=float)
    out = np.empty(t_grid.size)
    out[0] = y[0]
    for k in range(t_grid.size - 1):
        t = t_grid[k]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y[0]
    return out


def _exp_moments(mu: float, h: float) -> np.ndarray:
    """int_0^h z^k exp(-mu z) dz for k = 0..3."""
    ks = np.arange(4)
    if mu == 0.0:
        return h ** (ks + 1) / (ks + 1)
    return gamma(ks + 1) / mu ** (ks + 1) * gammainc(ks + 1, mu * h)


def integrate_mode_par(samples: ModeCoefficientSamples, lam: float, c: float, t_grid) -> np.ndarray:
    """
    beta' - lam^2 beta = f_n from beta(0) = c, marched from t = 0 down to -T.

    Each step is beta(t - h) = exp(-lam^2 h) beta(t) - int_0^h f_n(t - h + z) exp(-lam^2 z) dz,
    with f_n replaced by its cubic interpolant on the step and the moments taken exactly.

    Raises:
    - StabilityError: if the grid increases; forward marching grows like exp(lam^2 t).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    step = _uniform_step(t_grid)
    if step > 0:
        raise StabilityError(
            "The parabolic mode equation must be marched backward from t = 0: forward "
            "marching amplifies errors by exp(lambda^2 t)"
        )
    if t_grid[0] != 0.0:
        raise ValueError("Parabolic grid must start at t = 0")
    samples.domain.check_t(t_grid, samples.domain.t_min, 0.0)
    h = -step
    mu = lam * lam
    decay = math.exp(-mu * h)
    weights = _CUBIC_INVERSE.T @ (_exp_moments(mu, h) / h ** np.arange(4))
    out = np.empty(t_grid.size)
    out[0] = c
    beta = c
    for k in range(t_grid.size - 1):
        left = t_grid[k] - h
        nodes = left + _CUBIC_NODES * h
        source = float(weights @ samples.value(nodes))
        beta = decay * beta - source
        out[k + 1] = beta
    return out


@dataclass(frozen=True, eq=False)
class FdPropagation:
    """Finite-difference fields on both sides and their deviation from the spectral fields."""
    x: np.ndarray
    t_plus: np.ndarray
    t_minus: np.ndarray
    u_plus: np.ndarray
    u_minus: np.ndarray
    deviation_plus: np.ndarray
    deviation_minus: np.ndarray
    seam_velocity_scale: float

    @property
    def max_deviation_plus(self) -> float:
        return float(np.max(self.deviation_plus))

    @property
    def max_deviation_minus(self) -> float:
        return float(np.max(self.deviation_minus))

    @property
    def max_deviation(self) -> float:
        return max(self.max_deviation_plus, self.max_deviation_minus)


def _laplacian(u: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
    return out


def fd_propagate(sol: SpectralSolution, forcing: Forcing, nx: int, nt: int,
                 seam_velocity_scale: float = 1.0) -> FdPropagation:
    """
    Propagate the seam data of ``sol`` through the full forcing with standard schemes.

    t > 0: leapfrog for u_tt = u_xx + f, first step by Taylor expansion.
    t < 0: with s = -t, u_s = u_xx - f(x, -s) by Crank-Nicolson.

    The deviation per time row is max_x |u_fd - u_spectral|. Because the start values come
    from the spectral solution, this checks that the series solves the equation, not that
    the solution is unique.

    Raises:
    - CFLError: if dt > dx.
    """
    if nx < 3 or nt < 3:
        raise ValueError("Grid sizes must be at least 3")
    domain = sol.domain
    x = np.linspace(0.0, domain.p, nx)
    dx = domain.p / (nx - 1)
    dt = domain.t_max / (nt - 1)
    if dt > dx * (1.0 + 1e-12):
        raise CFLError(dt, dx)
    t_plus = np.linspace(0.0, domain.t_max, nt)
    t_minus = -t_plus

    u0_plus = field_table(sol, "u", x, np.array([0.0]), np.array([True]))[:, 0]
    v0 = seam_velocity_scale * field_table(sol, "ut", x, np.array([0.0]), np.array([True]))[:, 0]
    u0_minus = field_table(sol, "u", x, np.array([0.0]), np.array([False]))[:, 0]

    # hyperbolic side
    u_plus = np.zeros((nt, nx))
    u_plus[0] = u0_plus
    f0 = eval_f(forcing, x, 0.0)
    u_plus[1] = u0_plus + dt * v0 + 0.5 * dt * dt * (_laplacian(u0_plus, dx) + f0)
    u_plus[1, [0, -1]] = 0.0
    for k in range(1, nt - 1):
        nxt = 2.0 * u_plus[k] - u_plus[k - 1] + dt * dt * (_laplacian(u_plus[k], dx) + eval_f(forcing, x, t_plus[k]))
        nxt[[0, -1]] = 0.0
        u_plus[k + 1] = nxt

    # parabolic side in s = -t
    m = nx - 2
    r = dt / (dx * dx)
    banded = np.zeros((3, m))
    banded[0, 1:] = -0.5 * r
    banded[1, :] = 1.0 + r
    banded[2, :-1] = -0.5 * r
    u_minus = np.zeros((nt, nx))
    u_minus[0] = u0_minus
    f_prev = eval_f(forcing, x, t_minus[0])
    for k in range(nt - 1):
        f_next = eval_f(forcing, x, t_minus[k + 1])
        v = u_minus[k]
        explicit = v[1:-1] + 0.5 * dt * _laplacian(v, dx)[1:-1]
        rhs = explicit - 0.5 * dt * (f_prev[1:-1] + f_next[1:-1])
        u_minus[k + 1, 1:-1] = solve_banded((1, 1), banded, rhs)
        f_prev = f_next

    spectral_plus = field_table(sol, "u", x, t_plus, np.ones(nt, dtype=bool))
    spectral_minus = field_table(sol, "u", x, t_minus, np.zeros(nt, dtype=bool))
    deviation_plus = np.max(np.abs(u_plus - spectral_plus.T), axis=1)
    deviation_minus = np.max(np.abs(u_minus - spectral_minus.T), axis=1)
    logger.debug("FD cross-check on %dx%d: deviation %.3e (t > 0), %.3e (t < 0)",
                 nx, nt, deviation_plus.max(), deviation_minus.max())
    return FdPropagation(x=x, t_plus=t_plus, t_minus=t_minus, u_plus=u_plus, u_minus=u_minus,
                         deviation_plus=deviation_plus, deviation_minus=deviation_minus,
                         seam_velocity_scale=seam_velocity_scale)


def quad_reference(forcing: Forcing, n: int, t, domain: RectDomain) -> np.ndarray:
    """f_n(t) recomputed at ten times the panel density with tolerance 1e-13."""
    domain.check_t(t)
    samples = mode_samples(forcing, eigenpair(n, domain), REFERENCE_TOL, density=REFERENCE_DENSITY)
    return samples.value(t)

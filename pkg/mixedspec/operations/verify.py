# mixedspec/operations/verify.py
"""
Checks that a spectral solution does what it claims.

Residuals of both equations, the seam jumps, boundary values, the integral bounds on the
Duhamel terms, the homogeneous-problem and projection round trip, the expanded derivative
forms, coefficient decay, and the Dirichlet-type degeneracy expression. Report builders
never raise on a failed check; they record it.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from mixedspec.core.errors import CFLError, InsufficientDataError
from mixedspec.models.domain import RectDomain
from mixedspec.models.forcing import Forcing, ForcingTerm, PolynomialInT, SineMode, dirichlet_sine, eval_f, smoothness_hint
from mixedspec.operations.basis import ModeCoefficientSamples, decay_estimate
from mixedspec.operations.modes import duhamel_hyp, duhamel_par, printed_form_checks
from mixedspec.operations.oracle import fd_propagate
from mixedspec.operations.quadrature import integrate, oscillation_panels
from mixedspec.operations.series import (
    FIELDS,
    SpectralSolution,
    eval_field,
    eval_forcing_truncated,
    field_table,
    sample_grid,
    solve,
)
from mixedspec.schemas.config import GridConfig, Tolerances, TruncationPolicy, VerifyOptions
from mixedspec.schemas.report import (
    BoundCheck,
    ConjugationReport,
    ConvergenceRow,
    ConvergenceTable,
    DegeneracyScan,
    FdCrossCheck,
    PrintedFormCheck,
    RegionResiduals,
    ResidualReport,
    UniquenessReport,
    VerificationReport,
    WallLimitProbe,
)

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-10
BOUND_SLACK = 1e-12
WALL_OFFSET = 1e-3
WALL_RATIO = 1e-2
PROJECTION_TOL = 1e-12
LEADING_MODES = 3


# ======================================================================================
# Residuals
# ======================================================================================
def _norms(residual: np.ndarray, dx: float, dt: float) -> RegionResiduals:
    if residual.size == 0:
        return RegionResiduals(linf=0.0, l2=0.0, points=0)
    return RegionResiduals(
        linf=float(np.max(np.abs(residual))),
        l2=float(math.sqrt(np.sum(residual * residual) * dx * dt)),
        points=int(residual.size),
    )


def _forcing_table(sol: SpectralSolution, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    return eval_forcing_truncated(sol, xs[:, None], ts[None, :])


def _utt_by_ode(sol: SpectralSolution, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    total = np.zeros((xs.size, ts.size))
    for mode in sol.modes:
        total = total + dirichlet_sine(mode.n, mode.pair.p, xs)[:, None] * mode.alpha_dtt_ode(ts)[None, :]
    return total


def residual_pde(sol: SpectralSolution, forcing: Forcing, nx: int, nt: int,
                 threads: Optional[int] = None) -> ResidualReport:
    """
    u_tt - u_xx - f_N on the hyperbolic part and u_t + u_xx - f_N on the parabolic part.

    The spectral variant uses the derivative series; the stencil variant differentiates
    u alone by centered differences, only where the stencil stays inside its region.
    f_N is the forcing truncated to the solution's modes; max |f - f_N| is reported apart.
    """
    domain = sol.domain
    xs = np.linspace(0.0, domain.p, nx)
    dx = xs[1] - xs[0]
    t_plus = np.linspace(0.0, domain.t_max, nt)
    t_minus = -t_plus[::-1]
    dt = t_plus[1] - t_plus[0]
    xi, ti = xs[1:-1], t_plus[1:-1]
    ti_minus = t_minus[1:-1]
    ones, zeros = np.ones(ti.size, bool), np.zeros(ti_minus.size, bool)

    f_plus = _forcing_table(sol, xi, ti)
    f_minus = _forcing_table(sol, xi, ti_minus)
    uxx_plus = field_table(sol, "uxx", xi, ti, ones, threads)
    if sol.utt_available:
        utt_plus = field_table(sol, "utt", xi, ti, ones, threads)
    else:
        logger.warning("u_tt series unavailable; hyperbolic residual uses the mode ODE identity")
        utt_plus = _utt_by_ode(sol, xi, ti)
    spectral_plus = utt_plus - uxx_plus - f_plus
    spectral_minus = (field_table(sol, "ut", xi, ti_minus, zeros, threads)
                      + field_table(sol, "uxx", xi, ti_minus, zeros, threads) - f_minus)

    u_plus = field_table(sol, "u", xs, t_plus, np.ones(nt, bool), threads)
    u_minus = field_table(sol, "u", xs, t_minus, np.zeros(nt, bool), threads)
    stencil_plus = ((u_plus[1:-1, 2:] - 2.0 * u_plus[1:-1, 1:-1] + u_plus[1:-1, :-2]) / dt ** 2
                    - (u_plus[2:, 1:-1] - 2.0 * u_plus[1:-1, 1:-1] + u_plus[:-2, 1:-1]) / dx ** 2
                    - f_plus)
    stencil_minus = ((u_minus[1:-1, 2:] - u_minus[1:-1, :-2]) / (2.0 * dt)
                     + (u_minus[2:, 1:-1] - 2.0 * u_minus[1:-1, 1:-1] + u_minus[:-2, 1:-1]) / dx ** 2
                     - f_minus)

    full_plus = eval_f(forcing, xi[:, None], ti[None, :])
    full_minus = eval_f(forcing, xi[:, None], ti_minus[None, :])
    truncation = max(float(np.max(np.abs(full_plus - f_plus), initial=0.0)),
                     float(np.max(np.abs(full_minus - f_minus), initial=0.0)))
    return ResidualReport(
        spectral_plus=_norms(spectral_plus, dx, dt),
        spectral_minus=_norms(spectral_minus, dx, dt),
        stencil_plus=_norms(stencil_plus, dx, dt),
        stencil_minus=_norms(stencil_minus, dx, dt),
        forcing_truncation=truncation,
        hyperbolic_via_ode_identity=not sol.utt_available,
        nx=nx,
        nt=nt,
    )


# ======================================================================================
# Seam and walls
# ======================================================================================
def check_conjugation(sol: SpectralSolution, n_x_samples: int = 33, probe_offset: float = 1e-4,
                      threads: Optional[int] = None) -> ConjugationReport:
    """Largest jumps of u, u_t, u_tt across t = 0, plus one-sided difference estimates."""
    if not probe_offset > 0:
        raise ValueError("probe_offset must be positive")
    xs = np.linspace(0.0, sol.domain.p, n_x_samples)
    seam = np.array([0.0, 0.0])
    sides = np.array([False, True])

    def jump(name: str) -> float:
        table = field_table(sol, name, xs, seam, sides, threads)
        return float(np.max(np.abs(table[:, 1] - table[:, 0])))

    utt_checked = sol.utt_available
    if not utt_checked:
        logger.warning("u_tt jump not checked: f'' unavailable")

    h = min(probe_offset, 0.5 * sol.domain.t_max)
    t_probe = np.array([-2 * h, -h, 0.0, 0.0, h, 2 * h])
    probe_sides = np.array([False, False, False, True, True, True])
    u = field_table(sol, "u", xs, t_probe, probe_sides, threads)
    um2, um1, um0, up0, up1, up2 = (u[:, k] for k in range(6))
    ut_plus = (-3.0 * up0 + 4.0 * up1 - up2) / (2.0 * h)
    ut_minus = (3.0 * um0 - 4.0 * um1 + um2) / (2.0 * h)
    utt_plus = (up0 - 2.0 * up1 + up2) / h ** 2
    utt_minus = (um0 - 2.0 * um1 + um2) / h ** 2
    return ConjugationReport(
        jump_u=jump("u"),
        jump_ut=jump("ut"),
        jump_utt=jump("utt") if utt_checked else None,
        utt_checked=utt_checked,
        probe_jump_u=float(np.max(np.abs(up1 - um1))),
        probe_jump_ut=float(np.max(np.abs(ut_plus - ut_minus))),
        probe_jump_utt=float(np.max(np.abs(utt_plus - utt_minus))),
        samples=n_x_samples,
        probe_offset=probe_offset,
    )


def boundary_max(sol: SpectralSolution, nt: int, threads: Optional[int] = None) -> float:
    """max |u| over the two walls on the sampling grid's time rows."""
    grid = sample_grid(sol, 3, nt, threads)
    u = grid.values["u"]
    return float(max(np.max(np.abs(u[0])), np.max(np.abs(u[-1]))))


def wall_limit_probe(sol: SpectralSolution, nt: int = 33, threads: Optional[int] = None) -> WallLimitProbe:
    """
    x u_x near x = 0 and (p - x) u_x near x = p, against max |u|.

    Debug regression only: the sine series makes both limits vanish.
    """
    p = sol.domain.p
    x_left, x_right = WALL_OFFSET * p, p - WALL_OFFSET * p
    grid = sample_grid(sol, 33, nt, threads)
    ux = field_table(sol, "ux", np.array([x_left, x_right]), grid.t, grid.plus, threads)
    value_left = float(np.max(np.abs(x_left * ux[0])))
    value_right = float(np.max(np.abs((p - x_right) * ux[1])))
    u_max = float(np.max(np.abs(grid.values["u"])))
    passed = max(value_left, value_right) <= WALL_RATIO * u_max or u_max == 0.0
    logger.debug("Wall probe: |x u_x| = %.3e, %.3e against max |u| = %.3e", value_left, value_right, u_max)
    return WallLimitProbe(x_left=x_left, x_right=x_right, value_left=value_left,
                          value_right=value_right, u_max=u_max, passed=passed)


# ======================================================================================
# Uniqueness and projection round trip
# ======================================================================================
def _project_field(sol: SpectralSolution, field_name: str, n: int, t: float, side: str) -> float:
    """int_0^p field(x, t) X_n(x) dx by quadrature."""
    top = max(n, sol.n_modes) * math.pi / sol.domain.p
    result = integrate(
        lambda x: eval_field(sol, field_name, x, np.full(x.shape, t), side) * dirichlet_sine(n, sol.domain.p, x),
        0.0,
        sol.domain.p,
        PROJECTION_TOL,
        min_panels=max(4, oscillation_panels(top, sol.domain.p)),
    )
    return float(result.value)


def uniqueness_probe(domain: RectDomain, policy: TruncationPolicy, forcing: Optional[Forcing] = None,
                     tolerances: Optional[Tolerances] = None, n_times: int = 5,
                     threads: Optional[int] = None) -> UniquenessReport:
    """
    The homogeneous problem has only the zero solution, and projecting a nonzero solution
    back onto the basis recovers its mode amplitudes, which satisfy the mode ODEs.

    The nonzero solution defaults to the forcing X_1(x) * 1.
    """
    tolerances = tolerances or Tolerances()
    zero = solve(Forcing.zero_for(domain), domain, policy, tolerances.quadrature, threads)
    zero_exact = all(mode.coeffs.is_zero() for mode in zero.modes)
    grid = sample_grid(zero, 9, 9, threads)
    zero_fields = max(float(np.max(np.abs(v))) for v in grid.values.values() if v is not None)

    if forcing is None or forcing.zero:
        forcing = Forcing(domain=domain, terms=(ForcingTerm(SineMode(1, domain.p), PolynomialInT((1.0,))),))
    sol = solve(forcing, domain, policy, tolerances.quadrature, threads)
    t_plus = np.linspace(0.0, domain.t_max, n_times + 1)[1:]
    t_minus = -t_plus

    roundtrip = 0.0
    ode_hyp: Optional[float] = 0.0 if sol.utt_available else None
    ode_par = 0.0
    for mode in sol.modes[: min(sol.n_modes, LEADING_MODES)]:
        for t in t_plus:
            alpha = _project_field(sol, "u", mode.n, t, "plus")
            roundtrip = max(roundtrip, abs(alpha - float(mode.alpha(t))))
            if ode_hyp is not None:
                alpha_tt = _project_field(sol, "utt", mode.n, t, "plus")
                ode_hyp = max(ode_hyp, abs(alpha_tt + mode.mu * alpha - float(mode.samples.value(t))))
        for t in t_minus:
            beta = _project_field(sol, "u", mode.n, t, "minus")
            roundtrip = max(roundtrip, abs(beta - float(mode.beta(t))))
            beta_t = _project_field(sol, "ut", mode.n, t, "minus")
            ode_par = max(ode_par, abs(beta_t - mode.mu * beta - float(mode.samples.value(t))))

    orthogonality = 0.0
    for n in (sol.n_modes + 1, sol.n_modes + 2):
        for t, side in ((t_plus[-1], "plus"), (t_minus[-1], "minus")):
            orthogonality = max(orthogonality, abs(_project_field(sol, "u", n, t, side)))

    passed = (zero_exact and zero_fields == 0.0 and roundtrip <= tolerances.roundtrip
              and orthogonality <= ORTHOGONALITY_TOL and ode_par <= tolerances.ode
              and (ode_hyp is None or ode_hyp <= tolerances.ode))
    return UniquenessReport(
        zero_coefficients_exact=zero_exact,
        zero_fields_max=zero_fields,
        probe_mode=1,
        roundtrip_error=roundtrip,
        orthogonality_error=orthogonality,
        ode_residual_hyp=ode_hyp,
        ode_residual_par=ode_par,
        passed=passed,
    )


# ======================================================================================
# Integral bounds
# ======================================================================================
def _passes(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + BOUND_SLACK) + 1e-15


def lemma2_pair(samples: ModeCoefficientSamples, lam: float, domain: RectDomain, k: int,
                t_minus: float, t_plus: float) -> List[BoundCheck]:
    """
    |int_t^0 f_n^(k) exp(lam^2 (t - s)) ds| <= ||f_n^(k)||_{L2(-T,0)} / (sqrt(2) lam) at t_minus, and
    |(1/lam) int_0^t f_n^(k) sin(lam (t - s)) ds| <= sqrt(T) ||f_n^(k)||_{L2(0,T)} / lam at t_plus.
    """
    norm_minus = samples.l2_norm(k, domain.t_min, 0.0)
    norm_plus = samples.l2_norm(k, 0.0, domain.t_max)
    lhs_par = abs(float(duhamel_par(samples, lam, t_minus, order=k)))
    lhs_hyp = abs(float(duhamel_hyp(samples, lam, t_plus, order=k)))
    rhs_par = norm_minus / (math.sqrt(2.0) * lam)
    rhs_hyp = math.sqrt(domain.t_max) * norm_plus / lam
    return [
        BoundCheck(name=f"parabolic_k{k}_n{samples.n}", lhs=lhs_par, rhs=rhs_par, passed=_passes(lhs_par, rhs_par)),
        BoundCheck(name=f"hyperbolic_k{k}_n{samples.n}", lhs=lhs_hyp, rhs=rhs_hyp, passed=_passes(lhs_hyp, rhs_hyp)),
    ]


def lemma2_bound_check(samples: ModeCoefficientSamples, lam: float, domain: RectDomain, trials: int,
                       seed: int = 0) -> List[BoundCheck]:
    """
    Integral bounds on the Duhamel terms at random times, for k = 0 and, when available, k = 1, 2.

    Each (kernel, k) reports its worst trial, the one with the largest lhs - rhs.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    checks: List[BoundCheck] = []
    for k in range(min(2, samples.max_order) + 1):
        worst = {}
        for _ in range(trials):
            t_minus = float(rng.uniform(domain.t_min, 0.0))
            t_plus = float(rng.uniform(0.0, domain.t_max))
            for check in lemma2_pair(samples, lam, domain, k, t_minus, t_plus):
                current = worst.get(check.name)
                if current is None or check.lhs - check.rhs > current.lhs - current.rhs:
                    worst[check.name] = check
        checks.extend(worst[name] for name in sorted(worst))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning("Integral bounds failed for %s", ", ".join(failed))
    return checks


# ======================================================================================
# Diagnostics
# ======================================================================================
def degeneracy_scan(p: float, T: float, n_max: int) -> DegeneracyScan:
    """cos(lambda_n T) + lambda_n sin(lambda_n T) for n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not p > 0 or T < 0:
        raise ValueError("Need p > 0 and T >= 0")
    lambdas = np.arange(1, n_max + 1) * math.pi / p
    values = np.cos(lambdas * T) + lambdas * np.sin(lambdas * T)
    argmin = int(np.argmin(np.abs(values)))
    return DegeneracyScan(p=p, T=T, lambdas=lambdas.tolist(), values=values.tolist(),
                          min_abs=float(abs(values[argmin])), argmin=argmin + 1)


def _slope(ns: Sequence[int], errors: Sequence[float]) -> Optional[float]:
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > 0
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(np.log(ns[keep]), np.log(errors[keep]), 1)[0])


def convergence_study(forcing: Forcing, domain: RectDomain, n_list: Sequence[int], reference_n: int,
                      nx: int = 101, nt: int = 101, tol: float = 1e-12,
                      threads: Optional[int] = None) -> ConvergenceTable:
    """
    L-infinity difference of each field between N modes and reference_n modes on a fixed
    grid, with the log-log slope of error against N.
    """
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list or reference_n <= max(n_list):
        raise ValueError("reference_n must exceed every entry of n_list")
    reference = solve(forcing, domain, TruncationPolicy.fixed(reference_n), tol, threads)
    ref_grid = sample_grid(reference, nx, nt, threads)
    fields = [name for name in FIELDS if ref_grid.values[name] is not None]
    rows = []
    for n in n_list:
        grid = sample_grid(reference.truncated(n), nx, nt, threads)
        errors = {name: float(np.max(np.abs(grid.values[name] - ref_grid.values[name]))) for name in fields}
        coefficient = reference.modes[n - 1].samples.sup_bound(0)
        rows.append(ConvergenceRow(n=n, errors=errors, coefficient=coefficient))
        logger.debug("N = %d: u error %.3e", n, errors["u"])
    slopes = {name: _slope(n_list, [row.errors[name] for row in rows]) for name in fields}
    return ConvergenceTable(reference_n=reference_n, rows=rows, slopes=slopes)


# ======================================================================================
# Full report
# ======================================================================================
def _fd_grid(domain: RectDomain, size: int) -> tuple:
    nx = size
    dx = domain.p / (nx - 1)
    nt = max(size, int(math.ceil(domain.t_max / dx)) + 1)
    return nx, nt


def verify_solution(sol: SpectralSolution, forcing: Forcing, tolerances: Optional[Tolerances] = None,
                    options: Optional[VerifyOptions] = None, grid: Optional[GridConfig] = None,
                    seed: int = 0, threads: Optional[int] = None) -> VerificationReport:
    """
    Run every check against ``sol`` and collect a VerificationReport.

    Stencil residuals, the finite-difference cross-check and the wall probe are
    informational; everything else decides the pass flag.
    """
    tolerances = tolerances or Tolerances()
    options = options or VerifyOptions()
    grid = grid or GridConfig()
    domain = sol.domain
    if options.inject_b_perturbation is not None:
        logger.warning("Injecting b_1 perturbation %g before verification", options.inject_b_perturbation)
        first = sol.modes[0].perturbed(options.inject_b_perturbation)
        sol = sol.with_modes((first,) + sol.modes[1:])

    warnings = list(sol.warnings) + smoothness_hint(forcing)
    failures: List[str] = []

    residuals = residual_pde(sol, forcing, grid.nx, grid.nt, threads)
    if residuals.spectral_plus.linf > tolerances.residual:
        failures.append("residual_plus")
    if residuals.spectral_minus.linf > tolerances.residual:
        failures.append("residual_minus")

    walls = boundary_max(sol, grid.nt, threads)
    if walls > tolerances.boundary:
        failures.append("boundary")

    conjugation = check_conjugation(sol, options.conjugation_samples, options.probe_offset, threads)
    for name, value in (("jump_u", conjugation.jump_u), ("jump_ut", conjugation.jump_ut),
                        ("jump_utt", conjugation.jump_utt)):
        if value is not None and value > tolerances.jump:
            failures.append(name)
    if not conjugation.utt_checked:
        warnings.append("u_tt jump not checked: f'' unavailable")

    leading = [mode for mode in sol.modes if not mode.samples.is_zero][:LEADING_MODES]
    bound_checks: List[BoundCheck] = []
    printed_forms: List[PrintedFormCheck] = []
    t_plus = np.linspace(0.0, domain.t_max, 11)[1:]
    t_minus = -t_plus[::-1]
    for index, mode in enumerate(leading):
        bound_checks.extend(lemma2_bound_check(mode.samples, mode.lam, domain, options.trials, seed + index))
        printed_forms.extend(printed_form_checks(mode, t_plus, t_minus))
    failures.extend(f"bound:{c.name}" for c in bound_checks if not c.passed)
    failures.extend(f"printed_form:{c.form}:n{c.n}" for c in printed_forms if not c.passed)

    decay_fit = None
    try:
        decay_fit = decay_estimate(forcing, domain, max(8, min(sol.n_modes, 64)), 0.0, tolerances.quadrature)
    except InsufficientDataError as exc:
        logger.info("No decay fit: %s", exc)

    probe_forcing = forcing if not forcing.zero else None
    uniqueness = uniqueness_probe(domain, TruncationPolicy.fixed(min(sol.n_modes, 16)), probe_forcing,
                                  tolerances, threads=threads)
    if not uniqueness.passed:
        failures.append("uniqueness")

    fd_check = None
    nx_fd, nt_fd = _fd_grid(domain, options.fd_grid)
    try:
        fd = fd_propagate(sol, forcing, nx_fd, nt_fd)
        fd_check = FdCrossCheck(nx=nx_fd, nt=nt_fd, deviation_plus=fd.max_deviation_plus,
                                deviation_minus=fd.max_deviation_minus)
    except CFLError as exc:
        warnings.append(f"finite-difference cross-check skipped: {exc}")

    report = VerificationReport(
        n_modes=sol.n_modes,
        residuals=residuals,
        boundary_max=walls,
        conjugation=conjugation,
        bound_checks=bound_checks,
        decay_fit=decay_fit,
        tail=sol.tail_report(),
        uniqueness=uniqueness,
        printed_forms=printed_forms,
        fd_cross_check=fd_check,
        wall_limit=wall_limit_probe(sol, threads=threads),
        warnings=warnings,
        tolerances=tolerances,
        failures=failures,
        passed=not failures,
    )
    logger.info("Verification %s with %d failed checks", "passed" if report.passed else "failed", len(failures))
    return report

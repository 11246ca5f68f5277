# mixedspec/operations/selftest.py
"""Bundled acceptance suite run by ``mixedspec selftest``."""
import logging
import math
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from mixedspec.models.domain import RectDomain
from mixedspec.models.forcing import Forcing, ForcingTerm, PolyBubble, PolynomialInT, SineMode, Trig
from mixedspec.operations.basis import ModeCoefficientSamples, decay_estimate, eigenpair
from mixedspec.operations.export import render_fields_csv, render_json
from mixedspec.operations.modes import ModeSolution, build_mode, mode_coefficients, printed_form_checks
from mixedspec.operations.oracle import conjugation_solve, fd_propagate, integrate_mode_hyp, integrate_mode_par
from mixedspec.operations.series import sample_grid, solve
from mixedspec.operations.verify import (
    boundary_max,
    check_conjugation,
    convergence_study,
    degeneracy_scan,
    lemma2_bound_check,
    residual_pde,
    uniqueness_probe,
)
from mixedspec.schemas.config import Tolerances, TruncationPolicy
from mixedspec.schemas.report import SelftestRow

logger = logging.getLogger(__name__)

UNIT = RectDomain(p=1.0, T=1.0)


def single_mode_forcing(domain: RectDomain = UNIT) -> Forcing:
    """X_1(x) * 1."""
    return Forcing(domain=domain, terms=(ForcingTerm(SineMode(1, domain.p), PolynomialInT((1.0,))),))


def bubble_forcing(domain: RectDomain = UNIT) -> Forcing:
    """x (p - x) * 1."""
    return Forcing(domain=domain, terms=(ForcingTerm(PolyBubble(1.0, domain.p), PolynomialInT((1.0,))),),
                   smoothness_alpha=0.5)


def trig_samples(lam_index: int, temporal: Trig, domain: RectDomain = UNIT, tol: float = 1e-12) -> ModeCoefficientSamples:
    """Mode samples with f_n(t) = temporal(t)."""
    pair = eigenpair(lam_index, domain)
    return ModeCoefficientSamples.build(pair, (1.0,), (temporal,), domain, tol)


def random_trig(rng: np.random.Generator) -> Trig:
    return Trig(amplitude=float(rng.uniform(-1.0, 1.0)), omega=float(rng.uniform(0.5, 5.0)),
                phase=float(rng.uniform(0.0, 2.0 * math.pi)))


def exact_mode_reproduction() -> Tuple[bool, str]:
    forcing = single_mode_forcing()
    sol = solve(forcing, UNIT, TruncationPolicy.fixed(1))
    residuals = residual_pde(sol, forcing, 101, 101)
    jumps = check_conjugation(sol, 33, 1e-4)
    walls = boundary_max(sol, 101)
    worst_residual = max(residuals.spectral_plus.linf, residuals.spectral_minus.linf)
    worst_jump = max(jumps.jump_u, jumps.jump_ut, jumps.jump_utt or 0.0)
    ok = worst_residual <= 1e-10 and worst_jump <= 1e-10 and walls <= 1e-15
    return ok, f"residual {worst_residual:.2e}, jump {worst_jump:.2e}, boundary {walls:.2e}"


def coefficient_equivalence(seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        f0, fp0 = rng.uniform(-10.0, 10.0, size=2)
        lam = math.pi * int(rng.integers(1, 21))
        closed = mode_coefficients(float(f0), float(fp0), lam)
        a, b, c = conjugation_solve(float(f0), float(fp0), lam)
        worst = max(worst, abs(closed.a - a), abs(closed.b - b), abs(closed.c - c))
    return worst <= 1e-12, f"max difference {worst:.2e}"


def ode_oracle_agreement(seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_hyp = worst_par = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 11))
        samples = trig_samples(n, random_trig(rng))
        lam = samples.lambda_n
        coeffs = mode_coefficients(samples.f_n0, samples.fp_n0, lam)
        mode = ModeSolution(pair=eigenpair(n, UNIT), coeffs=coeffs, samples=samples, tol=samples.tol)
        steps = int(math.ceil(UNIT.t_max / min(0.01, 0.05 / lam)))
        t_plus = np.linspace(0.0, UNIT.t_max, steps + 1)
        worst_hyp = max(worst_hyp, float(np.max(np.abs(
            integrate_mode_hyp(samples, lam, coeffs.a, coeffs.b, t_plus) - mode.alpha(t_plus)))))
        t_minus = np.linspace(0.0, UNIT.t_min, 101)
        worst_par = max(worst_par, float(np.max(np.abs(
            integrate_mode_par(samples, lam, coeffs.c, t_minus) - mode.beta(t_minus)))))
    ok = worst_hyp <= 1e-6 and worst_par <= 1e-8
    return ok, f"RK4 {worst_hyp:.2e}, exponential stepper {worst_par:.2e}"


def derivative_forms() -> Tuple[bool, str]:
    forcing = Forcing(domain=UNIT, terms=(ForcingTerm(SineMode(1, 1.0), Trig(1.0, 2.0, 0.5)),))
    mode = build_mode(forcing, eigenpair(1, UNIT), 1e-12)
    t_plus = np.linspace(0.0, 1.0, 21)[1:]
    checks = printed_form_checks(mode, t_plus, -t_plus[::-1])
    corrected = max(c.corrected_discrepancy for c in checks)
    printed = {c.form: c.printed_discrepancy for c in checks}
    ok = corrected <= 1e-7 and printed["uxx_plus"] > 1e-3 and printed["beta_dtt"] > 1e-3
    return ok, (f"corrected {corrected:.2e}; printed uxx_plus {printed['uxx_plus']:.2e}, "
                f"beta_dtt {printed['beta_dtt']:.2e}")


def uniqueness() -> Tuple[bool, str]:
    report = uniqueness_probe(UNIT, TruncationPolicy.fixed(1))
    hyp = "n/a" if report.ode_residual_hyp is None else f"{report.ode_residual_hyp:.2e}"
    return report.passed, (f"round trip {report.roundtrip_error:.2e}, ODE {hyp}/"
                           f"{report.ode_residual_par:.2e}")


def integral_bounds(seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    checks = []
    for trial in range(3):
        samples = trig_samples(int(rng.integers(1, 11)), random_trig(rng))
        checks.extend(lemma2_bound_check(samples, samples.lambda_n, UNIT, 100, seed + trial))
    failed = sum(not c.passed for c in checks)
    return failed == 0, f"{len(checks)} worst-case checks, {failed} failed"


def coefficient_decay() -> Tuple[bool, str]:
    forcing = bubble_forcing()
    fit = decay_estimate(forcing, UNIT, 32, 0.0)
    table = convergence_study(forcing, UNIT, [4, 8, 16, 32], 128, nx=41, nt=41)
    slope = table.slopes["u"]
    ok = -3.2 <= fit.rate <= -2.8 and slope is not None and slope <= -3.0
    return ok, f"coefficient rate {fit.rate:.3f}, u error slope {slope:.3f}"


def degeneracy() -> Tuple[bool, str]:
    scan = degeneracy_scan(math.pi, math.pi, 10)
    worst = max(abs(abs(v) - 1.0) for v in scan.values)
    return worst <= 1e-12, f"max ||value| - 1| = {worst:.2e}"


def fd_cross_check() -> Tuple[bool, str]:
    forcing = single_mode_forcing()
    sol = solve(forcing, UNIT, TruncationPolicy.fixed(1))
    deviations = [fd_propagate(sol, forcing, size, size).max_deviation for size in (101, 201, 401)]
    ok = deviations[0] > deviations[1] > deviations[2] and deviations[2] <= 1e-3
    return ok, "deviations " + ", ".join(f"{d:.2e}" for d in deviations)


def determinism() -> Tuple[bool, str]:
    forcing = bubble_forcing()
    outputs = []
    for threads in (1, 2):
        sol = solve(forcing, UNIT, TruncationPolicy.fixed(16), threads=threads)
        grid = sample_grid(sol, 21, 21, threads)
        outputs.append(render_fields_csv(grid) + render_json(sol.tail_report()))
    return outputs[0] == outputs[1], "byte-identical" if outputs[0] == outputs[1] else "outputs differ"


def criteria(seed: int = 0) -> List[Tuple[str, float, Callable[[], Tuple[bool, str]]]]:
    return [
        ("exact_mode_reproduction", 1.0, exact_mode_reproduction),
        ("coefficient_equivalence", 1.0, lambda: coefficient_equivalence(seed)),
        ("ode_oracle_agreement", 5.0, lambda: ode_oracle_agreement(seed)),
        ("derivative_forms", 2.0, derivative_forms),
        ("uniqueness", 5.0, uniqueness),
        ("integral_bounds", 10.0, lambda: integral_bounds(seed)),
        ("coefficient_decay", 10.0, coefficient_decay),
        ("degeneracy_scan", 1.0, degeneracy),
        ("fd_cross_check", 30.0, fd_cross_check),
        ("determinism", 5.0, determinism),
    ]


def run_selftest(seed: int = 0, only: Optional[List[str]] = None) -> List[SelftestRow]:
    """Run the acceptance criteria; a criterion that raises counts as failed."""
    rows = []
    for name, limit, check in criteria(seed):
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as exc:
            logger.error("Selftest %s raised: %s", name, exc)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        if seconds > limit:
            logger.warning("Selftest %s took %.2f s, expected under %.0f s", name, seconds, limit)
        rows.append(SelftestRow(name=name, passed=passed, detail=detail, seconds=seconds, time_limit=limit))
    return rows

# mixedspec/main.py
"""
Batch command line front end.

    mixedspec solve|verify|converge|scan --config run.json --out out/ [--seed K] [--threads M]
    mixedspec selftest [--config run.json] [--out out/] [--seed K] [--only NAME ...]

Exit codes: 0 pass, 1 verification failure, 2 config error, 3 forcing rejected,
4 numerical failure.
"""
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

import click
from pydantic import ValidationError

from mixedspec.core.config import get_settings
from mixedspec.core.errors import ConfigError, MixedSpecError, exit_code_for
from mixedspec.models.forcing import Forcing
from mixedspec.operations.export import (
    render_convergence_csv,
    render_degeneracy_csv,
    render_fields_csv,
    render_json,
)
from mixedspec.operations.selftest import run_selftest
from mixedspec.operations.series import sample_grid, solve
from mixedspec.operations.verify import convergence_study, degeneracy_scan, verify_solution
from mixedspec.schemas.config import RunConfig
from mixedspec.schemas.report import SelftestReport, SolutionMeta

logger = logging.getLogger("mixedspec")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


def load_config(path: str, out: Optional[str] = None, seed: Optional[int] = None) -> RunConfig:
    """Parse and validate a run config; command line overrides win over the file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    try:
        config = RunConfig.model_validate_json(text)
    except ValidationError as exc:
        lines = []
        for error in exc.errors():
            location = ".".join(str(part) for part in error["loc"]) or "<document>"
            lines.append(f"{location}: {error['msg']}")
        raise ConfigError(f"Invalid config {path}:\n  " + "\n  ".join(lines)) from exc
    updates = {}
    if out is not None:
        updates["output_dir"] = out
    if seed is not None:
        updates["seed"] = seed
    return config.model_copy(update=updates) if updates else config


def write_output(config: RunConfig, name: str, text: str) -> Path:
    return write_file(Path(config.output_dir), name, text)


def write_file(directory: Path, name: str, text: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / name
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info("Wrote %s", target)
    return target


def run_command(body: Callable[[], int]) -> None:
    """Run a command body and turn its outcome into the process exit code."""
    try:
        code = body()
    except MixedSpecError as exc:
        logger.error("%s", exc)
        code = exit_code_for(exc)
    except (ArithmeticError, ValueError) as exc:
        logger.error("Numerical failure: %s", exc)
        code = exit_code_for(exc)
    sys.exit(code)


def _threads(threads: Optional[int]) -> int:
    return threads if threads is not None else get_settings().THREADS


def _build(config: RunConfig, threads: int):
    forcing = Forcing.from_schema(config.forcing, config.domain)
    sol = solve(forcing, config.domain, config.truncation, config.tolerances.quadrature, threads)
    return forcing, sol


# ------------------------------------------------------------------------------
# Shared options
# ------------------------------------------------------------------------------
def run_options(func):
    func = click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")(func)
    func = click.option("--threads", type=click.IntRange(min=1), default=None,
                        help="Worker threads (default: MIXEDSPEC_THREADS or 1).")(func)
    func = click.option("--seed", type=click.IntRange(min=0), default=None,
                        help="Seed for randomized checks (overrides the config).")(func)
    func = click.option("--out", "out", type=click.Path(file_okay=False), default=None,
                        help="Output directory (overrides the config).")(func)
    func = click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True,
                        help="Run config JSON document.")(func)
    return func


@click.group()
def cli() -> None:
    """Spectral solver and verification harness for the mixed parabolic-hyperbolic problem."""


# ------------------------------------------------------------------------------
# solve
# ------------------------------------------------------------------------------
@cli.command("solve")
@run_options
def solve_command(config_path, out, seed, threads, verbose):
    """Tabulate u, u_t, u_tt, u_xx into fields.csv and write solution_meta.json."""
    configure_logging(verbose)

    def body() -> int:
        config = load_config(config_path, out, seed)
        workers = _threads(threads)
        _, sol = _build(config, workers)
        grid = sample_grid(sol, config.grid.nx, config.grid.nt, workers)
        meta = SolutionMeta(
            n_modes=sol.n_modes,
            tail=sol.tail_report(),
            decay_fit=sol.envelope_fit.to_schema() if sol.envelope_fit else None,
            utt_available=sol.utt_available,
            warnings=list(sol.warnings),
            tolerances=config.tolerances,
            config_hash=config.config_hash(),
        )
        write_output(config, "fields.csv", render_fields_csv(grid))
        write_output(config, "solution_meta.json", render_json(meta))
        return EXIT_OK

    run_command(body)


# ------------------------------------------------------------------------------
# verify
# ------------------------------------------------------------------------------
@cli.command("verify")
@run_options
@click.option("--inject-b-perturbation", "delta", type=float, default=None,
              help="Perturb b_1 by DELTA before verifying; the seam checks must fail.")
def verify_command(config_path, out, seed, threads, verbose, delta):
    """Run the verification suite; exit 1 when any check fails."""
    configure_logging(verbose)

    def body() -> int:
        config = load_config(config_path, out, seed)
        options = config.verify
        if delta is not None:
            options = options.model_copy(update={"inject_b_perturbation": delta})
        workers = _threads(threads)
        forcing, sol = _build(config, workers)
        report = verify_solution(sol, forcing, config.tolerances, options, config.grid, config.seed, workers)
        write_output(config, "verification_report.json", render_json(report))
        if report.passed:
            logger.info("Verification passed")
            return EXIT_OK
        logger.error("Verification failed: %s", ", ".join(report.failures))
        return EXIT_VERIFY_FAILED

    run_command(body)


# ------------------------------------------------------------------------------
# converge
# ------------------------------------------------------------------------------
@cli.command("converge")
@run_options
def converge_command(config_path, out, seed, threads, verbose):
    """Error against a reference truncation for each N of the config, with log-log slopes."""
    configure_logging(verbose)

    def body() -> int:
        config = load_config(config_path, out, seed)
        forcing = Forcing.from_schema(config.forcing, config.domain)
        table = convergence_study(forcing, config.domain, config.converge.n_list, config.converge.reference_n,
                                  config.grid.nx, config.grid.nt, config.tolerances.quadrature,
                                  _threads(threads))
        write_output(config, "convergence.csv", render_convergence_csv(table))
        return EXIT_OK

    run_command(body)


# ------------------------------------------------------------------------------
# scan
# ------------------------------------------------------------------------------
@cli.command("scan")
@run_options
def scan_command(config_path, out, seed, threads, verbose):
    """Tabulate cos(lambda_n T) + lambda_n sin(lambda_n T) and report its smallest magnitude."""
    configure_logging(verbose)

    def body() -> int:
        config = load_config(config_path, out, seed)
        scan = degeneracy_scan(config.domain.p, config.domain.t_max, config.scan.n_max)
        write_output(config, "degeneracy.csv", render_degeneracy_csv(scan))
        click.echo(f"min |value| = {scan.min_abs:.17g} at n = {scan.argmin}")
        return EXIT_OK

    run_command(body)


# ------------------------------------------------------------------------------
# selftest
# ------------------------------------------------------------------------------
@cli.command("selftest")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Optional run config; supplies the seed and output directory.")
@click.option("--out", "out", type=click.Path(file_okay=False), default=None,
              help="Write selftest_report.json here (overrides the config).")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Seed for randomized criteria (default: the config's seed, else 0).")
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help="Accepted for a uniform interface; the criteria fix their own thread counts.")
@click.option("--only", multiple=True, help="Run only the named criteria (repeatable).")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def selftest_command(config_path, out, seed, threads, only, verbose):
    """Run the bundled acceptance suite and print a pass/fail table."""
    configure_logging(verbose)

    def body() -> int:
        config = load_config(config_path, out, seed) if config_path else None
        run_seed = seed if seed is not None else (config.seed if config else 0)
        rows = run_selftest(run_seed, list(only) or None)
        width = max([len("criterion")] + [len(row.name) for row in rows])
        click.echo(f"{'criterion':<{width}}  result  seconds  detail")
        for row in rows:
            verdict = "PASS" if row.passed else "FAIL"
            click.echo(f"{row.name:<{width}}  {verdict:<6}  {row.seconds:7.2f}  {row.detail}")
        passed = bool(rows) and all(row.passed for row in rows)
        directory = out if out is not None else (config.output_dir if config else None)
        if directory is not None:
            report = SelftestReport(seed=run_seed, passed=passed, rows=rows)
            write_file(Path(directory), "selftest_report.json", render_json(report))
        return EXIT_OK if passed else EXIT_VERIFY_FAILED

    run_command(body)


def main() -> None:  # pragma: no cover
    cli()


if __name__ == "__main__":  # pragma: no cover
    main()

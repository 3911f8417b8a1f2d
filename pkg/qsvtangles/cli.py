#!/usr/bin/env python3
# tab-width:4

# pylint: disable=too-many-arguments              # [R0913] oo many arguments (13/10) [R0913]
# pylint: disable=too-many-positional-arguments   # [R0917] oo many positional arguments [R0917]
# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

from __future__ import annotations

import json
import logging
import math
import sys
import time
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import click
import psutil

from .angle_estimator import DEFAULT_NA_CAP
from .angle_estimator import EstimateRequest
from .angle_estimator import estimate_angles
from .angle_io import format_csv
from .angle_io import load_angles
from .angle_io import load_bank
from .angle_io import load_meta
from .angle_io import load_system
from .angle_io import read_bare_angles
from .angle_io import save_angles
from .angle_io import save_meta
from .angle_io import save_system
from .angle_io import write_inversion_csv
from .angle_io import write_sweep_csv
from .bench import linear_r_squared
from .bench import time_estimates
from .meta_fit import DEFAULT_N_AMPL
from .meta_fit import DEFAULT_N_SH
from .meta_fit import build_meta
from .phase_solver import DEFAULT_EPS_TARGET
from .phase_solver import DEFAULT_GRAD_TOLERANCE
from .phase_solver import DEFAULT_HISTORY_SIZE
from .phase_solver import DEFAULT_MAX_ITERATIONS
from .phase_solver import SolveConfig
from .phase_solver import solve_angles
from .qsp_eval import AngleSet
from .qsp_eval import Convention
from .qsp_eval import Origin
from .target_fn import DEFAULT_ETA
from .validation import ValidationError
from .verifier import DEFAULT_SWEEP_POINTS
from .verifier import build_test_matrix_F
from .verifier import build_test_matrix_sin
from .verifier import inversion_report
from .verifier import sweep_error

CONVENTIONS = [c.value for c in Convention]

# =============================================================================
# Click CLI setup
# =============================================================================


class NotConvergedError(click.ClickException):
    exit_code = 2


class QsvtGroup(click.Group):
    """Usage errors exit with status 1; status 2 is reserved for non-convergence."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise


@click.group(
    cls=QsvtGroup,
    context_settings={"show_default": True, "max_content_width": 272},
    no_args_is_help=True,
)
@click.option(
    "--verbose",
    "-v",
    count=True,
    help="Log progress to stderr (-v info, -vv debug).",
)
def cli(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def click_add_options(options):
    def _add_options(func):
        for option in reversed(options):
            func = option(func)
        return func

    return _add_options


@contextmanager
def cli_errors() -> Iterator[None]:
    try:
        yield
    except ValidationError as e:
        # Use CLI-friendly message if available
        raise click.ClickException(e.cli_msg or str(e)) from e
    except FileNotFoundError as e:
        raise click.ClickException(f"No such file: {e.filename}") from e


def default_jobs() -> int:
    return psutil.cpu_count(logical=False) or 1


def parse_kappa_list(_ctx, _param, value: tuple[str, ...]) -> tuple[float, ...]:
    kappas = []
    for item in value:
        for token in item.replace(",", " ").split():
            try:
                kappas.append(float(token))
            except ValueError as e:
                raise click.BadParameter(f"{token!r} is not a number") from e
    return tuple(kappas)


CLICK_SOLVER_OPTIONS = [
    click.option(
        "--eps",
        "eps_target",
        type=float,
        default=DEFAULT_EPS_TARGET,
        help="Target approximation error; sets N_a when --na is not given.",
    ),
    click.option(
        "--eta",
        type=float,
        default=DEFAULT_ETA,
        help="Normalization of the target eta F(s) / kappa.",
    ),
    click.option(
        "--max-iterations",
        type=int,
        default=DEFAULT_MAX_ITERATIONS,
        help="Optimizer iteration limit.",
    ),
    click.option(
        "--grad-tol",
        type=float,
        default=DEFAULT_GRAD_TOLERANCE,
        help="Stop when the gradient infinity-norm falls below this.",
    ),
    click.option(
        "--history",
        type=int,
        default=DEFAULT_HISTORY_SIZE,
        help="L-BFGS memory.",
    ),
]


@cli.command("solve")
@click.option(
    "--kappa",
    required=True,
    type=float,
    help="kappa_qsvt of the target.",
)
@click.option(
    "--na",
    type=int,
    default=None,
    help="Number of angles (even). Chosen from --eps when omitted.",
)
@click.option(
    "--nq",
    type=int,
    default=None,
    help="Quadrature size for the Chebyshev coefficients. Defaults to 2 N_a.",
)
@click.option(
    "--warm-start",
    "warm_start",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Angle file to start the optimizer from; fixes N_a to its length.",
)
@click_add_options(CLICK_SOLVER_OPTIONS)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Angle file to write.",
)
def solve_command(
    kappa: float,
    na: int | None,
    nq: int | None,
    warm_start: Path | None,
    eps_target: float,
    eta: float,
    max_iterations: int,
    grad_tol: float,
    history: int,
    out: Path,
):
    """Compute high-precision angles by least-squares minimization."""
    start = time.perf_counter()
    with cli_errors():
        config = SolveConfig(
            kappa_qsvt=kappa,
            eta=eta,
            eps_target=eps_target,
            na_override=na,
            quadrature_nq=nq,
            max_iterations=max_iterations,
            grad_tolerance=grad_tol,
            history_size=history,
            initial_angles=load_angles(warm_start) if warm_start is not None else None,
        )
        result = solve_angles(config)
        save_angles(result.angles, out)
    seconds = time.perf_counter() - start
    click.echo(
        json.dumps(
            {
                "n_a": result.angles.n_a,
                "final_loss": result.final_loss,
                "iterations": result.iterations,
                "max_residual": result.max_residual,
                "converged": result.converged,
                "seconds": seconds,
            }
        )
    )
    if not result.converged:
        raise NotConvergedError(
            f"solver did not converge (gradient {result.grad_norm:.3e}); best angles written to {out}"
        )


def _solve_to_file(
    kappa: float,
    eps_target: float,
    eta: float,
    out_dir: Path,
) -> tuple[float, Path, bool, float]:
    result = solve_angles(SolveConfig(kappa_qsvt=kappa, eta=eta, eps_target=eps_target))
    path = out_dir / f"angles_kappa_{kappa:g}.json"
    save_angles(result.angles, path)
    return kappa, path, result.converged, result.max_residual


@cli.command("bank")
@click.option(
    "--kappas",
    required=True,
    multiple=True,
    callback=parse_kappa_list,
    help="Reference kappa values, comma or space separated; may be repeated.",
)
@click.option(
    "--eps",
    "eps_target",
    type=float,
    default=DEFAULT_EPS_TARGET,
    help="Target approximation error of every reference set.",
)
@click.option(
    "--eta",
    type=float,
    default=DEFAULT_ETA,
    help="Normalization of the target eta F(s) / kappa.",
)
@click.option(
    "--out-dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory receiving one angle file per kappa.",
)
@click.option(
    "--jobs",
    type=int,
    envvar="QPF_JOBS",
    default=default_jobs,
    show_default="physical cores",
    help="Parallel solves.",
)
def bank_command(
    kappas: tuple[float, ...],
    eps_target: float,
    eta: float,
    out_dir: Path,
    jobs: int,
):
    """Solve a bank of reference angle sets in parallel."""
    if jobs < 1:
        raise click.BadParameter("must be >= 1", param_hint="--jobs")
    with cli_errors():
        # validate every kappa before starting any worker
        for kappa in kappas:
            SolveConfig(kappa_qsvt=kappa, eta=eta, eps_target=eps_target)
        out_dir.mkdir(parents=True, exist_ok=True)
        failed = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_solve_to_file, k, eps_target, eta, out_dir) for k in kappas]
            for future in futures:
                kappa, path, converged, max_residual = future.result()
                click.echo(f"kappa {kappa:g}: {path} max residual {max_residual:.3e}")
                if not converged:
                    failed.append(kappa)
    if failed:
        raise NotConvergedError(f"solver did not converge for kappa {', '.join(f'{k:g}' for k in failed)}")


@cli.command("fit")
@click.option(
    "--refs",
    required=True,
    multiple=True,
    type=click.Path(exists=True, path_type=Path),
    help="Reference angle files or directories of them; may be repeated.",
)
@click.option(
    "--env-kappa",
    type=float,
    default=None,
    help="kappa of the reference set used for the envelopes. Defaults to the largest.",
)
@click.option(
    "--n-ampl",
    type=int,
    default=DEFAULT_N_AMPL,
    help="Number of amplitude coefficients.",
)
@click.option(
    "--n-sh",
    type=int,
    default=DEFAULT_N_SH,
    help="Number of envelope coefficients per envelope.",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Meta file to write.",
)
def fit_command(
    refs: tuple[Path, ...],
    env_kappa: float | None,
    n_ampl: int,
    n_sh: int,
    out: Path,
):
    """Fit metaparameters to a bank of reference angle sets."""
    with cli_errors():
        bank = load_bank(refs)
        meta = build_meta(bank, env_kappa, n_ampl=n_ampl, n_sh=n_sh)
        save_meta(meta, out)
    res = meta.fit_residuals
    click.echo(
        f"fit residuals: amplitude {res.ampl:.3e}, positive envelope {res.env_pos:.3e}, negative envelope {res.env_neg:.3e}"
    )


@cli.command("estimate")
@click.option(
    "--meta",
    "meta_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Meta file from `fit`.",
)
@click.option(
    "--kappa0",
    required=True,
    type=float,
    help="Target condition number.",
)
@click.option(
    "--na-cap",
    type=int,
    default=DEFAULT_NA_CAP,
    help="Refuse to build more angles than this.",
)
@click.option(
    "--pin-endpoint/--no-pin-endpoint",
    default=True,
    help="Shift the angles so that P(1) hits the target exactly.",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Angle file to write.",
)
def estimate_command(
    meta_path: Path,
    kappa0: float,
    na_cap: int,
    pin_endpoint: bool,
    out: Path,
):
    """Estimate angles for kappa0 from metaparameters."""
    with cli_errors():
        meta = load_meta(meta_path)
        start = time.perf_counter()
        request = EstimateRequest(
            kappa0=kappa0,
            meta=meta,
            na_cap=na_cap,
            pin_endpoint=pin_endpoint,
        )
        angles = estimate_angles(request)
        seconds = time.perf_counter() - start
        save_angles(angles, out)
    click.echo(f"n_a {angles.n_a}")
    click.echo(f"seconds {seconds:.6f}", err=True)


@cli.command("sweep")
@click.option(
    "--angles",
    "angles_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Angle file.",
)
@click.option(
    "--points",
    type=int,
    default=DEFAULT_SWEEP_POINTS,
    help="Grid points over [1/kappa, 1].",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV file to write.",
)
def sweep_command(
    angles_path: Path,
    points: int,
    out: Path,
):
    """Tabulate P - eta F / kappa over the validity interval."""
    with cli_errors():
        sweep = sweep_error(load_angles(angles_path), points)
        write_sweep_csv(sweep, out)
    click.echo(f"max error {sweep.max_err:.6e} at s={sweep.argmax_s!r}")


@cli.command("invert")
@click.option(
    "--system",
    "system_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="System file from `system` or an SVD triple.",
)
@click.option(
    "--angles",
    "angles_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Angle file.",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV file to write.",
)
def invert_command(
    system_path: Path,
    angles_path: Path,
    out: Path,
):
    """Emulate QSVT inversion of a system and compare with the exact inverse."""
    with cli_errors():
        system = load_system(system_path)
        report = inversion_report(system, load_angles(angles_path))
        write_inversion_csv(report, out)
    click.echo(f"rho_A {system.rho_A:.6g} norm {system.norm:.6g} max error {report.max_abs_err:.6e}")


@cli.command("bench")
@click.option(
    "--meta",
    "meta_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Meta file from `fit`.",
)
@click.option(
    "--kappas",
    required=True,
    multiple=True,
    callback=parse_kappa_list,
    help="kappa0 values, comma or space separated; may be repeated.",
)
@click.option(
    "--repeats",
    type=int,
    default=1,
    help="Report the best of this many runs per kappa0.",
)
def bench_command(
    meta_path: Path,
    kappas: tuple[float, ...],
    repeats: int,
):
    """Time angle estimation across kappa0 values (CSV on stdout)."""
    with cli_errors():
        rows = time_estimates(load_meta(meta_path), kappas, repeats=repeats)
    click.echo(format_csv(("kappa0", "n_a", "seconds"), ((f"{r.kappa0:g}", r.n_a, f"{r.seconds:.6f}") for r in rows)), nl=False)
    if len(rows) >= 3:
        r2 = linear_r_squared([r.kappa0 for r in rows], [r.seconds for r in rows])
        click.echo(f"linear fit R^2 {r2:.4f}", err=True)


@cli.command("system")
@click.option(
    "--kind",
    required=True,
    type=click.Choice(["inverse_approx", "sine"]),
    help="inverse_approx: (eta_A / kappa) diag F(x_k); sine: diag sin(xi_k).",
)
@click.option(
    "--nx",
    required=True,
    type=int,
    help="log2 of the matrix size.",
)
@click.option(
    "--kappa",
    type=float,
    default=None,
    help="kappa of the inverse_approx matrix.",
)
@click.option(
    "--eta-a",
    type=float,
    default=1.0,
    help="Spectral norm of the inverse_approx matrix.",
)
@click.option(
    "--xi-max",
    type=float,
    default=math.pi / 2,
    help="Largest |xi| of the sine matrix.",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="System file to write.",
)
def system_command(
    kind: str,
    nx: int,
    kappa: float | None,
    eta_a: float,
    xi_max: float,
    out: Path,
):
    """Write one of the diagonal test systems."""
    with cli_errors():
        if kind == "inverse_approx":
            if kappa is None:
                raise click.UsageError("--kappa is required for --kind inverse_approx")
            system = build_test_matrix_F(kappa, eta_a, nx)
        else:
            system = build_test_matrix_sin(nx, xi_max)
        save_system(system, out)
    click.echo(f"rho_A {system.rho_A:.6g} norm {system.norm:.6g} min kappa {system.rho_A / system.norm:.6g}")


@cli.command("import")
@click.option(
    "--from",
    "source",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON list or whitespace/comma separated angles.",
)
@click.option(
    "--convention",
    type=click.Choice(CONVENTIONS),
    default=Convention.PHI.value,
    help="Convention of the imported angles.",
)
@click.option(
    "--kappa",
    required=True,
    type=float,
    help="kappa_qsvt the angles were computed for.",
)
@click.option(
    "--eta",
    type=float,
    default=DEFAULT_ETA,
    help="Normalization the angles were computed for.",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Angle file to write.",
)
def import_command(
    source: Path,
    convention: str,
    kappa: float,
    eta: float,
    out: Path,
):
    """Wrap a bare list of angles into an angle file."""
    with cli_errors():
        angles = AngleSet(
            convention=Convention(convention),
            values=read_bare_angles(source),
            kappa_qsvt=kappa,
            eta=eta,
            origin=Origin.LOADED,
        )
        save_angles(angles, out)
    click.echo(f"n_a {angles.n_a}")


@cli.command("convert")
@click.option(
    "--angles",
    "angles_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Angle file.",
)
@click.option(
    "--to",
    "convention",
    required=True,
    type=click.Choice(CONVENTIONS),
    help="Convention to print.",
)
def convert_command(
    angles_path: Path,
    convention: str,
):
    """Print the angles of a file in another convention as CSV."""
    with cli_errors():
        angles = load_angles(angles_path, convention)
    click.echo(format_csv(("index", convention), enumerate(angles.values.tolist())), nl=False)


if __name__ == "__main__":
    cli.main(args=sys.argv[1:], standalone_mode=True)

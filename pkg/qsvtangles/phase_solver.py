#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

"""
High-precision phase angles by least-squares fitting of P[alpha] to the
truncated Chebyshev series of the normalized target at the positive
roots of T_{N_a}.

Only N_a/2 parameters are optimized; the full sequence is their mirror
image, so inversion symmetry holds exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from .cheb import DEFAULT_DEGREE_CAP
from .cheb import Parity
from .cheb import choose_degree
from .cheb import compute_coeffs
from .cheb import eval_series
from .qsp_eval import AngleSet
from .qsp_eval import Convention
from .qsp_eval import Origin
from .qsp_eval import eval_poly_weighted_grad
from .target_fn import DEFAULT_ETA
from .target_fn import TargetSpec
from .target_fn import eval_normalized_target
from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import ValidationError
from .validation import validate_args
from .verifier import DEFAULT_SWEEP_POINTS
from .verifier import sweep_error

__all__ = [
    "DEFAULT_EPS_TARGET",
    "SolveConfig",
    "SolveResult",
    "cheb_sample_nodes",
    "solve_angles",
    "residual_report",
]

logger = logging.getLogger(__name__)

DEFAULT_EPS_TARGET = 1.0e-7
DEFAULT_MAX_ITERATIONS = 50_000
DEFAULT_GRAD_TOLERANCE = 1.0e-10
DEFAULT_HISTORY_SIZE = 10


@dataclass(frozen=True)
class SolveConfig:
    """
    Solver settings. quadrature_nq=None means 2 N_a; na_override=None means
    choose_degree(kappa_qsvt, eps_target), or the length of initial_angles
    when a warm start is given.
    """

    kappa_qsvt: float
    eta: float = DEFAULT_ETA
    eps_target: float = DEFAULT_EPS_TARGET
    na_override: int | None = None
    quadrature_nq: int | None = None
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    grad_tolerance: float = DEFAULT_GRAD_TOLERANCE
    history_size: int = DEFAULT_HISTORY_SIZE
    degree_cap: int = DEFAULT_DEGREE_CAP
    initial_angles: AngleSet | None = None

    def __post_init__(self) -> None:
        validate_args(
            function_name="SolveConfig",
            args={
                "kappa_qsvt": self.kappa_qsvt,
                "eta": self.eta,
                "eps_target": self.eps_target,
                "na_override": self.na_override,
                "quadrature_nq": self.quadrature_nq,
                "max_iterations": self.max_iterations,
                "grad_tolerance": self.grad_tolerance,
                "history_size": self.history_size,
                "degree_cap": self.degree_cap,
                "initial_angles": self.initial_angles,
            },
            constraints={
                "kappa_qsvt": {"type": REAL_TYPES, "finite": True, "min": 1},
                "eta": {"type": REAL_TYPES, "min_exclusive": 0, "max_exclusive": 1},
                "eps_target": {"type": REAL_TYPES, "min_exclusive": 0, "max_exclusive": 1},
                "na_override": {"type": INT_TYPES, "optional": True, "min": 2, "even": True},
                "quadrature_nq": {"type": INT_TYPES, "optional": True, "min": 1},
                "max_iterations": {"type": INT_TYPES, "min": 1},
                "grad_tolerance": {"type": REAL_TYPES, "min_exclusive": 0},
                "history_size": {"type": INT_TYPES, "min": 1},
                "degree_cap": {"type": INT_TYPES, "min": 2},
                "initial_angles": {"type": AngleSet, "optional": True},
            },
            cli_names={
                "kappa_qsvt": "--kappa",
                "eta": "--eta",
                "eps_target": "--eps",
                "na_override": "--na",
                "quadrature_nq": "--nq",
                "max_iterations": "--max-iterations",
                "grad_tolerance": "--grad-tol",
                "history_size": "--history",
            },
        )
        if self.eps_target >= self.eta:
            raise ValidationError(
                f"SolveConfig() eps_target={self.eps_target!r} must be below eta={self.eta!r}",
                cli_msg=f"--eps must be below --eta ({self.eta!r})",
            )
        # raises for an eta the target cannot be normalized with
        TargetSpec(self.kappa_qsvt, self.eta)
        warm = self.initial_angles
        if warm is None:
            return
        if warm.eta != self.eta:
            raise ValidationError(
                f"SolveConfig() initial_angles eta={warm.eta!r} differs from eta={self.eta!r}",
                cli_msg=f"--warm-start angles were built for eta={warm.eta!r}, not {self.eta!r}",
            )
        if self.na_override is not None and self.na_override != warm.n_a:
            raise ValidationError(
                f"SolveConfig() na_override={self.na_override!r} differs from len(initial_angles)={warm.n_a}",
                cli_msg=f"--na {self.na_override} does not match the {warm.n_a} warm-start angles",
            )


@dataclass(frozen=True)
class SolveResult:
    """
    angles are in the phi convention. max_residual and argmax_s come from
    a dense sweep over [1/kappa, 1]; max_node_residual is taken at the
    fitting nodes against the truncated series.
    """

    angles: AngleSet
    final_loss: float
    iterations: int
    max_residual: float
    argmax_s: float
    max_node_residual: float
    grad_norm: float
    converged: bool


def cheb_sample_nodes(na: int) -> NDArray[np.float64]:
    """Positive roots of T_{N_a}, largest first: cos((2k+1) pi / (2 N_a)), k < N_a/2."""
    validate_args(
        function_name="cheb_sample_nodes",
        args={"na": na},
        constraints={"na": {"type": INT_TYPES, "min": 2, "even": True}},
        cli_names={"na": "--na"},
    )
    k = np.arange(int(na) // 2)
    return np.cos((2 * k + 1) * np.pi / (2 * int(na)))


def _mirror(half: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.concatenate((half, half[::-1]))


def _initial_half(n_a: int, warm: AngleSet | None = None) -> NDArray[np.float64]:
    if warm is not None:
        alpha = warm.to(Convention.ALPHA).values
        return np.array(alpha[: n_a // 2], dtype=np.float64)
    # theta = 0, i.e. alpha = pi/4 at the ends and 0 inside; P is identically 0 there
    half = np.zeros(n_a // 2)
    half[0] = np.pi / 4
    return half


def residual_report(
    angles: AngleSet,
    grid_points: int = DEFAULT_SWEEP_POINTS,
) -> tuple[float, float]:
    """(max |P - eta F / kappa|, its location) over a uniform grid on [1/kappa, 1]."""
    sweep = sweep_error(angles, grid_points)
    return sweep.max_err, sweep.argmax_s


def solve_angles(config: SolveConfig) -> SolveResult:
    """
    Minimize L = sum_k (P[alpha](x_k) - Fbar(x_k))^2 with L-BFGS-B from the
    theta = 0 ansatz, or from config.initial_angles when given.

    Non-convergence is not an exception: the best iterate is returned with
    converged=False. converged means the final gradient infinity-norm is at
    most grad_tolerance or every node residual is at most eps_target.
    """
    spec = TargetSpec(config.kappa_qsvt, config.eta)
    if config.initial_angles is not None:
        n_a = config.initial_angles.n_a
    elif config.na_override is not None:
        n_a = int(config.na_override)
    else:
        n_a = choose_degree(
            config.kappa_qsvt,
            config.eps_target,
            eta=config.eta,
            cap=config.degree_cap,
        )
    nq = int(config.quadrature_nq) if config.quadrature_nq is not None else 2 * n_a

    series = compute_coeffs(
        partial(eval_normalized_target, spec=spec),
        n_a - 1,
        nq,
        parity=Parity.ODD,
    )
    nodes = cheb_sample_nodes(n_a)
    targets = np.asarray(eval_series(series, nodes), dtype=np.float64)
    logger.info(
        "solve_angles: kappa=%g eta=%g N_a=%d N_q=%d nodes=%d warm=%s",
        config.kappa_qsvt,
        config.eta,
        n_a,
        nq,
        nodes.size,
        config.initial_angles is not None,
    )

    def loss_and_grad(half: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        def residual_weights(values: NDArray[np.float64], index: slice) -> NDArray[np.float64]:
            return 2.0 * (values - targets[index])

        values, grad = eval_poly_weighted_grad(_mirror(half), nodes, residual_weights)
        residuals = values - targets
        h = half.size
        # chain rule through the mirror: parameter j feeds alpha_j and alpha_{N_a-1-j}
        return float(residuals @ residuals), grad[:h] + grad[::-1][:h]

    result = minimize(
        loss_and_grad,
        _initial_half(n_a, config.initial_angles),
        jac=True,
        method="L-BFGS-B",
        options={
            "maxcor": config.history_size,
            "gtol": config.grad_tolerance,
            "ftol": 0.0,
            "maxiter": config.max_iterations,
            "maxfun": 4 * config.max_iterations,
        },
    )

    half = np.asarray(result.x, dtype=np.float64)
    final_loss, grad = loss_and_grad(half)
    grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
    node_values, _ = eval_poly_weighted_grad(_mirror(half), nodes, np.zeros(nodes.size))
    max_node_residual = float(np.max(np.abs(node_values - targets)))

    alpha_set = AngleSet(
        convention=Convention.ALPHA,
        values=_mirror(half),
        kappa_qsvt=float(config.kappa_qsvt),
        eta=float(config.eta),
        origin=Origin.SOLVED,
    )
    max_residual, argmax_s = residual_report(alpha_set)
    phi_set = AngleSet(
        convention=Convention.ALPHA,
        values=alpha_set.values,
        kappa_qsvt=alpha_set.kappa_qsvt,
        eta=alpha_set.eta,
        origin=Origin.SOLVED,
        eps_reported=max_residual,
    ).to(Convention.PHI)

    iterations = int(result.nit)
    converged = grad_norm <= config.grad_tolerance or max_node_residual <= config.eps_target
    if converged:
        logger.info(
            "solve_angles: converged after %d iterations, loss=%.3e, max residual=%.3e",
            iterations,
            final_loss,
            max_residual,
        )
    else:
        logger.warning(
            "solve_angles: not converged after %d iterations (%s); gradient %.3e, node residual %.3e",
            iterations,
            result.message,
            grad_norm,
            max_node_residual,
        )
    return SolveResult(
        angles=phi_set,
        final_loss=final_loss,
        iterations=iterations,
        max_residual=max_residual,
        argmax_s=argmax_s,
        max_node_residual=max_node_residual,
        grad_norm=grad_norm,
        converged=bool(converged),
    )

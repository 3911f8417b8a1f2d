#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

"""
Error sweeps of P[alpha] against the normalized target and emulated QSVT
inversion of diagonal and SVD-factored test systems.

The QSVT circuit is not simulated. For A = U_l diag(s) U_r^T an odd
polynomial acts as U_r diag(P(s)) U_l^T, which is what the emulation
applies; the global phase of the circuit output is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .qsp_eval import AngleSet
from .qsp_eval import eval_poly_batch
from .target_fn import TargetSpec
from .target_fn import eval_inverse_approx
from .target_fn import eval_normalized_target
from .target_fn import require_valid_kappa
from .target_fn import validity_grid
from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import ValidationError
from .validation import validate_args

__all__ = [
    "DEFAULT_SWEEP_POINTS",
    "SystemKind",
    "ErrorSweep",
    "DiagonalSystem",
    "SvdSystem",
    "InversionReport",
    "sweep_error",
    "build_test_matrix_F",
    "build_test_matrix_sin",
    "uniform_init",
    "apply_inverse_via_svd",
    "apply_svd_inverse",
    "inversion_report",
    "inversion_error",
    "linear_profile_error",
]

DEFAULT_SWEEP_POINTS = 2001

# orthogonality slack accepted for user-supplied SVD factors
ORTHOGONALITY_TOLERANCE = 1.0e-10

Vec = NDArray[np.float64]


class SystemKind(StrEnum):
    INVERSE_APPROX = "inverse_approx"
    SINE = "sine"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class ErrorSweep:
    kappa0: float
    s_values: Vec
    p_values: Vec
    target_values: Vec
    errors: Vec
    max_err: float
    argmax_s: float


def sweep_error(
    angles: AngleSet,
    grid_points: int = DEFAULT_SWEEP_POINTS,
) -> ErrorSweep:
    """errors_i = P[alpha](s_i) - eta F(s_i) / kappa on a uniform grid over [1/kappa, 1]."""
    validate_args(
        function_name="sweep_error",
        args={"grid_points": grid_points},
        constraints={"grid_points": {"type": INT_TYPES, "min": 1}},
        cli_names={"grid_points": "--points"},
    )
    kappa = float(angles.kappa_qsvt)
    s = validity_grid(kappa, grid_points)
    p = eval_poly_batch(angles, s)
    target = eval_normalized_target(s, TargetSpec(kappa, angles.eta))
    errors = p - target
    worst = int(np.argmax(np.abs(errors)))
    return ErrorSweep(
        kappa0=kappa,
        s_values=s,
        p_values=p,
        target_values=target,
        errors=errors,
        max_err=float(abs(errors[worst])),
        argmax_s=float(s[worst]),
    )


@dataclass(frozen=True)
class DiagonalSystem:
    """
    A = diag(d). Entries may be negative; none may be zero.

    `parameter` is eta_A for the inverse-approximant matrix and xi_max for
    the sine matrix. `kappa` and `abscissa` are only set for the former.
    """

    diagonal: Vec
    kind: SystemKind = SystemKind.DIAGONAL
    parameter: float | None = None
    kappa: float | None = None
    abscissa: Vec | None = None
    rho_A: float = field(init=False)
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        d = np.array(self.diagonal, dtype=np.float64)
        if d.ndim != 1 or d.size == 0:
            raise ValidationError(f"DiagonalSystem() diagonal must be a non-empty vector, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValidationError("DiagonalSystem() diagonal entries must be finite")
        magnitudes = np.abs(d)
        if np.any(magnitudes == 0.0):
            raise ValidationError("DiagonalSystem() diagonal has a zero entry; the matrix is singular")
        norm = float(np.max(magnitudes))
        if norm > 1.0:
            raise ValidationError(
                f"DiagonalSystem() spectral norm {norm!r} exceeds 1",
                cli_msg=f"system norm {norm!r} exceeds 1; rescale the diagonal",
            )
        d.flags.writeable = False
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "kind", SystemKind(self.kind))
        if self.abscissa is not None:
            x = np.array(self.abscissa, dtype=np.float64)
            if x.shape != d.shape:
                raise ValidationError("DiagonalSystem() abscissa must match the diagonal")
            x.flags.writeable = False
            object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "norm", norm)
        object.__setattr__(self, "rho_A", norm / float(np.min(magnitudes)))

    @property
    def size(self) -> int:
        return int(self.diagonal.size)


@dataclass(frozen=True)
class SvdSystem:
    """A = left @ diag(singular_values) @ right.T with orthogonal factors."""

    left: NDArray[np.float64]
    singular_values: Vec
    right: NDArray[np.float64]
    rho_A: float = field(init=False)
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        s = np.array(self.singular_values, dtype=np.float64)
        u_l = np.array(self.left, dtype=np.float64)
        u_r = np.array(self.right, dtype=np.float64)
        n = s.size
        if s.ndim != 1 or n == 0:
            raise ValidationError("SvdSystem() singular_values must be a non-empty vector")
        if u_l.shape != (n, n) or u_r.shape != (n, n):
            raise ValidationError(
                f"SvdSystem() factors must be {n}x{n}, got {u_l.shape} and {u_r.shape}"
            )
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(u_l)) and np.all(np.isfinite(u_r))):
            raise ValidationError("SvdSystem() entries must be finite")
        if np.any(s <= 0.0):
            raise ValidationError("SvdSystem() singular values must be positive")
        for name, u in (("left", u_l), ("right", u_r)):
            defect = float(np.max(np.abs(u.T @ u - np.eye(n))))
            if defect > ORTHOGONALITY_TOLERANCE:
                raise ValidationError(
                    f"SvdSystem() {name} factor is not orthogonal (max |U^T U - I| = {defect:.3e})"
                )
        norm = float(np.max(s))
        if norm > 1.0:
            raise ValidationError(f"SvdSystem() spectral norm {norm!r} exceeds 1")
        for name, arr in (("left", u_l), ("singular_values", s), ("right", u_r)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "norm", norm)
        object.__setattr__(self, "rho_A", norm / float(np.min(s)))

    @property
    def size(self) -> int:
        return int(self.singular_values.size)


def _check_n_x(function_name: str, n_x: int, minimum: int) -> None:
    validate_args(
        function_name=function_name,
        args={"n_x": n_x},
        # 2^30 entries is already several GiB of doubles
        constraints={"n_x": {"type": INT_TYPES, "min": minimum, "max": 30}},
        cli_names={"n_x": "--nx"},
    )


def build_test_matrix_F(
    kappa: float,
    eta_A: float,
    n_x: int,
) -> DiagonalSystem:
    """
    A = (eta_A / kappa) diag(F(x_k)).

    The x grid is two mirrored uniform halves over [-1, -1/kappa] and
    [1/kappa, 1], so every singular value lies in [eta_A / kappa, eta_A].
    """
    validate_args(
        function_name="build_test_matrix_F",
        args={"kappa": kappa, "eta_A": eta_A},
        constraints={
            "kappa": {"type": REAL_TYPES, "finite": True, "min": 1},
            "eta_A": {"type": REAL_TYPES, "min_exclusive": 0, "max": 1},
        },
        cli_names={"kappa": "--kappa", "eta_A": "--eta-a"},
    )
    _check_n_x("build_test_matrix_F", n_x, 1)
    half = np.linspace(1.0 / kappa, 1.0, 1 << (int(n_x) - 1))
    x = np.concatenate((-half[::-1], half))
    d = (eta_A / kappa) * eval_inverse_approx(x, kappa)
    return DiagonalSystem(
        diagonal=d,
        kind=SystemKind.INVERSE_APPROX,
        parameter=float(eta_A),
        kappa=float(kappa),
        abscissa=x,
    )


def build_test_matrix_sin(
    n_x: int,
    xi_max: float = math.pi / 2,
) -> DiagonalSystem:
    """A = diag(sin xi_k), xi_k = -xi_max + 2 xi_max k / (N_x - 1)."""
    _check_n_x("build_test_matrix_sin", n_x, 2)
    validate_args(
        function_name="build_test_matrix_sin",
        args={"xi_max": xi_max},
        constraints={"xi_max": {"type": REAL_TYPES, "min_exclusive": 0, "max": math.pi / 2}},
        cli_names={"xi_max": "--xi-max"},
    )
    n = 1 << int(n_x)
    k = np.arange(n)
    xi = -xi_max + 2.0 * xi_max * k / (n - 1)
    return DiagonalSystem(
        diagonal=np.sin(xi),
        kind=SystemKind.SINE,
        parameter=float(xi_max),
    )


def uniform_init(n: int) -> Vec:
    """The equal-amplitude unit vector 2^{-n_x/2} (1, ..., 1)."""
    return np.full(n, 1.0 / math.sqrt(n))


def _init_vector(init: ArrayLike | None, n: int) -> Vec:
    if init is None:
        return uniform_init(n)
    vec = np.asarray(init, dtype=np.float64)
    if vec.shape != (n,):
        raise ValidationError(f"init must have shape ({n},), got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("init entries must be finite")
    return vec


def _require_kappa(
    system: DiagonalSystem | SvdSystem,
    angles: AngleSet,
) -> None:
    require_valid_kappa(
        kappa_qsvt=angles.kappa_qsvt,
        matrix_norm=system.norm,
        rho_A=system.rho_A,
    )


def apply_inverse_via_svd(
    system: DiagonalSystem,
    angles: AngleSet,
    init: ArrayLike | None = None,
) -> Vec:
    """
    QSVT action on a diagonal matrix: sign(d_k) P(|d_k|) init_k.

    Approximates (eta / kappa) A^-1 init once kappa >= rho_A / ||A||.
    """
    _require_kappa(system, angles)
    vec = _init_vector(init, system.size)
    d = system.diagonal
    return np.sign(d) * eval_poly_batch(angles, np.abs(d)) * vec


def apply_svd_inverse(
    system: SvdSystem,
    angles: AngleSet,
    init: ArrayLike | None = None,
) -> Vec:
    """QSVT action U_r diag(P(s)) U_l^T init on an SVD-factored matrix."""
    _require_kappa(system, angles)
    vec = _init_vector(init, system.size)
    p = eval_poly_batch(angles, system.singular_values)
    return system.right @ (p * (system.left.T @ vec))


def _exact_inverse(
    system: DiagonalSystem | SvdSystem,
    vec: Vec,
) -> Vec:
    if isinstance(system, DiagonalSystem):
        return vec / system.diagonal
    return system.right @ ((system.left.T @ vec) / system.singular_values)


@dataclass(frozen=True)
class InversionReport:
    """Renormalized QSVT output, exact (eta / kappa) A^-1 init, and their difference."""

    qsvt: Vec
    exact: Vec
    errors: Vec
    max_abs_err: float


def inversion_report(
    system: DiagonalSystem | SvdSystem,
    angles: AngleSet,
    init: ArrayLike | None = None,
) -> InversionReport:
    """
    Both sides are multiplied by sqrt(N_x) / eta before comparing, so for
    the uniform init the entries are of order kappa_qsvt / (kappa s).
    """
    vec = _init_vector(init, system.size)
    if isinstance(system, DiagonalSystem):
        out = apply_inverse_via_svd(system, angles, vec)
    else:
        out = apply_svd_inverse(system, angles, vec)
    scale = math.sqrt(system.size) / angles.eta
    qsvt = scale * out
    exact = scale * (angles.eta / angles.kappa_qsvt) * _exact_inverse(system, vec)
    errors = qsvt - exact
    return InversionReport(
        qsvt=qsvt,
        exact=exact,
        errors=errors,
        max_abs_err=float(np.max(np.abs(errors))),
    )


def inversion_error(
    system: DiagonalSystem | SvdSystem,
    angles: AngleSet,
    init: ArrayLike | None = None,
) -> tuple[float, Vec]:
    """Max absolute and per-entry error of the renormalized emulated inversion."""
    report = inversion_report(system, angles, init)
    return report.max_abs_err, report.errors


def linear_profile_error(
    system: DiagonalSystem,
    angles: AngleSet,
) -> tuple[float, Vec]:
    """
    Deviation of the renormalized output from the line x_k / eta_A.

    Only defined for the inverse-approximant matrix with the uniform init.
    A_F^-1 maps the uniform vector to (kappa / eta_A) x_k up to F(x) ~ 1/x,
    so the QSVT output is rescaled by kappa_qsvt / kappa in addition to
    sqrt(N_x) / eta.
    """
    if system.kind is not SystemKind.INVERSE_APPROX or system.abscissa is None:
        raise ValidationError(
            f"linear_profile_error() needs an inverse_approx system, got {system.kind.value}"
        )
    assert system.kappa is not None
    assert system.parameter is not None
    out = apply_inverse_via_svd(system, angles)
    scale = math.sqrt(system.size) / angles.eta * (angles.kappa_qsvt / system.kappa)
    errors = scale * out - system.abscissa / system.parameter
    return float(np.max(np.abs(errors))), errors

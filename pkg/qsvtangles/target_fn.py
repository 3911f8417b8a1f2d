#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

"""
Inverse-approximant target function, its normalization and the
condition-number validity checks.

The approximant F(s) = (1 - exp(-(5 s kappa)^2)) / s is odd and bounded,
and is within exp(-25) ~ 1.4e-11 (relative) of 1/s on 1/kappa <= |s| <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import Constraint
from .validation import KappaRangeError
from .validation import ValidationError
from .validation import validate_args

__all__ = [
    "DEFAULT_ETA",
    "INVERSE_APPROX_PEAK",
    "TargetSpec",
    "eval_inverse_approx",
    "eval_normalized_target",
    "min_valid_kappa",
    "require_valid_kappa",
    "validity_grid",
]

DEFAULT_ETA = 0.125

# |s| below TAYLOR_THRESHOLD / kappa uses the series form
TAYLOR_THRESHOLD = 1.0e-3

# max over s of |F(s)| / kappa, attained at |s| ~ 0.224 / kappa
INVERSE_APPROX_PEAK = 3.1909


@dataclass(frozen=True)
class TargetSpec:
    """
    Parameters of the normalized target eta * F(s) / kappa.

    eta must keep the normalized target inside [-1, 1] everywhere, which
    (because of the peak of F inside the regularized band) means
    eta <= 1 / INVERSE_APPROX_PEAK.
    """

    kappa_qsvt: float
    eta_qsvt: float = DEFAULT_ETA

    def __post_init__(self) -> None:
        constraints: dict[str, Constraint] = {
            "kappa_qsvt": {"type": REAL_TYPES, "finite": True, "min": 1},
            "eta_qsvt": {
                "type": REAL_TYPES,
                "min_exclusive": 0,
                "max_exclusive": 1,
            },
        }
        validate_args(
            function_name="TargetSpec",
            args={"kappa_qsvt": self.kappa_qsvt, "eta_qsvt": self.eta_qsvt},
            constraints=constraints,
            cli_names={"kappa_qsvt": "--kappa", "eta_qsvt": "--eta"},
        )
        if self.eta_qsvt * INVERSE_APPROX_PEAK > 1.0:
            raise ValidationError(
                f"TargetSpec() eta_qsvt={self.eta_qsvt} lets |eta F(s) / kappa| exceed 1 "
                f"(need eta_qsvt <= {1.0 / INVERSE_APPROX_PEAK:.4f})",
                cli_msg=f"--eta must be <= {1.0 / INVERSE_APPROX_PEAK:.4f}",
            )


def _check_kappa(kappa: float) -> None:
    validate_args(
        function_name="eval_inverse_approx",
        args={"kappa": kappa},
        constraints={"kappa": {"type": REAL_TYPES, "finite": True, "min": 1}},
    )


def eval_inverse_approx(
    s: ArrayLike,
    kappa: float,
) -> float | NDArray[np.float64]:
    """
    Evaluate F(s) = (1 - exp(-(5 s kappa)^2)) / s.

    Accepts a scalar or an array. F(0) = 0. The magnitude is computed from
    |s| and the sign copied back, so F(-s) == -F(s) bit for bit.
    """
    _check_kappa(kappa)
    s_arr = np.asarray(s, dtype=np.float64)
    a = np.abs(s_arr)
    x = 5.0 * kappa * a
    near_zero = a < TAYLOR_THRESHOLD / kappa
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = -np.expm1(-(x * x)) / a
    k2 = kappa * kappa
    series = 25.0 * k2 * a * (1.0 - 12.5 * k2 * a * a)
    out = np.copysign(np.where(near_zero, series, direct), s_arr)
    if out.ndim == 0:
        return float(out)
    return out


def eval_normalized_target(
    s: ArrayLike,
    spec: TargetSpec,
) -> float | NDArray[np.float64]:
    """eta * F(s) / kappa, the function the QSVT polynomial approximates."""
    return spec.eta_qsvt * eval_inverse_approx(s, spec.kappa_qsvt) / spec.kappa_qsvt


def validity_grid(
    kappa: float,
    points: int,
) -> NDArray[np.float64]:
    """Uniform grid over the validity interval [1/kappa, 1]."""
    validate_args(
        function_name="validity_grid",
        args={"kappa": kappa, "points": points},
        constraints={
            "kappa": {"type": REAL_TYPES, "finite": True, "min": 1},
            "points": {"type": INT_TYPES, "min": 1},
        },
    )
    return np.linspace(1.0 / kappa, 1.0, int(points))


def min_valid_kappa(
    matrix_norm: float,
    rho_A: float,
) -> float:
    """
    Smallest kappa_qsvt whose validity interval covers every singular value.

    rho_A / ||A|| = 1 / s_min.
    """
    if isinstance(matrix_norm, REAL_TYPES) and matrix_norm > 1:
        raise ValidationError(
            f"min_valid_kappa() matrix_norm must be <= 1 for a block-encoding, got {matrix_norm!r}",
            cli_msg=f"matrix norm {matrix_norm!r} exceeds 1; rescale the matrix before block-encoding",
        )
    validate_args(
        function_name="min_valid_kappa",
        args={"matrix_norm": matrix_norm, "rho_A": rho_A},
        constraints={
            "matrix_norm": {"type": REAL_TYPES, "min_exclusive": 0, "max": 1},
            "rho_A": {"type": REAL_TYPES, "finite": True, "min": 1},
        },
    )
    return float(rho_A) / float(matrix_norm)


def require_valid_kappa(
    *,
    kappa_qsvt: float,
    matrix_norm: float,
    rho_A: float,
) -> None:
    """Raise KappaRangeError unless kappa_qsvt >= rho_A / ||A||."""
    needed = min_valid_kappa(matrix_norm, rho_A)
    # relative slack absorbs rounding in rho_A / ||A||
    if kappa_qsvt < needed * (1.0 - 1.0e-12):
        raise KappaRangeError(
            f"kappa_qsvt={kappa_qsvt!r} is below rho_A / ||A|| = {needed!r}",
            cli_msg=f"angle set kappa {kappa_qsvt!r} is below the required {needed!r} for this system",
        )

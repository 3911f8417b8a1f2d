#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)
# pylint: disable=too-many-locals                 # [R0914]

"""
Angle conventions and evaluation of the QSP polynomial

    U[alpha](s) = e^{i alpha_0 Z} prod_{l=1}^{N_a-1} W(s) e^{i alpha_l Z}
    W(s) = [[s, i sqrt(1-s^2)], [i sqrt(1-s^2), s]]
    P[alpha](s) = Re U_00

Only the first row of U is propagated. All complex arithmetic is spelled
out on real arrays so each grid point sees the same sequence of IEEE
operations no matter how many points are evaluated together.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .validation import REAL_TYPES
from .validation import ValidationError
from .validation import validate_args

__all__ = [
    "Convention",
    "Origin",
    "AngleSet",
    "convert",
    "eval_poly",
    "eval_poly_grad",
    "eval_poly_batch",
    "eval_poly_weighted_grad",
    "eval_unitary",
]

# grid points processed together; a tuning constant, results do not depend on it
GRID_BLOCK = 1 << 16

Vec = NDArray[np.float64]


class Convention(StrEnum):
    PHI = "phi"
    THETA = "theta"
    ALPHA = "alpha"


class Origin(StrEnum):
    SOLVED = "solved"
    ESTIMATED = "estimated"
    LOADED = "loaded"


def _phi_offsets(
    n_a: int,
    convention: Convention,
) -> Vec:
    """value = phi - offset for the given convention."""
    if convention is Convention.PHI:
        return np.zeros(n_a)
    offsets = np.full(n_a, np.pi / 2)
    if convention is Convention.ALPHA:
        offsets[0] = np.pi / 4
        offsets[-1] = np.pi / 4
    return offsets


@dataclass(frozen=True)
class AngleSet:
    """
    A symmetric phase sequence of even length plus its provenance.

    values[j] == values[N_a - 1 - j] exactly.
    """

    convention: Convention
    values: Vec
    kappa_qsvt: float
    eta: float
    origin: Origin
    eps_reported: float | None = None

    def __post_init__(self) -> None:
        try:
            convention = Convention(self.convention)
            origin = Origin(self.origin)
        except ValueError as e:
            raise ValidationError(f"AngleSet() {e}") from e

        validate_args(
            function_name="AngleSet",
            args={
                "kappa_qsvt": self.kappa_qsvt,
                "eta": self.eta,
                "eps_reported": self.eps_reported,
            },
            constraints={
                "kappa_qsvt": {"type": REAL_TYPES, "finite": True, "min": 1},
                "eta": {"type": REAL_TYPES, "min_exclusive": 0, "max_exclusive": 1},
                "eps_reported": {"type": REAL_TYPES, "optional": True, "min": 0},
            },
        )

        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2 or values.size % 2:
            raise ValidationError(
                f"AngleSet() needs an even number (>= 2) of angles, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("AngleSet() angles must be finite")
        if not np.array_equal(values, values[::-1]):
            bad = int(np.flatnonzero(values != values[::-1])[0])
            raise ValidationError(
                f"AngleSet() angles are not inversion-symmetric at index {bad}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "convention", convention)
        object.__setattr__(self, "origin", origin)

    @property
    def n_a(self) -> int:
        return int(self.values.size)

    def to(self, convention: Convention | str) -> AngleSet:
        return convert(self, convention)


def convert(
    angles: AngleSet,
    to: Convention | str,
) -> AngleSet:
    """
    Re-express `angles` in another convention.

    theta = phi - pi/2; alpha = phi - pi/4 at both ends, phi - pi/2 elsewhere.
    """
    try:
        target = Convention(to)
    except ValueError as e:
        raise ValidationError(
            f"convert() unknown convention {to!r}",
            cli_msg=f"unknown convention {to!r} (choose phi, theta or alpha)",
        ) from e
    if target is angles.convention:
        return angles
    shift = _phi_offsets(angles.n_a, angles.convention) - _phi_offsets(angles.n_a, target)
    return AngleSet(
        convention=target,
        values=angles.values + shift,
        kappa_qsvt=angles.kappa_qsvt,
        eta=angles.eta,
        origin=angles.origin,
        eps_reported=angles.eps_reported,
    )


def _alpha_values(alpha: AngleSet | ArrayLike) -> Vec:
    if isinstance(alpha, AngleSet):
        return np.asarray(alpha.to(Convention.ALPHA).values, dtype=np.float64)
    values = np.asarray(alpha, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ValidationError(
            f"QSP evaluation needs a 1-D sequence of >= 2 angles, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValidationError("QSP angles must be finite")
    return values


def _grid(s: ArrayLike) -> Vec:
    grid = np.asarray(s, dtype=np.float64)
    if grid.size and not np.all(np.abs(grid) <= 1.0):
        bad = grid[~(np.abs(grid) <= 1.0)].flat[0]
        raise ValidationError(
            f"QSP evaluation requires |s| <= 1, got s={bad!r}"
        )
    return grid


def _row_step(
    a0r: Vec,
    a0i: Vec,
    a1r: Vec,
    a1i: Vec,
    s: Vec,
    c: Vec,
    cos_al: float,
    sin_al: float,
) -> tuple[Vec, Vec, Vec, Vec]:
    """(a0, a1) -> (a0, a1) . W(s) . diag(e^{i al}, e^{-i al})"""
    x0r = a0r * s - a1i * c
    x0i = a0i * s + a1r * c
    x1r = a1r * s - a0i * c
    x1i = a1i * s + a0r * c
    return (
        x0r * cos_al - x0i * sin_al,
        x0r * sin_al + x0i * cos_al,
        x1r * cos_al + x1i * sin_al,
        x1i * cos_al - x1r * sin_al,
    )


def _sqrt_one_minus_sq(s: Vec) -> Vec:
    return np.sqrt((1.0 - s) * (1.0 + s))


def _propagate_row(
    alpha: Vec,
    s: Vec,
    first: tuple[complex, complex],
) -> tuple[Vec, Vec, Vec, Vec]:
    """Row vector e^T U for the start row e = `first` (before e^{i alpha_0 Z})."""
    c = _sqrt_one_minus_sq(s)
    cos_al = np.cos(alpha)
    sin_al = np.sin(alpha)
    e0 = first[0] * complex(cos_al[0], sin_al[0])
    e1 = first[1] * complex(cos_al[0], -sin_al[0])
    a0r = np.full(s.shape, e0.real)
    a0i = np.full(s.shape, e0.imag)
    a1r = np.full(s.shape, e1.real)
    a1i = np.full(s.shape, e1.imag)
    for l in range(1, alpha.size):
        a0r, a0i, a1r, a1i = _row_step(a0r, a0i, a1r, a1i, s, c, cos_al[l], sin_al[l])
    return a0r, a0i, a1r, a1i


def eval_poly_batch(
    alpha: AngleSet | ArrayLike,
    s_grid: ArrayLike,
) -> Vec:
    """P[alpha](s) for every s in `s_grid`; the result has the grid's shape."""
    values = _alpha_values(alpha)
    grid = _grid(s_grid)
    flat = grid.reshape(-1)
    out = np.empty(flat.shape)
    for start in range(0, flat.size, GRID_BLOCK):
        block = flat[start : start + GRID_BLOCK]
        out[start : start + block.size] = _propagate_row(values, block, (1.0, 0.0))[0]
    return out.reshape(grid.shape)


def eval_poly(
    alpha: AngleSet | ArrayLike,
    s: float,
) -> float:
    """P[alpha](s) = Re U_00[alpha](s) at a single point."""
    return float(eval_poly_batch(alpha, np.array([s], dtype=np.float64))[0])


def eval_unitary(
    alpha: AngleSet | ArrayLike,
    s: float,
) -> NDArray[np.complex128]:
    """The full 2x2 matrix U[alpha](s)."""
    values = _alpha_values(alpha)
    grid = _grid(np.array([s], dtype=np.float64))
    rows = []
    for first in ((1.0, 0.0), (0.0, 1.0)):
        a0r, a0i, a1r, a1i = _propagate_row(values, grid, first)
        rows.append([complex(a0r[0], a0i[0]), complex(a1r[0], a1i[0])])
    return np.array(rows, dtype=np.complex128)


def _weighted_grad_block(
    alpha: Vec,
    s: Vec,
    weights_for: Callable[[Vec], Vec],
    grad: Vec,
) -> Vec:
    """
    Accumulate sum_k w_k dP(s_k)/dalpha_l into `grad`; return P(s_k).

    The weights are requested once the forward values are known.

    dU/dalpha_l = A_l (iZ) B_l with A_l the prefix through e^{i alpha_l Z}
    and B_l the suffix after it. The backward pass carries the column
    B_l e_0 and recovers the row e_0^T A_l by undoing one unitary factor
    per step, so memory stays O(len(s)).
    """
    c = _sqrt_one_minus_sq(s)
    cos_al = np.cos(alpha)
    sin_al = np.sin(alpha)
    a0r, a0i, a1r, a1i = _propagate_row(alpha, s, (1.0, 0.0))
    values = a0r.copy()
    weights = weights_for(values)

    b0r = np.ones(s.shape)
    b0i = np.zeros(s.shape)
    b1r = np.zeros(s.shape)
    b1i = np.zeros(s.shape)
    for l in range(alpha.size - 1, -1, -1):
        # Re(i (a0 b0 - a1 b1))
        g = (a1r * b1i + a1i * b1r) - (a0r * b0i + a0i * b0r)
        grad[l] += weights @ g
        if l == 0:
            break
        ca = cos_al[l]
        sa = sin_al[l]

        # B_{l-1} e0 = W E_l (B_l e0)
        y0r = b0r * ca - b0i * sa
        y0i = b0r * sa + b0i * ca
        y1r = b1r * ca + b1i * sa
        y1i = b1i * ca - b1r * sa
        b0r, b0i, b1r, b1i = (
            s * y0r - c * y1i,
            s * y0i + c * y1r,
            s * y1r - c * y0i,
            s * y1i + c * y0r,
        )

        # e0^T A_{l-1} = (e0^T A_l) E_l^dagger W^dagger
        z0r = a0r * ca + a0i * sa
        z0i = a0i * ca - a0r * sa
        z1r = a1r * ca - a1i * sa
        z1i = a1r * sa + a1i * ca
        a0r, a0i, a1r, a1i = (
            s * z0r + c * z1i,
            s * z0i - c * z1r,
            s * z1r + c * z0i,
            s * z1i - c * z0r,
        )
    return values


def eval_poly_weighted_grad(
    alpha: AngleSet | ArrayLike,
    s_grid: ArrayLike,
    weights: ArrayLike | Callable[[Vec, slice], ArrayLike],
) -> tuple[Vec, Vec]:
    """
    Values P(s_k) and the weighted gradient sum_k w_k dP(s_k)/dalpha.

    One forward and one backward pass over the sequence; the gradient is
    with respect to the alpha-convention angles.

    `weights` is either an array matching the grid or a callable
    weights(values, index) returning the weights of grid[index] given
    P on that slice, for weights that depend on P (e.g. loss residuals).
    """
    values = _alpha_values(alpha)
    grid = _grid(s_grid).reshape(-1)
    if callable(weights):
        weight_fn = weights
    else:
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if w.shape != grid.shape:
            raise ValidationError(
                f"eval_poly_weighted_grad() weights shape {w.shape} does not match grid shape {grid.shape}"
            )

        def weight_fn(_values: Vec, index: slice) -> Vec:
            return w[index]

    grad = np.zeros(values.size)
    out = np.empty(grid.shape)
    for start in range(0, grid.size, GRID_BLOCK):
        index = slice(start, min(start + GRID_BLOCK, grid.size))

        def block_weights(block_values: Vec, index: slice = index) -> Vec:
            w_block = np.asarray(weight_fn(block_values, index), dtype=np.float64)
            if w_block.shape != block_values.shape:
                raise ValidationError(
                    f"eval_poly_weighted_grad() weights callback returned shape {w_block.shape}, expected {block_values.shape}"
                )
            return w_block

        out[index] = _weighted_grad_block(values, grid[index], block_weights, grad)
    return out, grad


def eval_poly_grad(
    alpha: AngleSet | ArrayLike,
    s: float,
) -> tuple[float, Vec]:
    """P[alpha](s) and dP/dalpha_l for every l."""
    values, grad = eval_poly_weighted_grad(alpha, np.array([s]), np.array([1.0]))
    return float(values[0]), grad

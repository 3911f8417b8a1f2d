#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

"""
Chebyshev expansion of the normalized target: coefficients from the
discrete Fourier sum, Clenshaw evaluation, and degree selection.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from functools import partial
from typing import Literal

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .target_fn import DEFAULT_ETA
from .target_fn import TargetSpec
from .target_fn import eval_normalized_target
from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import DegreeCapError
from .validation import ValidationError
from .validation import validate_args

__all__ = [
    "Parity",
    "ChebSeries",
    "compute_coeffs",
    "eval_series",
    "choose_degree",
    "even_cosine_basis",
    "eval_even_series",
]

logger = logging.getLogger(__name__)

PARITY_TOLERANCE = 1.0e-10
DEFAULT_DEGREE_CAP = 1_000_000

# rows of the cosine table gathered per block in the direct sum
_DIRECT_BLOCK_ELEMENTS = 1 << 22


class Parity(StrEnum):
    ODD = "odd"
    EVEN = "even"
    NONE = "none"


@dataclass(frozen=True)
class ChebSeries:
    """
    Truncated expansion sum_{k=0}^{degree_nc} c_k T_k(s).

    For odd (even) parity the even (odd) coefficients must be below
    PARITY_TOLERANCE and are stored as exact zeros.
    """

    degree_nc: int
    coeffs: NDArray[np.float64]
    parity: Parity = Parity.NONE

    def __post_init__(self) -> None:
        validate_args(
            function_name="ChebSeries",
            args={"degree_nc": self.degree_nc},
            constraints={"degree_nc": {"type": INT_TYPES, "min": 0}},
        )
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.shape != (self.degree_nc + 1,):
            raise ValidationError(
                f"ChebSeries() expected {self.degree_nc + 1} coefficients, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("ChebSeries() coefficients must be finite")

        parity = Parity(self.parity)
        if parity is not Parity.NONE:
            wrong = coeffs[0::2] if parity is Parity.ODD else coeffs[1::2]
            worst = float(np.max(np.abs(wrong))) if wrong.size else 0.0
            if worst > PARITY_TOLERANCE:
                raise ValidationError(
                    f"ChebSeries() {parity.value} series has an off-parity coefficient of magnitude {worst:.3e}"
                )
            wrong[...] = 0.0
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "parity", parity)

    @property
    def n_a(self) -> int:
        """Number of QSP angles realizing a series of this degree."""
        return self.degree_nc + 1


def _sample(
    f: Callable[[NDArray[np.float64]], ArrayLike],
    nodes: NDArray[np.float64],
) -> NDArray[np.float64]:
    samples = np.asarray(f(nodes), dtype=np.float64)
    if samples.shape != nodes.shape:
        samples = np.array([f(x) for x in nodes], dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        bad = int(np.flatnonzero(~np.isfinite(samples))[0])
        raise ValidationError(
            f"compute_coeffs() f is not finite at s={nodes[bad]!r}"
        )
    return samples


def _detect_parity(
    samples: NDArray[np.float64],
    quadrature_nq: int,
) -> Parity:
    # node j is -cos(j pi / N_q); node (N_q - j) is its mirror image
    j = np.arange(2 * quadrature_nq)
    mirror = samples[(quadrature_nq - j) % (2 * quadrature_nq)]
    tol = 1.0e-12 * max(1.0, float(np.max(np.abs(samples))))
    if np.max(np.abs(samples + mirror)) <= tol:
        return Parity.ODD
    if np.max(np.abs(samples - mirror)) <= tol:
        return Parity.EVEN
    return Parity.NONE


def _direct_sums(
    samples: NDArray[np.float64],
    degree_nc: int,
    quadrature_nq: int,
) -> NDArray[np.float64]:
    period = 2 * quadrature_nq
    j = np.arange(period, dtype=np.int64)
    table = np.cos(np.pi * np.arange(period) / quadrature_nq)
    sums = np.empty(degree_nc + 1)
    block = max(1, _DIRECT_BLOCK_ELEMENTS // period)
    for start in range(0, degree_nc + 1, block):
        k = np.arange(start, min(start + block, degree_nc + 1), dtype=np.int64)
        # exact argument reduction: cos(k j pi / N_q) = table[(k j) mod 2 N_q]
        sums[k] = table[np.outer(k, j) % period] @ samples
    return sums


def compute_coeffs(
    f: Callable[[NDArray[np.float64]], ArrayLike],
    degree_nc: int,
    quadrature_nq: int,
    *,
    method: Literal["direct", "fft"] = "direct",
    parity: Parity | None = None,
) -> ChebSeries:
    """
    Chebyshev coefficients of f from 2 N_q samples at s = -cos(j pi / N_q):

        c_k = (2 - delta_k0) / (2 N_q) (-1)^k Re sum_j f(-cos(j pi / N_q)) e^{i k j pi / N_q}

    `method="direct"` evaluates the cosine sum term by term in a fixed
    order; `method="fft"` uses one real-input FFT. When `parity` is None it
    is detected from the symmetric sample set.
    """
    validate_args(
        function_name="compute_coeffs",
        args={"degree_nc": degree_nc, "quadrature_nq": quadrature_nq},
        constraints={
            "degree_nc": {"type": INT_TYPES, "min": 0},
            "quadrature_nq": {"type": INT_TYPES, "min": 1},
        },
        cli_names={"quadrature_nq": "--nq"},
    )
    if quadrature_nq < degree_nc:
        raise ValidationError(
            f"compute_coeffs() quadrature_nq={quadrature_nq} must be >= degree_nc={degree_nc}",
            cli_msg=f"--nq must be >= N_c={degree_nc}",
        )
    if method not in ("direct", "fft"):
        raise ValidationError(f"compute_coeffs() unknown method {method!r}")

    degree_nc = int(degree_nc)
    quadrature_nq = int(quadrature_nq)
    nodes = -np.cos(np.pi * np.arange(2 * quadrature_nq) / quadrature_nq)
    samples = _sample(f, nodes)

    if method == "fft":
        sums = np.fft.fft(samples).real[: degree_nc + 1]
    else:
        sums = _direct_sums(samples, degree_nc, quadrature_nq)

    k = np.arange(degree_nc + 1)
    weights = np.where(k == 0, 1.0, 2.0) / (2 * quadrature_nq)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    coeffs = weights * signs * sums

    if parity is None:
        parity = _detect_parity(samples, quadrature_nq)
    return ChebSeries(degree_nc=degree_nc, coeffs=coeffs, parity=parity)


def eval_series(
    series: ChebSeries,
    s: ArrayLike,
) -> float | NDArray[np.float64]:
    """Clenshaw evaluation of the series at s (scalar or array)."""
    out = C.chebval(np.asarray(s, dtype=np.float64), series.coeffs)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _tail_sums(coeffs: NDArray[np.float64]) -> NDArray[np.float64]:
    # tail[k] = sum_{m >= k} |c_m|, with tail[len] = 0
    tail = np.zeros(coeffs.size + 1)
    tail[:-1] = np.cumsum(np.abs(coeffs)[::-1])[::-1]
    return tail


def choose_degree(
    kappa: float,
    eps_target: float,
    *,
    eta: float = DEFAULT_ETA,
    cap: int = DEFAULT_DEGREE_CAP,
) -> int:
    """
    Smallest even N_a whose truncation tail sum_{k >= N_a} |c_k| of the
    normalized target is <= eps_target.

    The tail is read from a reference expansion holding at least 4 N_a
    terms; the reference grows until it does.
    """
    validate_args(
        function_name="choose_degree",
        args={"kappa": kappa, "eps_target": eps_target, "cap": cap},
        constraints={
            "kappa": {"type": REAL_TYPES, "finite": True, "min": 1},
            "eps_target": {"type": REAL_TYPES, "min_exclusive": 0, "max_exclusive": 1},
            "cap": {"type": INT_TYPES, "min": 2},
        },
        cli_names={"kappa": "--kappa", "eps_target": "--eps"},
    )
    target = partial(eval_normalized_target, spec=TargetSpec(kappa, eta))

    guess = max(16, 2 * math.ceil(4.0 * kappa))
    while True:
        if guess > cap:
            raise DegreeCapError(
                f"choose_degree() kappa={kappa!r}, eps_target={eps_target!r} needs N_a > cap={cap}",
                cli_msg=f"--kappa {kappa!r} with --eps {eps_target!r} needs more than {cap} angles",
            )
        ref_nc = 4 * guess
        nq = 1 << math.ceil(math.log2(2 * ref_nc))
        series = compute_coeffs(target, ref_nc, nq, method="fft", parity=Parity.ODD)
        tail = _tail_sums(series.coeffs)

        even_k = np.arange(2, ref_nc + 2, 2)
        ok = even_k[tail[even_k] <= eps_target]
        if ok.size == 0:
            logger.debug("choose_degree: no N_a <= %d meets %.1e, widening", ref_nc, eps_target)
            guess *= 4
            continue
        n_a = int(ok[0])
        if n_a <= guess:
            if n_a > cap:
                raise DegreeCapError(
                    f"choose_degree() N_a={n_a} exceeds cap={cap}",
                    cli_msg=f"required N_a={n_a} exceeds the cap of {cap}",
                )
            logger.debug("choose_degree: kappa=%g eps=%.1e -> N_a=%d", kappa, eps_target, n_a)
            return n_a
        guess = n_a


def even_cosine_basis(
    r: ArrayLike,
    n_terms: int,
) -> NDArray[np.float64]:
    """
    Design matrix with columns cos(2 l arccos r), l = 0..n_terms-1.

    Built as T_l(2 r^2 - 1), which is the same function and exactly even in r.
    """
    r = np.asarray(r, dtype=np.float64)
    return C.chebvander(2.0 * r * r - 1.0, n_terms - 1)


def eval_even_series(
    r: ArrayLike,
    coeffs: ArrayLike,
) -> NDArray[np.float64]:
    """sum_l c_l cos(2 l arccos r) evaluated as a Chebyshev series in 2 r^2 - 1."""
    r = np.asarray(r, dtype=np.float64)
    return C.chebval(2.0 * r * r - 1.0, np.asarray(coeffs, dtype=np.float64))

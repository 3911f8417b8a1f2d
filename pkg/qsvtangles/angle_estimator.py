#!/usr/bin/env python3
# tab-width:4

"""
Estimated angle sets for a target condition number from fitted metaparameters.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .cheb import eval_even_series
from .meta_fit import MetaParams
from .meta_fit import envelope_counts
from .meta_fit import merge_envelope
from .qsp_eval import AngleSet
from .qsp_eval import Convention
from .qsp_eval import Origin
from .target_fn import TargetSpec
from .target_fn import eval_normalized_target
from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import DegreeCapError
from .validation import EstimationRangeError
from .validation import validate_args

__all__ = [
    "DEFAULT_NA_CAP",
    "EstimateRequest",
    "estimate_na",
    "build_envelope_values",
    "pinned_endpoint_shift",
    "estimate_angles",
]

logger = logging.getLogger(__name__)

DEFAULT_NA_CAP = 100_000_000


@dataclass(frozen=True)
class EstimateRequest:
    kappa0: float
    meta: MetaParams
    na_cap: int = DEFAULT_NA_CAP
    pin_endpoint: bool = True

    def __post_init__(self) -> None:
        validate_args(
            function_name="EstimateRequest",
            args={"kappa0": self.kappa0, "na_cap": self.na_cap},
            constraints={
                "kappa0": {"type": REAL_TYPES, "finite": True, "min": 1},
                "na_cap": {"type": INT_TYPES, "min": 2},
            },
            cli_names={"kappa0": "--kappa0"},
        )
        if self.kappa0 < self.meta.min_kappa:
            raise EstimationRangeError(
                f"EstimateRequest() kappa0={self.kappa0!r} is below the smallest fitted kappa {self.meta.min_kappa!r}",
                cli_msg=f"--kappa0 {self.kappa0!r} is below the smallest reference kappa {self.meta.min_kappa!r}",
            )
        if self.kappa0 < self.meta.kappa_ref:
            logger.warning(
                "kappa0=%g is below kappa_ref=%g; estimated angles lose accuracy there",
                self.kappa0,
                self.meta.kappa_ref,
            )


def estimate_na(
    kappa0: float,
    meta: MetaParams,
    *,
    cap: int = DEFAULT_NA_CAP,
) -> int:
    """N_a,0 = floor(N_a,ref kappa0 / kappa_ref), rounded up to even."""
    validate_args(
        function_name="estimate_na",
        args={"kappa0": kappa0, "cap": cap},
        constraints={
            "kappa0": {"type": REAL_TYPES, "finite": True, "min_exclusive": 0},
            "cap": {"type": INT_TYPES, "min": 2},
        },
        cli_names={"kappa0": "--kappa0"},
    )
    n0 = math.floor(meta.na_ref * kappa0 / meta.kappa_ref)
    n_a = n0 + n0 % 2
    if n_a > cap:
        raise DegreeCapError(
            f"estimate_na() kappa0={kappa0!r} needs N_a={n_a} > cap={cap}",
            cli_msg=f"--kappa0 {kappa0!r} needs {n_a} angles, more than the cap of {cap}",
        )
    if n_a < 2:
        raise EstimationRangeError(
            f"estimate_na() kappa0={kappa0!r} gives N_a={n_a}",
            cli_msg=f"--kappa0 {kappa0!r} is too small for these metaparameters",
        )
    return int(n_a)


def build_envelope_values(
    n_points: int,
    c_sh: ArrayLike,
) -> NDArray[np.float64]:
    """G(r_j) = sum_l c_sh[l] cos(2 l arccos r_j) on r_j = j / (n_points - 1)."""
    validate_args(
        function_name="build_envelope_values",
        args={"n_points": n_points},
        constraints={"n_points": {"type": INT_TYPES, "min": 2}},
    )
    r = np.arange(int(n_points)) / (int(n_points) - 1)
    return eval_even_series(r, c_sh)


def pinned_endpoint_shift(
    theta: NDArray[np.float64],
    kappa0: float,
    eta: float,
) -> float:
    """
    Common shift delta such that P(1) = -sin(sum(theta + delta)) equals the
    target eta F(1) / kappa0.

    Envelopes sampled on a longer grid keep the angle sum of the reference
    set, so without the shift P(1) stays near eta / kappa_ref. A uniform
    shift moves P(s) by about delta sin(N_a t) / sin(t), s = cos t, which
    vanishes away from s = 1 as N_a grows.
    """
    target_at_one = float(eval_normalized_target(1.0, TargetSpec(kappa0, eta)))
    return (-math.asin(target_at_one) - math.fsum(theta)) / theta.size


def estimate_angles(request: EstimateRequest) -> AngleSet:
    """
    Envelopes on the grids of the new N_a, interleaved, mirrored,
    renormalized to max |theta| = 1 and scaled by Theta_max(kappa0).
    With request.pin_endpoint the set is then shifted by
    pinned_endpoint_shift, so max |theta| differs from Theta_max by |delta|.

    Returns phi-convention angles with origin=estimated.
    """
    meta = request.meta
    n_a = estimate_na(request.kappa0, meta, cap=request.na_cap)
    n_pos, n_neg = envelope_counts(n_a)
    if n_pos < 2:
        raise EstimationRangeError(
            f"estimate_angles() N_a={n_a} leaves {n_pos} positive envelope point(s); need >= 2",
            cli_msg=f"--kappa0 {request.kappa0!r} gives only {n_a} angles; at least 8 are needed",
        )

    theta_max = meta.amplitude(request.kappa0)
    if not theta_max > 0.0:
        raise EstimationRangeError(
            f"estimate_angles() amplitude model gives Theta_max({request.kappa0!r}) = {theta_max!r}",
            cli_msg=f"the amplitude model is not positive at --kappa0 {request.kappa0!r}; it is too far outside the bank",
        )

    envelope = merge_envelope(
        build_envelope_values(n_pos, meta.c_sh_pos),
        build_envelope_values(n_neg, meta.c_sh_neg),
        n_a,
    )
    peak = float(np.max(np.abs(envelope)))
    if peak == 0.0:
        raise EstimationRangeError("estimate_angles() envelopes vanish identically")
    theta = theta_max * (envelope / peak)
    shift = 0.0
    if request.pin_endpoint:
        shift = pinned_endpoint_shift(theta, request.kappa0, meta.eta)
        theta = theta + shift
    logger.debug(
        "estimate_angles: kappa0=%g N_a=%d Theta_max=%.6e envelope peak=%.6f endpoint shift=%.3e",
        request.kappa0,
        n_a,
        theta_max,
        peak,
        shift,
    )
    return AngleSet(
        convention=Convention.THETA,
        values=theta,
        kappa_qsvt=float(request.kappa0),
        eta=meta.eta,
        origin=Origin.ESTIMATED,
    ).to(Convention.PHI)

#!/usr/bin/env python3
# tab-width:4

# pylint: disable=invalid-name                    # [C0103] single letter var names, name too descriptive(!)

"""
Metaparameters of the angle model, fitted from a bank of solved angle sets.

Two pieces are fitted:

    amplitude   theta_max(kappa) ~ sum_l c_ampl[l] kappa^-l      (whole bank)
    envelopes   theta / theta_max on the first half, split into the
                positive and negative subsequences, each fitted with
                sum_l c_sh[l] cos(2 l arccos r) on r in [0, 1]  (one reference set)

In the first half (j = 0 .. N_a/2 - 1) the angle at distance m = N_a/2 - 1 - j
from the center is positive iff m is odd.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .cheb import even_cosine_basis
from .qsp_eval import AngleSet
from .qsp_eval import Convention
from .validation import INT_TYPES
from .validation import REAL_TYPES
from .validation import EstimationRangeError
from .validation import RankDeficientError
from .validation import SignPatternError
from .validation import ValidationError
from .validation import validate_args

__all__ = [
    "DEFAULT_N_AMPL",
    "DEFAULT_N_SH",
    "ReferenceBank",
    "FitResiduals",
    "MetaParams",
    "extract_theta_max",
    "fit_amplitude",
    "fit_amplitude_series",
    "envelope_counts",
    "split_envelope",
    "merge_envelope",
    "fit_envelope",
    "build_meta",
]

logger = logging.getLogger(__name__)

DEFAULT_N_AMPL = 5
DEFAULT_N_SH = 20

# normalized angles smaller than this are not used to validate the sign pattern
SIGN_CHECK_FLOOR = 1.0e-9

Vec = NDArray[np.float64]


@dataclass(frozen=True)
class ReferenceBank:
    """Solved angle sets sharing one eta, ordered by strictly increasing kappa."""

    entries: tuple[AngleSet, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        if not entries:
            raise ValidationError("ReferenceBank() needs at least one angle set")
        etas = {a.eta for a in entries}
        if len(etas) != 1:
            raise ValidationError(
                f"ReferenceBank() angle sets were solved at different eta values {sorted(etas)}",
                cli_msg=f"reference files mix eta values {sorted(etas)}",
            )
        kappas = [a.kappa_qsvt for a in entries]
        for lo, hi in zip(kappas, kappas[1:]):
            if not hi > lo:
                raise ValidationError(
                    f"ReferenceBank() kappa values must be strictly increasing, got {lo!r} then {hi!r}",
                    cli_msg=f"reference files contain duplicate or unsorted kappa {hi!r}",
                )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_angle_sets(cls, angle_sets: Iterable[AngleSet]) -> ReferenceBank:
        return cls(entries=tuple(sorted(angle_sets, key=lambda a: a.kappa_qsvt)))

    @property
    def kappas(self) -> Vec:
        return np.array([a.kappa_qsvt for a in self.entries], dtype=np.float64)

    @property
    def eta(self) -> float:
        return self.entries[0].eta

    def __len__(self) -> int:
        return len(self.entries)

    def find(self, kappa: float) -> AngleSet:
        for entry in self.entries:
            if math.isclose(entry.kappa_qsvt, kappa, rel_tol=1.0e-12):
                return entry
        raise ValidationError(
            f"ReferenceBank.find() no angle set at kappa={kappa!r}; bank has {self.kappas.tolist()}",
            cli_msg=f"--env-kappa {kappa!r} is not one of the reference kappas",
        )


class FitResiduals(NamedTuple):
    """Largest absolute deviation of each fit over its data points."""

    ampl: float
    env_pos: float
    env_neg: float


@dataclass(frozen=True)
class MetaParams:
    kappa_ref: float
    na_ref: int
    eta: float
    c_ampl: Vec
    c_sh_pos: Vec
    c_sh_neg: Vec
    fit_residuals: FitResiduals = FitResiduals(0.0, 0.0, 0.0)
    bank_kappas: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        validate_args(
            function_name="MetaParams",
            args={"kappa_ref": self.kappa_ref, "na_ref": self.na_ref, "eta": self.eta},
            constraints={
                "kappa_ref": {"type": REAL_TYPES, "finite": True, "min": 1},
                "na_ref": {"type": INT_TYPES, "min": 2, "even": True},
                "eta": {"type": REAL_TYPES, "min_exclusive": 0, "max_exclusive": 1},
            },
        )
        for name in ("c_ampl", "c_sh_pos", "c_sh_neg"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1 or arr.size == 0:
                raise ValidationError(f"MetaParams() {name} must be a non-empty vector, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"MetaParams() {name} must be finite")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.c_sh_pos.size != self.c_sh_neg.size:
            raise ValidationError(
                f"MetaParams() envelope series differ in length: {self.c_sh_pos.size} vs {self.c_sh_neg.size}"
            )
        object.__setattr__(self, "na_ref", int(self.na_ref))
        object.__setattr__(self, "fit_residuals", FitResiduals(*map(float, self.fit_residuals)))
        object.__setattr__(self, "bank_kappas", tuple(float(k) for k in self.bank_kappas))

    @property
    def n_ampl(self) -> int:
        return int(self.c_ampl.size)

    @property
    def n_sh(self) -> int:
        return int(self.c_sh_pos.size)

    @property
    def min_kappa(self) -> float:
        """Smallest kappa the model was fitted on."""
        return min(self.bank_kappas) if self.bank_kappas else self.kappa_ref

    def amplitude(self, kappa: float) -> float:
        """Theta_max(kappa) = sum_l c_ampl[l] kappa^-l, summed in index order."""
        total = 0.0
        for l, c in enumerate(self.c_ampl):
            total += float(c) * kappa ** (-l)
        return total


def extract_theta_max(angles: AngleSet) -> float:
    """max_j |theta_j|."""
    theta = angles.to(Convention.THETA).values
    if theta.size == 0:
        raise ValidationError("extract_theta_max() angle set is empty")
    return float(np.max(np.abs(theta)))


def fit_amplitude_series(
    kappas: ArrayLike,
    theta_max: ArrayLike,
    n_ampl: int = DEFAULT_N_AMPL,
) -> tuple[Vec, float]:
    """
    Least-squares fit of theta_max(kappa) in the basis kappa^-l, l < n_ampl.

    The design matrix is built in t = kappa_min / kappa, which keeps its
    columns of comparable size; c_l = b_l kappa_min^l maps back. Returns the
    coefficients and the largest absolute deviation at the data points.
    """
    validate_args(
        function_name="fit_amplitude",
        args={"n_ampl": n_ampl},
        constraints={"n_ampl": {"type": INT_TYPES, "min": 1}},
        cli_names={"n_ampl": "--n-ampl"},
    )
    k = np.asarray(kappas, dtype=np.float64)
    y = np.asarray(theta_max, dtype=np.float64)
    if k.ndim != 1 or k.shape != y.shape:
        raise ValidationError(f"fit_amplitude() kappas {k.shape} and theta_max {y.shape} must be matching vectors")
    if k.size < n_ampl:
        raise RankDeficientError(
            f"fit_amplitude() {k.size} reference sets cannot determine {n_ampl} coefficients",
            cli_msg=f"{k.size} reference files are fewer than --n-ampl {n_ampl}",
        )
    if np.any(k <= 0.0) or not np.all(np.isfinite(k)) or not np.all(np.isfinite(y)):
        raise ValidationError("fit_amplitude() kappas must be positive and all data finite")

    k_min = float(np.min(k))
    design = np.vander(k_min / k, int(n_ampl), increasing=True)
    b, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < n_ampl:
        raise RankDeficientError(
            f"fit_amplitude() design matrix has rank {rank} < {n_ampl}; kappa values are too few or repeated",
            cli_msg=f"reference kappas support at most {rank} amplitude coefficients (--n-ampl {n_ampl})",
        )
    coeffs = b * k_min ** np.arange(int(n_ampl))
    residual = float(np.max(np.abs(design @ b - y)))
    return coeffs, residual


def fit_amplitude(
    bank: ReferenceBank,
    n_ampl: int = DEFAULT_N_AMPL,
) -> tuple[Vec, float]:
    """Fit Theta_max(kappa) to the theta_max of every set in the bank."""
    theta_max = [extract_theta_max(a) for a in bank.entries]
    return fit_amplitude_series(bank.kappas, theta_max, n_ampl)


def envelope_counts(n_a: int) -> tuple[int, int]:
    """(N_pos, N_neg) = (floor(N_a/4), N_a/2 - floor(N_a/4))."""
    validate_args(
        function_name="envelope_counts",
        args={"n_a": n_a},
        constraints={"n_a": {"type": INT_TYPES, "min": 2, "even": True}},
    )
    n_pos = int(n_a) // 4
    return n_pos, int(n_a) // 2 - n_pos


def _positive_mask(n_a: int) -> NDArray[np.bool_]:
    j = np.arange(n_a // 2)
    return (n_a // 2 - 1 - j) % 2 == 1


def _check_sign_pattern(normalized_half: Vec) -> None:
    bad: list[int] = []
    center = normalized_half.size - 1
    if normalized_half[center] > 0.0:
        bad.append(center)
    significant = np.abs(normalized_half) > SIGN_CHECK_FLOOR
    for j in range(center):
        if significant[j] and significant[j + 1] and normalized_half[j] * normalized_half[j + 1] > 0.0:
            bad.append(j)
    if bad:
        shown = ", ".join(str(i) for i in bad[:10])
        raise SignPatternError(
            f"split_envelope() theta does not alternate in sign at indices {shown}"
            + (" ..." if len(bad) > 10 else ""),
            indices=bad,
            cli_msg=f"reference angles break the alternating sign pattern at indices {shown}",
        )


def split_envelope(angles: AngleSet) -> tuple[Vec, Vec]:
    """
    Normalized first-half theta split into (positive, negative) subsequences,
    each in increasing index order.

    Raises SignPatternError when adjacent angles share a sign or the
    center value is positive.
    """
    theta = angles.to(Convention.THETA).values
    theta_max = float(np.max(np.abs(theta)))
    if theta_max == 0.0:
        raise ValidationError("split_envelope() theta is identically zero; nothing to normalize")
    half = theta[: theta.size // 2] / theta_max
    _check_sign_pattern(half)
    mask = _positive_mask(theta.size)
    return half[mask].copy(), half[~mask].copy()


def merge_envelope(
    pos: ArrayLike,
    neg: ArrayLike,
    n_a: int,
) -> Vec:
    """Interleave the two envelopes into the first half and mirror it; inverse of split_envelope."""
    n_pos, n_neg = envelope_counts(n_a)
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    if pos.shape != (n_pos,) or neg.shape != (n_neg,):
        raise ValidationError(
            f"merge_envelope() N_a={n_a} needs {n_pos} positive and {n_neg} negative values, "
            f"got {pos.shape} and {neg.shape}"
        )
    half = np.empty(int(n_a) // 2)
    mask = _positive_mask(int(n_a))
    half[mask] = pos
    half[~mask] = neg
    return np.concatenate((half, half[::-1]))


def fit_envelope(
    normalized_values: ArrayLike,
    n_sh: int = DEFAULT_N_SH,
) -> tuple[Vec, float]:
    """
    Least-squares fit of G(r_j), r_j = j / (M - 1), in the basis cos(2 l arccos r).

    Solved by lstsq (SVD) on the design matrix. Returns the coefficients and
    the largest absolute deviation at the data points.
    """
    validate_args(
        function_name="fit_envelope",
        args={"n_sh": n_sh},
        constraints={"n_sh": {"type": INT_TYPES, "min": 1}},
        cli_names={"n_sh": "--n-sh"},
    )
    g = np.asarray(normalized_values, dtype=np.float64)
    if g.ndim != 1 or g.size < 2:
        raise EstimationRangeError(
            f"fit_envelope() needs at least 2 envelope values, got shape {g.shape}"
        )
    if g.size < n_sh:
        raise RankDeficientError(
            f"fit_envelope() {g.size} envelope values cannot determine {n_sh} coefficients",
            cli_msg=f"the envelope reference has only {g.size} values per envelope (--n-sh {n_sh})",
        )
    r = np.arange(g.size) / (g.size - 1)
    design = even_cosine_basis(r, int(n_sh))
    coeffs, _, rank, _ = np.linalg.lstsq(design, g, rcond=None)
    if rank < n_sh:
        raise RankDeficientError(f"fit_envelope() design matrix has rank {rank} < {n_sh}")
    residual = float(np.max(np.abs(design @ coeffs - g)))
    return coeffs, residual


def build_meta(
    bank: ReferenceBank,
    envelope_ref_kappa: float | None = None,
    n_ampl: int = DEFAULT_N_AMPL,
    n_sh: int = DEFAULT_N_SH,
) -> MetaParams:
    """
    Amplitude fit over the whole bank, envelope fits on the one set at
    envelope_ref_kappa (default: the largest kappa in the bank).
    """
    if envelope_ref_kappa is None:
        envelope_ref_kappa = float(bank.kappas[-1])
    reference = bank.find(envelope_ref_kappa)

    n_pos, _ = envelope_counts(reference.n_a)
    if n_pos < 2:
        raise EstimationRangeError(
            f"build_meta() reference at kappa={reference.kappa_qsvt!r} has N_a={reference.n_a}; "
            "each envelope needs at least 2 points (N_a >= 8)",
            cli_msg=f"the envelope reference has N_a={reference.n_a}; at least 8 angles are needed",
        )

    c_ampl, ampl_residual = fit_amplitude(bank, n_ampl)
    pos, neg = split_envelope(reference)
    c_pos, pos_residual = fit_envelope(pos, n_sh)
    c_neg, neg_residual = fit_envelope(neg, n_sh)

    same_sign = np.flatnonzero(c_pos * c_neg > 0.0)
    if same_sign.size:
        logger.warning(
            "build_meta: envelope coefficients share a sign at l=%s",
            same_sign.tolist(),
        )
    logger.info(
        "build_meta: kappa_ref=%g N_a,ref=%d residuals ampl=%.3e pos=%.3e neg=%.3e",
        reference.kappa_qsvt,
        reference.n_a,
        ampl_residual,
        pos_residual,
        neg_residual,
    )
    return MetaParams(
        kappa_ref=float(reference.kappa_qsvt),
        na_ref=reference.n_a,
        eta=bank.eta,
        c_ampl=c_ampl,
        c_sh_pos=c_pos,
        c_sh_neg=c_neg,
        fit_residuals=FitResiduals(ampl_residual, pos_residual, neg_residual),
        bank_kappas=tuple(bank.kappas.tolist()),
    )

#!/usr/bin/env python3
# tab-width:4

"""
Shared validation exceptions and the constraint-table argument checker.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any

import numpy as np

__all__ = [
    "Constraint",
    "REAL_TYPES",
    "INT_TYPES",
    "ValidationError",
    "DegreeCapError",
    "SignPatternError",
    "RankDeficientError",
    "EstimationRangeError",
    "KappaRangeError",
    "SchemaError",
    "validate_args",
]

Constraint = dict[str, Any]

REAL_TYPES = (int, float, np.integer, np.floating)
INT_TYPES = (int, np.integer)


class ValidationError(ValueError):
    """
    Validation error that can carry both Python API and CLI-friendly messages.

    When raised from library functions, can include a CLI-specific message
    that references flag names instead of parameter names.
    """

    def __init__(
        self,
        msg: str,
        cli_msg: str | None = None,
    ):
        super().__init__(msg)
        self.cli_msg = cli_msg


class DegreeCapError(ValidationError):
    """The requested accuracy needs more angles than the configured cap."""


class SignPatternError(ValidationError):
    """Adjacent shifted angles share a sign away from the central pair."""

    def __init__(
        self,
        msg: str,
        indices: Sequence[int],
        cli_msg: str | None = None,
    ):
        super().__init__(msg, cli_msg=cli_msg)
        self.indices = tuple(indices)


class RankDeficientError(ValidationError):
    """Least-squares design matrix does not have full column rank."""


class EstimationRangeError(ValidationError):
    """Metaparameters are used outside the range they can describe."""


class KappaRangeError(ValidationError):
    """kappa_qsvt is below s_min^-1 of the matrix being inverted."""


class SchemaError(ValidationError):
    """File has an unknown format tag or schema version."""


def _describe(rule: str, bound: Any) -> str:
    return {
        "min": f">= {bound}",
        "max": f"<= {bound}",
        "min_exclusive": f"> {bound}",
        "max_exclusive": f"< {bound}",
    }[rule]


def validate_args(
    *,
    function_name: str,
    args: dict,
    constraints: dict[str, Constraint],
    cli_names: dict[str, str] | None = None,
) -> None:
    """
    Check `args` against a per-parameter constraint table.

    Supported rules: `type`, `integer`, `finite`, `even`, `min`, `max`,
    `min_exclusive`, `max_exclusive`, `optional`. A parameter marked
    `optional` may be None, in which case the other rules are skipped.

    Raises:
        TypeError: wrong argument type
        ValidationError: any numeric rule is violated; `cli_msg` uses the
            flag names from `cli_names` when the parameter has one
    """
    cli_names = cli_names or {}

    for param, rules in constraints.items():
        val = args.get(param)
        flag = cli_names.get(param)

        def fail(requirement: str) -> None:
            msg = f"{function_name}() {param} must be {requirement}, got {val!r}"
            cli_msg = f"{flag} must be {requirement}, got {val!r}" if flag else None
            raise ValidationError(msg, cli_msg=cli_msg)

        if val is None and rules.get("optional"):
            continue

        # bool is an int subclass; never accept it for numeric parameters
        if isinstance(val, bool) and rules.get("type") not in (bool, None):
            raise TypeError(
                f"{function_name}() {param} must be of type {rules['type']}, got bool"
            )

        if "type" in rules and not isinstance(val, rules["type"]):
            raise TypeError(
                f"{function_name}() {param} must be of type {rules['type']}, got {type(val).__name__}"
            )

        if rules.get("finite") and not math.isfinite(val):
            fail("finite")

        if rules.get("integer") and int(val) != val:
            fail("an integer")

        if rules.get("even") and int(val) % 2 != 0:
            fail("even")

        for rule in ("min", "max", "min_exclusive", "max_exclusive"):
            if rule not in rules:
                continue
            bound = rules[rule]
            ok = {
                "min": lambda v, b: v >= b,
                "max": lambda v, b: v <= b,
                "min_exclusive": lambda v, b: v > b,
                "max_exclusive": lambda v, b: v < b,
            }[rule](val, bound)
            if not ok:
                fail(_describe(rule, bound))

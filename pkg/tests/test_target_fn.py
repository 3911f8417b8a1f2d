#!/usr/bin/env python3
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsvtangles import KappaRangeError
from qsvtangles import TargetSpec
from qsvtangles import ValidationError
from qsvtangles import eval_inverse_approx
from qsvtangles import eval_normalized_target
from qsvtangles import min_valid_kappa
from qsvtangles.target_fn import INVERSE_APPROX_PEAK
from qsvtangles.target_fn import require_valid_kappa
from qsvtangles.target_fn import validity_grid


def test_value_at_one_is_exactly_one():
    assert eval_inverse_approx(1.0, 10.0) == 1.0


def test_zero_maps_to_zero():
    assert eval_inverse_approx(0.0, 10.0) == 0.0
    assert eval_inverse_approx(0.0, 1234.5) == 0.0


def test_scalar_oracle():
    expected = 10.0 * (1.0 - math.exp(-25.0))
    assert eval_inverse_approx(0.1, 10.0) == pytest.approx(expected, rel=1e-14)
    assert eval_inverse_approx(0.1, 10.0) == pytest.approx(9.999999999861, rel=1e-12)


def test_scalar_in_scalar_out_array_in_array_out():
    assert isinstance(eval_inverse_approx(0.5, 3.0), float)
    out = eval_inverse_approx(np.array([0.1, 0.5]), 3.0)
    assert isinstance(out, np.ndarray)
    assert out.shape == (2,)


def test_taylor_branch_matches_direct_form_at_threshold():
    kappa = 50.0
    s = 1.0e-3 / kappa
    below = eval_inverse_approx(np.nextafter(s, 0.0), kappa)
    above = eval_inverse_approx(s, kappa)
    assert below == pytest.approx(above, rel=1e-9)


def test_odd_bit_exact():
    s = np.linspace(0.0, 1.0, 10001)
    for kappa in (1.0, 10.0, 650.0, 1.0e5):
        assert np.array_equal(eval_inverse_approx(-s, kappa), -eval_inverse_approx(s, kappa))


@given(
    s=st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
    kappa=st.floats(min_value=1.0, max_value=1.0e6, allow_nan=False),
)
def test_odd_property(s, kappa):
    assert eval_inverse_approx(-s, kappa) == -eval_inverse_approx(s, kappa)


@pytest.mark.parametrize("kappa", [10.0, 100.0, 650.0, 1.0e4])
def test_approximates_inverse_on_validity_interval(kappa):
    s = np.linspace(1.0 / kappa, 1.0, 20001)
    rel = np.abs(eval_inverse_approx(s, kappa) * s - 1.0)
    # the worst point is the interval edge, where the deficit is exp(-25)
    assert np.max(rel) <= math.exp(-25.0) * (1.0 + 1e-6) + 1e-15
    inner = s >= 1.1 / kappa
    assert np.max(rel[inner]) <= 1e-12


@pytest.mark.parametrize("kappa", [1.0, 10.0, 650.0])
def test_bounded_by_peak(kappa):
    s = np.linspace(-1.0, 1.0, 400001)
    assert np.max(np.abs(eval_inverse_approx(s, kappa))) <= INVERSE_APPROX_PEAK * kappa


def test_normalized_target_examples():
    spec = TargetSpec(10.0)
    assert eval_normalized_target(0.1, spec) == pytest.approx(0.125 * (1.0 - math.exp(-25.0)), rel=1e-14)
    assert eval_normalized_target(0.1, spec) == pytest.approx(0.125 - 1.7e-12, abs=1e-13)
    assert eval_normalized_target(1.0, TargetSpec(650.0)) == pytest.approx(1.923077e-4, rel=1e-6)
    assert eval_normalized_target(-0.3, spec) == -eval_normalized_target(0.3, spec)


def test_normalized_target_bounded_by_eta_on_validity_interval():
    spec = TargetSpec(100.0, 0.2)
    s = validity_grid(100.0, 5001)
    assert np.max(np.abs(eval_normalized_target(s, spec))) <= 0.2


def test_target_spec_defaults():
    spec = TargetSpec(10.0)
    assert spec.eta_qsvt == 0.125


@pytest.mark.parametrize(
    "kappa,eta",
    [
        (0.5, 0.125),
        (math.inf, 0.125),
        (10.0, 0.0),
        (10.0, 1.0),
        (10.0, 0.5),
    ],
)
def test_target_spec_rejects(kappa, eta):
    with pytest.raises(ValidationError):
        TargetSpec(kappa, eta)


def test_target_spec_rejects_bool():
    with pytest.raises(TypeError):
        TargetSpec(True)


def test_target_spec_cli_message_names_flag():
    with pytest.raises(ValidationError) as excinfo:
        TargetSpec(10.0, 0.5)
    assert "--eta" in excinfo.value.cli_msg


def test_validity_grid():
    grid = validity_grid(4.0, 5)
    assert grid[0] == 0.25
    assert grid[-1] == 1.0
    assert grid.size == 5


@pytest.mark.parametrize(
    "norm,rho,expected",
    [
        (1.0, 100.0, 100.0),
        (0.2, 801.0, 4005.0),
        (0.5, 10.0, 20.0),
    ],
)
def test_min_valid_kappa(norm, rho, expected):
    assert min_valid_kappa(norm, rho) == pytest.approx(expected, rel=1e-15)


def test_min_valid_kappa_rejects_norm_above_one():
    with pytest.raises(ValidationError, match="block-encoding"):
        min_valid_kappa(1.5, 10.0)


def test_min_valid_kappa_rejects_bad_rho():
    with pytest.raises(ValidationError):
        min_valid_kappa(0.5, 0.5)


def test_require_valid_kappa():
    require_valid_kappa(kappa_qsvt=20.0, matrix_norm=0.5, rho_A=10.0)
    with pytest.raises(KappaRangeError):
        require_valid_kappa(kappa_qsvt=19.0, matrix_norm=0.5, rho_A=10.0)

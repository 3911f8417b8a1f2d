#!/usr/bin/env python3
from __future__ import annotations

from functools import partial

import numpy as np
import pytest

from qsvtangles import ChebSeries
from qsvtangles import DegreeCapError
from qsvtangles import Parity
from qsvtangles import TargetSpec
from qsvtangles import ValidationError
from qsvtangles import choose_degree
from qsvtangles import compute_coeffs
from qsvtangles import eval_normalized_target
from qsvtangles import eval_series
from qsvtangles.cheb import even_cosine_basis
from qsvtangles.cheb import eval_even_series


def naive_sum(coeffs, s):
    k = np.arange(len(coeffs))
    return np.cos(np.outer(np.arccos(s), k)) @ coeffs


@pytest.mark.parametrize("method", ["direct", "fft"])
def test_identity_function(method):
    series = compute_coeffs(lambda s: s, 5, 64, method=method)
    assert series.parity is Parity.ODD
    assert series.coeffs[1] == pytest.approx(1.0, abs=1e-14)
    others = np.delete(series.coeffs, 1)
    assert np.max(np.abs(others)) <= 1e-14


@pytest.mark.parametrize("method", ["direct", "fft"])
def test_third_chebyshev_polynomial(method):
    series = compute_coeffs(lambda s: 4 * s**3 - 3 * s, 5, 64, method=method)
    assert series.coeffs[3] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(np.delete(series.coeffs, 3))) <= 1e-14


def test_even_function_detected():
    series = compute_coeffs(lambda s: 2 * s**2 - 1, 4, 16)
    assert series.parity is Parity.EVEN
    assert series.coeffs[2] == pytest.approx(1.0, abs=1e-14)
    assert np.all(series.coeffs[1::2] == 0.0)


def test_odd_target_even_coefficients_are_exact_zeros():
    spec = TargetSpec(10.0)
    series = compute_coeffs(partial(eval_normalized_target, spec=spec), 99, 128)
    assert series.parity is Parity.ODD
    assert np.all(series.coeffs[0::2] == 0.0)


def test_normalized_target_reconstruction():
    # the Gaussian cutoff needs roughly 50 kappa terms for 1e-12
    spec = TargetSpec(10.0, 0.125)
    series = compute_coeffs(partial(eval_normalized_target, spec=spec), 799, 1024)
    s = np.linspace(-1.0, 1.0, 2001)
    err = np.abs(eval_series(series, s) - eval_normalized_target(s, spec))
    assert np.max(err) <= 1e-12


def test_direct_and_fft_agree():
    spec = TargetSpec(20.0)
    f = partial(eval_normalized_target, spec=spec)
    direct = compute_coeffs(f, 300, 512, method="direct")
    fast = compute_coeffs(f, 300, 512, method="fft")
    assert np.max(np.abs(direct.coeffs - fast.coeffs)) <= 1e-13


def test_reconstruction_is_idempotent():
    rng = np.random.default_rng(7)
    original = ChebSeries(degree_nc=19, coeffs=rng.uniform(-1, 1, 20))
    again = compute_coeffs(lambda s: eval_series(original, s), 19, 32, parity=Parity.NONE)
    assert np.max(np.abs(again.coeffs - original.coeffs)) <= 1e-12


def test_scalar_returning_callable_is_sampled_pointwise():
    series = compute_coeffs(lambda s: 0.5, 3, 8)
    assert series.parity is Parity.EVEN
    assert series.coeffs[0] == pytest.approx(0.5, abs=1e-15)
    assert np.max(np.abs(series.coeffs[1:])) <= 1e-15


def test_rejects_nq_below_nc():
    with pytest.raises(ValidationError, match="quadrature_nq"):
        compute_coeffs(lambda s: s, 10, 5)


def test_rejects_non_finite_samples():
    with pytest.raises(ValidationError, match="not finite"):
        compute_coeffs(lambda s: np.where(s > 0.5, np.nan, s), 5, 8)


def test_rejects_unknown_method():
    with pytest.raises(ValidationError):
        compute_coeffs(lambda s: s, 5, 8, method="remez")


def test_constant_series():
    series = ChebSeries(degree_nc=0, coeffs=np.array([1.0]))
    assert eval_series(series, 0.3) == 1.0
    assert eval_series(series, -1.0) == 1.0


def test_t3_at_half():
    series = ChebSeries(degree_nc=3, coeffs=np.array([0.0, 0.0, 0.0, 1.0]))
    assert eval_series(series, 0.5) == pytest.approx(-1.0, abs=1e-15)


def test_clenshaw_matches_naive_sum():
    rng = np.random.default_rng(11)
    coeffs = rng.uniform(-1, 1, 50)
    s = rng.uniform(-1, 1, 100)
    series = ChebSeries(degree_nc=49, coeffs=coeffs)
    assert np.max(np.abs(eval_series(series, s) - naive_sum(coeffs, s))) <= 1e-12


def test_series_shape_and_parity_checks():
    with pytest.raises(ValidationError):
        ChebSeries(degree_nc=3, coeffs=np.zeros(3))
    with pytest.raises(ValidationError, match="off-parity"):
        ChebSeries(degree_nc=2, coeffs=np.array([1.0e-3, 1.0, 0.0]), parity=Parity.ODD)
    series = ChebSeries(degree_nc=2, coeffs=np.array([1.0e-12, 1.0, 0.0]), parity=Parity.ODD)
    assert series.coeffs[0] == 0.0
    assert series.n_a == 3


def test_series_coefficients_are_read_only():
    series = ChebSeries(degree_nc=1, coeffs=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        series.coeffs[0] = 2.0


def tail_sums(kappa, size):
    spec = TargetSpec(kappa)
    series = compute_coeffs(partial(eval_normalized_target, spec=spec), size - 1, size, method="fft", parity=Parity.ODD)
    return np.cumsum(np.abs(series.coeffs)[::-1])[::-1]


def test_choose_degree_meets_tail_criterion_minimally():
    n_a = choose_degree(10.0, 1e-7)
    assert n_a % 2 == 0
    tail = tail_sums(10.0, 4096)
    assert tail[n_a] <= 1e-7
    assert tail[n_a - 2] > 1e-7


def test_choose_degree_monotone_in_kappa():
    previous = 0
    for kappa in (5.0, 10.0, 20.0, 40.0, 80.0):
        n_a = choose_degree(kappa, 1e-7)
        assert n_a >= previous
        previous = n_a


def test_choose_degree_monotone_in_accuracy():
    assert choose_degree(30.0, 1e-10) >= choose_degree(30.0, 1e-7) >= choose_degree(30.0, 1e-4)


def test_choose_degree_scales_near_linearly():
    ratio = choose_degree(650.0, 1e-7) / choose_degree(65.0, 1e-7)
    assert 8.0 <= ratio <= 12.0


def test_choose_degree_cap():
    with pytest.raises(DegreeCapError):
        choose_degree(650.0, 1e-7, cap=100)


def test_choose_degree_rejects_bad_eps():
    with pytest.raises(ValidationError) as excinfo:
        choose_degree(10.0, 0.0)
    assert excinfo.value.cli_msg.startswith("--eps")


def test_even_cosine_basis_matches_definition():
    r = np.linspace(0.0, 1.0, 101)
    basis = even_cosine_basis(r, 8)
    expected = np.cos(2 * np.outer(np.arccos(r), np.arange(8)))
    assert np.max(np.abs(basis - expected)) <= 1e-12


def test_even_series_is_exactly_even():
    r = np.linspace(0.0, 1.0, 257)
    coeffs = np.arange(1.0, 6.0)
    assert np.array_equal(eval_even_series(r, coeffs), eval_even_series(-r, coeffs))

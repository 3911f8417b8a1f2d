#!/usr/bin/env python3
from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from synthetic import amplitude
from synthetic import envelope_angle_set
from synthetic import synthetic_bank_sets

from qsvtangles import Convention
from qsvtangles import DegreeCapError
from qsvtangles import EstimateRequest
from qsvtangles import EstimationRangeError
from qsvtangles import MetaParams
from qsvtangles import Origin
from qsvtangles import ReferenceBank
from qsvtangles import ValidationError
from qsvtangles import build_envelope_values
from qsvtangles import build_meta
from qsvtangles import estimate_angles
from qsvtangles import estimate_na
from qsvtangles import eval_normalized_target
from qsvtangles import eval_poly
from qsvtangles import split_envelope
from qsvtangles.angle_estimator import pinned_endpoint_shift
from qsvtangles.target_fn import TargetSpec


@pytest.fixture(scope="module")
def synthetic_meta():
    bank = ReferenceBank.from_angle_sets(synthetic_bank_sets([10, 20, 40, 80]))
    return build_meta(bank, n_ampl=2, n_sh=3)


def bare_meta(**overrides):
    fields = {
        "kappa_ref": 100.0,
        "na_ref": 8,
        "eta": 0.125,
        "c_ampl": np.array([0.01, 2.0]),
        "c_sh_pos": np.array([0.3, 0.2]),
        "c_sh_neg": np.array([-0.55, -0.45]),
        "bank_kappas": (1.0, 100.0),
    }
    fields.update(overrides)
    return MetaParams(**fields)


@pytest.mark.parametrize(
    "kappa0,expected",
    [(80.0, 640), (100.0, 800), (81.0, 648), (80.1, 640), (80.2, 642), (1.0e4, 80000)],
)
def test_estimate_na(synthetic_meta, kappa0, expected):
    assert estimate_na(kappa0, synthetic_meta) == expected


def test_estimate_na_is_even_and_monotone(synthetic_meta):
    previous = 0
    for kappa0 in np.linspace(80.0, 90.0, 101):
        n_a = estimate_na(float(kappa0), synthetic_meta)
        assert n_a % 2 == 0
        assert n_a >= previous
        previous = n_a


def test_estimate_na_cap(synthetic_meta):
    with pytest.raises(DegreeCapError):
        estimate_na(1.0e6, synthetic_meta, cap=1000)


def test_estimate_na_rejects_zero(synthetic_meta):
    with pytest.raises(ValidationError):
        estimate_na(0.0, synthetic_meta)


def test_build_envelope_values():
    values = build_envelope_values(5, [0.3, 0.2])
    assert values == pytest.approx([0.1, 0.125, 0.2, 0.325, 0.5], abs=1e-15)


def test_build_envelope_values_two_points():
    assert build_envelope_values(2, [1.0, 1.0]).tolist() == pytest.approx([0.0, 2.0], abs=1e-15)


def test_build_envelope_values_rejects_single_point():
    with pytest.raises(ValidationError):
        build_envelope_values(1, [1.0])


def test_estimate_at_reference_reproduces_reference(synthetic_meta):
    estimated = estimate_angles(EstimateRequest(80.0, synthetic_meta, pin_endpoint=False))
    expected = envelope_angle_set(80.0, 640).values
    got = estimated.to(Convention.THETA).values
    assert np.max(np.abs(got - expected)) <= 1e-12


def test_estimate_invariants(synthetic_meta):
    estimated = estimate_angles(EstimateRequest(200.0, synthetic_meta, pin_endpoint=False))
    assert estimated.convention is Convention.PHI
    assert estimated.origin is Origin.ESTIMATED
    assert estimated.kappa_qsvt == 200.0
    assert estimated.eta == 0.125
    assert estimated.n_a == 1600
    assert np.array_equal(estimated.values, estimated.values[::-1])
    theta = estimated.to(Convention.THETA).values
    assert np.max(np.abs(theta)) == pytest.approx(amplitude(200.0), rel=1e-12)
    assert theta[theta.size // 2 - 1] < 0.0
    split_envelope(estimated)


def test_estimate_is_deterministic(synthetic_meta):
    first = estimate_angles(EstimateRequest(500.0, synthetic_meta))
    second = estimate_angles(EstimateRequest(500.0, synthetic_meta))
    assert np.array_equal(first.values, second.values)


def test_non_positive_amplitude():
    meta = bare_meta(c_ampl=np.array([-1.0]))
    with pytest.raises(EstimationRangeError):
        estimate_angles(EstimateRequest(200.0, meta))


def test_request_below_bank_range(synthetic_meta):
    with pytest.raises(EstimationRangeError) as excinfo:
        EstimateRequest(5.0, synthetic_meta)
    assert "--kappa0" in excinfo.value.cli_msg


def test_request_below_reference_warns(synthetic_meta, caplog):
    with caplog.at_level(logging.WARNING, logger="qsvtangles.angle_estimator"):
        EstimateRequest(40.0, synthetic_meta)
    assert any("below kappa_ref" in rec.getMessage() for rec in caplog.records)


def test_request_rejects_bad_kappa0(synthetic_meta):
    with pytest.raises(ValidationError):
        EstimateRequest(0.5, synthetic_meta)
    with pytest.raises(TypeError):
        EstimateRequest("100", synthetic_meta)


def test_too_few_angles_for_envelopes():
    # N_a = floor(8 * 50 / 100) = 4 leaves one positive point
    with pytest.raises(EstimationRangeError):
        estimate_angles(EstimateRequest(50.0, bare_meta()))


def test_estimate_with_bare_meta():
    estimated = estimate_angles(EstimateRequest(300.0, bare_meta(), pin_endpoint=False))
    assert estimated.n_a == 24
    theta = estimated.to(Convention.THETA).values
    assert np.max(np.abs(theta)) == pytest.approx(amplitude(300.0), rel=1e-12)


def test_pinned_estimate_hits_the_target_at_one(synthetic_meta):
    estimated = estimate_angles(EstimateRequest(200.0, synthetic_meta))
    target = eval_normalized_target(1.0, TargetSpec(200.0, 0.125))
    assert eval_poly(estimated, 1.0) == pytest.approx(target, abs=1e-12)


def test_unpinned_estimate_keeps_the_reference_sum(synthetic_meta):
    estimated = estimate_angles(EstimateRequest(200.0, synthetic_meta, pin_endpoint=False))
    target = eval_normalized_target(1.0, TargetSpec(200.0, 0.125))
    assert abs(eval_poly(estimated, 1.0) - target) > 1e-3


def test_pin_is_a_uniform_shift(synthetic_meta):
    plain = estimate_angles(EstimateRequest(500.0, synthetic_meta, pin_endpoint=False)).to(Convention.THETA)
    pinned = estimate_angles(EstimateRequest(500.0, synthetic_meta)).to(Convention.THETA)
    difference = pinned.values - plain.values
    assert np.ptp(difference) <= 1e-14
    assert difference[0] == pytest.approx(pinned_endpoint_shift(plain.values, 500.0, 0.125), abs=1e-14)
    assert np.array_equal(pinned.values, pinned.values[::-1])


def test_pinned_shift_is_zero_for_a_matching_sum():
    target = eval_normalized_target(1.0, TargetSpec(50.0, 0.125))
    theta = np.full(10, -math.asin(target) / 10)
    assert pinned_endpoint_shift(theta, 50.0, 0.125) == pytest.approx(0.0, abs=1e-18)

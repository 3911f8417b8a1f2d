#!/usr/bin/env python3
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest
from synthetic import synthetic_bank_sets

from qsvtangles import AngleSet
from qsvtangles import Convention
from qsvtangles import DiagonalSystem
from qsvtangles import MetaParams
from qsvtangles import Origin
from qsvtangles import ReferenceBank
from qsvtangles import SchemaError
from qsvtangles import SvdSystem
from qsvtangles import ValidationError
from qsvtangles import build_meta
from qsvtangles import build_test_matrix_F
from qsvtangles import build_test_matrix_sin
from qsvtangles import load_angles
from qsvtangles import load_meta
from qsvtangles import save_angles
from qsvtangles import save_meta
from qsvtangles.angle_io import format_csv
from qsvtangles.angle_io import load_bank
from qsvtangles.angle_io import load_system
from qsvtangles.angle_io import read_bare_angles
from qsvtangles.angle_io import save_system
from qsvtangles.angle_io import write_inversion_csv
from qsvtangles.angle_io import write_sweep_csv
from qsvtangles.verifier import InversionReport
from qsvtangles.verifier import sweep_error


def phi_set(seed=0, n_a=32, kappa=10.0, eps=None):
    rng = np.random.default_rng(seed)
    half = rng.uniform(-np.pi, np.pi, n_a // 2)
    return AngleSet(
        convention=Convention.PHI,
        values=np.concatenate([half, half[::-1]]),
        kappa_qsvt=kappa,
        eta=0.125,
        origin=Origin.SOLVED,
        eps_reported=eps,
    )


def rewrite(path: Path, **changes):
    doc = json.loads(path.read_text())
    doc.update(changes)
    path.write_text(json.dumps(doc))


def test_angles_round_trip_is_bit_identical(tmp_path):
    angles = phi_set(eps=3.2e-8)
    path = tmp_path / "angles.json"
    save_angles(angles, path)
    loaded = load_angles(path)
    assert np.array_equal(loaded.values, angles.values)
    assert loaded.convention is Convention.PHI
    assert loaded.kappa_qsvt == angles.kappa_qsvt
    assert loaded.eta == angles.eta
    assert loaded.origin is Origin.SOLVED
    assert loaded.eps_reported == 3.2e-8


def test_angles_are_stored_as_phi(tmp_path):
    theta = phi_set(1).to(Convention.THETA)
    path = tmp_path / "angles.json"
    save_angles(theta, path)
    doc = json.loads(path.read_text())
    assert doc["format"] == "qsvtangles.angles"
    assert doc["version"] == 1
    assert doc["convention"] == "phi"
    assert doc["n_a"] == 32
    assert doc["eps_reported"] is None


def test_load_in_requested_convention(tmp_path):
    angles = phi_set(2)
    path = tmp_path / "angles.json"
    save_angles(angles, path)
    loaded = load_angles(path, Convention.ALPHA)
    assert loaded.convention is Convention.ALPHA
    assert np.array_equal(loaded.values, angles.to(Convention.ALPHA).values)


def test_save_leaves_no_temporary_files(tmp_path):
    save_angles(phi_set(), tmp_path / "angles.json")
    save_angles(phi_set(3), tmp_path / "angles.json")
    assert [p.name for p in tmp_path.iterdir()] == ["angles.json"]


@pytest.mark.parametrize(
    "changes",
    [
        {"format": "qsvtangles.meta"},
        {"version": 2},
        {"n_a": 30},
        {"convention": "gamma"},
        {"kappa_qsvt": 0.5},
    ],
)
def test_load_angles_rejects(tmp_path, changes):
    path = tmp_path / "angles.json"
    save_angles(phi_set(), path)
    rewrite(path, **changes)
    with pytest.raises(SchemaError):
        load_angles(path)


def test_load_angles_rejects_asymmetric_values(tmp_path):
    path = tmp_path / "angles.json"
    save_angles(phi_set(), path)
    doc = json.loads(path.read_text())
    doc["values"][0] += 1.0
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="symmetric"):
        load_angles(path)


def test_load_angles_rejects_missing_field(tmp_path):
    path = tmp_path / "angles.json"
    save_angles(phi_set(), path)
    doc = json.loads(path.read_text())
    del doc["eta"]
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="eta"):
        load_angles(path)


def test_load_angles_rejects_garbage(tmp_path):
    path = tmp_path / "angles.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_angles(path)


def test_load_angles_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_angles(tmp_path / "absent.json")


def test_read_bare_angles_json(tmp_path):
    path = tmp_path / "bare.json"
    path.write_text("[0.1, 0.25, 0.25, 0.1]")
    assert read_bare_angles(path).tolist() == [0.1, 0.25, 0.25, 0.1]


def test_read_bare_angles_text(tmp_path):
    path = tmp_path / "bare.txt"
    path.write_text("0.1, 0.25\n0.25 0.1\n")
    assert read_bare_angles(path).tolist() == [0.1, 0.25, 0.25, 0.1]


def test_read_bare_angles_rejects(tmp_path):
    path = tmp_path / "bare.txt"
    path.write_text("0.1 abc\n")
    with pytest.raises(SchemaError):
        read_bare_angles(path)
    path.write_text('{"values": [1.0]}')
    with pytest.raises(SchemaError):
        read_bare_angles(path)


def test_load_bank_from_directory(tmp_path):
    for angles in synthetic_bank_sets([20, 10, 30]):
        save_angles(angles, tmp_path / f"ref_{angles.kappa_qsvt:g}.json")
    (tmp_path / "notes.json").write_text('{"comment": "not angles"}')
    (tmp_path / "broken.json").write_text("{")
    bank = load_bank([tmp_path])
    assert bank.kappas.tolist() == [10.0, 20.0, 30.0]


def test_load_bank_takes_kappa_from_metadata(tmp_path):
    angles = synthetic_bank_sets([10])[0]
    save_angles(angles, tmp_path / "kappa_99.json")
    assert load_bank([tmp_path / "kappa_99.json"]).kappas.tolist() == [10.0]


def test_load_bank_empty_directory(tmp_path):
    with pytest.raises(ValidationError) as excinfo:
        load_bank([tmp_path])
    assert excinfo.value.cli_msg == "no reference angle files found"


@pytest.fixture
def meta():
    bank = ReferenceBank.from_angle_sets(synthetic_bank_sets([10, 20, 40]))
    return build_meta(bank, n_ampl=2, n_sh=3)


def test_meta_round_trip(tmp_path, meta):
    path = tmp_path / "meta.json"
    save_meta(meta, path)
    loaded = load_meta(path)
    assert isinstance(loaded, MetaParams)
    for name in ("c_ampl", "c_sh_pos", "c_sh_neg"):
        assert np.array_equal(getattr(loaded, name), getattr(meta, name))
    assert (loaded.kappa_ref, loaded.na_ref, loaded.eta) == (meta.kappa_ref, meta.na_ref, meta.eta)
    assert loaded.fit_residuals == meta.fit_residuals
    assert loaded.bank_kappas == meta.bank_kappas


def test_meta_rejects_count_mismatch(tmp_path, meta):
    path = tmp_path / "meta.json"
    save_meta(meta, path)
    rewrite(path, n_sh=4)
    with pytest.raises(SchemaError, match="coefficient counts"):
        load_meta(path)


def test_meta_rejects_angle_file(tmp_path):
    path = tmp_path / "angles.json"
    save_angles(phi_set(), path)
    with pytest.raises(SchemaError) as excinfo:
        load_meta(path)
    assert "qsvtangles.meta" in excinfo.value.cli_msg


def test_diagonal_system_round_trip(tmp_path):
    system = build_test_matrix_F(10.0, 0.9, 3)
    path = tmp_path / "system.json"
    save_system(system, path)
    loaded = load_system(path)
    assert isinstance(loaded, DiagonalSystem)
    assert loaded.kind is system.kind
    assert np.array_equal(loaded.diagonal, system.diagonal)
    assert np.array_equal(loaded.abscissa, system.abscissa)
    assert (loaded.parameter, loaded.kappa) == (0.9, 10.0)
    assert loaded.rho_A == system.rho_A


def test_sine_system_round_trip(tmp_path):
    system = build_test_matrix_sin(3)
    path = tmp_path / "system.json"
    save_system(system, path)
    loaded = load_system(path)
    assert loaded.abscissa is None
    assert np.array_equal(loaded.diagonal, system.diagonal)


def test_svd_system_round_trip(tmp_path):
    c, s = np.cos(0.3), np.sin(0.3)
    rot = np.array([[c, -s], [s, c]])
    system = SvdSystem(left=rot, singular_values=np.array([0.5, 0.25]), right=rot.T)
    path = tmp_path / "system.json"
    save_system(system, path)
    loaded = load_system(path)
    assert isinstance(loaded, SvdSystem)
    assert np.array_equal(loaded.left, system.left)
    assert np.array_equal(loaded.right, system.right)


def test_load_system_rejects_bad_diagonal(tmp_path):
    path = tmp_path / "system.json"
    save_system(DiagonalSystem(diagonal=np.array([0.5, 0.25])), path)
    rewrite(path, diagonal=[0.5, 3.0])
    with pytest.raises(SchemaError, match="exceeds 1"):
        load_system(path)


def test_format_csv():
    assert format_csv(("a", "b"), [(1, 0.5)]) == "a,b\n1,0.5\n"


def test_sweep_csv(tmp_path):
    angles = AngleSet(
        convention=Convention.THETA,
        values=np.zeros(8),
        kappa_qsvt=4.0,
        eta=0.125,
        origin=Origin.LOADED,
    )
    path = tmp_path / "sweep.csv"
    write_sweep_csv(sweep_error(angles, 11), path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "p_value", "target", "error"]
    assert len(rows) == 12
    assert float(rows[1][0]) == 0.25
    assert float(rows[-1][0]) == 1.0


def test_inversion_csv(tmp_path):
    report = InversionReport(
        qsvt=np.array([1.0, 2.0]),
        exact=np.array([1.5, 2.0]),
        errors=np.array([-0.5, 0.0]),
        max_abs_err=0.5,
    )
    path = tmp_path / "invert.csv"
    write_inversion_csv(report, path)
    assert path.read_text() == "index,qsvt_value,exact_value,error\n0,1.0,1.5,-0.5\n1,2.0,2.0,0.0\n"


@pytest.mark.parametrize(
    "changes",
    [
        {"c_ampl": 3.5},
        {"c_sh_pos": None},
        {"c_sh_neg": {"l": 0}},
        {"c_ampl": ["a", "b"]},
    ],
)
def test_meta_rejects_malformed_coefficients(tmp_path, meta, changes):
    path = tmp_path / "meta.json"
    save_meta(meta, path)
    rewrite(path, **changes)
    with pytest.raises(SchemaError):
        load_meta(path)

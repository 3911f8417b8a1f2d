#!/usr/bin/env python3
# tab-width:4

"""
On-disk formats.

    angle files    JSON, phi convention, format "qsvtangles.angles"
    meta files     JSON, format "qsvtangles.meta"
    system files   JSON, format "qsvtangles.system" (diagonal or SVD triple)
    sweep/invert   CSV with a one-line header

Floats are written with repr(), the shortest string that reads back to
the same double, so load(save(x)) is bit-identical. Every write goes
through fileio.atomic_write_text.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .fileio import atomic_write_text
from .meta_fit import FitResiduals
from .meta_fit import MetaParams
from .meta_fit import ReferenceBank
from .qsp_eval import AngleSet
from .qsp_eval import Convention
from .qsp_eval import Origin
from .validation import SchemaError
from .validation import ValidationError
from .verifier import DiagonalSystem
from .verifier import ErrorSweep
from .verifier import InversionReport
from .verifier import SvdSystem
from .verifier import SystemKind

__all__ = [
    "SCHEMA_VERSION",
    "ANGLES_FORMAT",
    "META_FORMAT",
    "SYSTEM_FORMAT",
    "save_angles",
    "load_angles",
    "read_bare_angles",
    "load_bank",
    "save_meta",
    "load_meta",
    "save_system",
    "load_system",
    "write_sweep_csv",
    "write_inversion_csv",
    "format_csv",
]

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ANGLES_FORMAT = "qsvtangles.angles"
META_FORMAT = "qsvtangles.meta"
SYSTEM_FORMAT = "qsvtangles.system"

SWEEP_HEADER = ("s", "p_value", "target", "error")
INVERT_HEADER = ("index", "qsvt_value", "exact_value", "error")


def _floats(values: Iterable[Any]) -> list[float]:
    return [float(v) for v in values]


def _dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, allow_nan=False) + "\n"


def _read_document(
    path: Path,
    expected_format: str,
) -> dict[str, Any]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{path}: not valid JSON ({e})",
            cli_msg=f"{path} is not a valid {expected_format} file",
        ) from e
    if not isinstance(doc, dict) or doc.get("format") != expected_format:
        found = doc.get("format") if isinstance(doc, dict) else type(doc).__name__
        raise SchemaError(
            f"{path}: expected format {expected_format!r}, found {found!r}",
            cli_msg=f"{path} is not a {expected_format} file",
        )
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: unsupported {expected_format} schema version {version!r} (supported: {SCHEMA_VERSION})",
            cli_msg=f"{path} has schema version {version!r}; this build reads version {SCHEMA_VERSION}",
        )
    return doc


def _field(
    doc: dict[str, Any],
    key: str,
    path: Path,
) -> Any:
    try:
        return doc[key]
    except KeyError:
        raise SchemaError(f"{path}: missing field {key!r}") from None


def save_angles(
    angles: AngleSet,
    path: Path,
) -> None:
    """Write `angles` in the phi convention."""
    phi = angles.to(Convention.PHI)
    doc = {
        "format": ANGLES_FORMAT,
        "version": SCHEMA_VERSION,
        "convention": phi.convention.value,
        "kappa_qsvt": float(phi.kappa_qsvt),
        "eta": float(phi.eta),
        "eps_reported": None if phi.eps_reported is None else float(phi.eps_reported),
        "n_a": phi.n_a,
        "origin": phi.origin.value,
        "values": _floats(phi.values),
    }
    atomic_write_text(path=Path(path), text=_dumps(doc))


def _angles_from_document(
    doc: dict[str, Any],
    path: Path,
) -> AngleSet:
    values = _field(doc, "values", path)
    n_a = _field(doc, "n_a", path)
    if not isinstance(values, list) or n_a != len(values):
        raise SchemaError(f"{path}: n_a={n_a!r} does not match {len(values) if isinstance(values, list) else '?'} values")
    try:
        return AngleSet(
            convention=Convention(_field(doc, "convention", path)),
            values=np.array(_floats(values)),
            kappa_qsvt=float(_field(doc, "kappa_qsvt", path)),
            eta=float(_field(doc, "eta", path)),
            origin=Origin(_field(doc, "origin", path)),
            eps_reported=None if doc.get("eps_reported") is None else float(doc["eps_reported"]),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise SchemaError(f"{path}: {e}", cli_msg=f"{path}: {e}") from e
        raise SchemaError(f"{path}: malformed angle file ({e})") from e


def load_angles(
    path: Path,
    convention: Convention | str = Convention.PHI,
) -> AngleSet:
    path = Path(path)
    return _angles_from_document(_read_document(path, ANGLES_FORMAT), path).to(convention)


def read_bare_angles(path: Path) -> np.ndarray:
    """
    Angles from a JSON list or from plain text with one or more numbers per
    line separated by commas or whitespace.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        tokens = text.replace(",", " ").split()
        try:
            return np.array([float(t) for t in tokens], dtype=np.float64)
        except ValueError as e:
            raise SchemaError(f"{path}: not a list of numbers ({e})") from e
    if not isinstance(doc, list):
        raise SchemaError(f"{path}: expected a JSON list of angles, found {type(doc).__name__}")
    try:
        return np.array(_floats(doc), dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{path}: not a list of numbers ({e})") from e


def _expand_reference_paths(paths: Sequence[Path]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if not p.is_dir():
            files.append(p)
            continue
        for candidate in sorted(p.glob("*.json")):
            try:
                head = json.loads(candidate.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                logger.debug("load_bank: skipping %s (not JSON)", candidate)
                continue
            if isinstance(head, dict) and head.get("format") == ANGLES_FORMAT:
                files.append(candidate)
            else:
                logger.debug("load_bank: skipping %s (not an angle file)", candidate)
    return files


def load_bank(paths: Sequence[Path]) -> ReferenceBank:
    """
    Reference bank from angle files and/or directories of them.

    kappa is taken from each file's metadata, never from its name.
    """
    files = _expand_reference_paths(paths)
    if not files:
        raise ValidationError(
            f"load_bank() found no angle files in {[str(p) for p in paths]}",
            cli_msg="no reference angle files found",
        )
    return ReferenceBank.from_angle_sets(load_angles(f) for f in files)


def save_meta(
    meta: MetaParams,
    path: Path,
) -> None:
    doc = {
        "format": META_FORMAT,
        "version": SCHEMA_VERSION,
        "kappa_ref": float(meta.kappa_ref),
        "na_ref": int(meta.na_ref),
        "eta": float(meta.eta),
        "n_ampl": meta.n_ampl,
        "n_sh": meta.n_sh,
        "c_ampl": _floats(meta.c_ampl),
        "c_sh_pos": _floats(meta.c_sh_pos),
        "c_sh_neg": _floats(meta.c_sh_neg),
        "fit_residuals": meta.fit_residuals._asdict(),
        "bank_kappas": _floats(meta.bank_kappas),
    }
    atomic_write_text(path=Path(path), text=_dumps(doc))


def load_meta(path: Path) -> MetaParams:
    path = Path(path)
    doc = _read_document(path, META_FORMAT)
    c_ampl = _field(doc, "c_ampl", path)
    c_pos = _field(doc, "c_sh_pos", path)
    c_neg = _field(doc, "c_sh_neg", path)
    n_ampl = _field(doc, "n_ampl", path)
    n_sh = _field(doc, "n_sh", path)
    residuals = _field(doc, "fit_residuals", path)
    try:
        counts = (len(c_ampl), len(c_pos), len(c_neg))
    except TypeError as e:
        raise SchemaError(f"{path}: coefficient fields must be lists ({e})") from e
    if counts != (n_ampl, n_sh, n_sh):
        raise SchemaError(
            f"{path}: coefficient counts {counts} do not match n_ampl={n_ampl!r}, n_sh={n_sh!r}"
        )
    try:
        return MetaParams(
            kappa_ref=float(_field(doc, "kappa_ref", path)),
            na_ref=int(_field(doc, "na_ref", path)),
            eta=float(_field(doc, "eta", path)),
            c_ampl=np.array(_floats(c_ampl)),
            c_sh_pos=np.array(_floats(c_pos)),
            c_sh_neg=np.array(_floats(c_neg)),
            fit_residuals=FitResiduals(
                ampl=float(residuals["ampl"]),
                env_pos=float(residuals["env_pos"]),
                env_neg=float(residuals["env_neg"]),
            ),
            bank_kappas=tuple(_floats(doc.get("bank_kappas", []))),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"{path}: malformed meta file ({e})") from e


def save_system(
    system: DiagonalSystem | SvdSystem,
    path: Path,
) -> None:
    doc: dict[str, Any] = {"format": SYSTEM_FORMAT, "version": SCHEMA_VERSION}
    if isinstance(system, SvdSystem):
        doc |= {
            "kind": "svd",
            "left": system.left.tolist(),
            "singular_values": _floats(system.singular_values),
            "right": system.right.tolist(),
        }
    else:
        doc |= {
            "kind": system.kind.value,
            "diagonal": _floats(system.diagonal),
            "parameter": system.parameter,
            "kappa": system.kappa,
            "abscissa": None if system.abscissa is None else _floats(system.abscissa),
        }
    atomic_write_text(path=Path(path), text=_dumps(doc))


def load_system(path: Path) -> DiagonalSystem | SvdSystem:
    path = Path(path)
    doc = _read_document(path, SYSTEM_FORMAT)
    kind = _field(doc, "kind", path)
    try:
        if kind == "svd":
            return SvdSystem(
                left=np.array(_field(doc, "left", path), dtype=np.float64),
                singular_values=np.array(_floats(_field(doc, "singular_values", path))),
                right=np.array(_field(doc, "right", path), dtype=np.float64),
            )
        abscissa = doc.get("abscissa")
        return DiagonalSystem(
            diagonal=np.array(_floats(_field(doc, "diagonal", path))),
            kind=SystemKind(kind),
            parameter=None if doc.get("parameter") is None else float(doc["parameter"]),
            kappa=None if doc.get("kappa") is None else float(doc["kappa"]),
            abscissa=None if abscissa is None else np.array(_floats(abscissa)),
        )
    except ValidationError as e:
        raise SchemaError(f"{path}: {e}", cli_msg=f"{path}: {e.cli_msg or e}") from e
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{path}: malformed system file ({e})") from e


def format_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_sweep_csv(
    sweep: ErrorSweep,
    path: Path,
) -> None:
    rows = zip(
        _floats(sweep.s_values),
        _floats(sweep.p_values),
        _floats(sweep.target_values),
        _floats(sweep.errors),
    )
    atomic_write_text(path=Path(path), text=format_csv(SWEEP_HEADER, rows))


def write_inversion_csv(
    report: InversionReport,
    path: Path,
) -> None:
    rows = zip(
        range(report.qsvt.size),
        _floats(report.qsvt),
        _floats(report.exact),
        _floats(report.errors),
    )
    atomic_write_text(path=Path(path), text=format_csv(INVERT_HEADER, rows))

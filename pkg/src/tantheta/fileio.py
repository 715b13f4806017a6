"""Matrix Market input, canonical JSON reports and CSV sweep output."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.io

from .errors import ParseError, ReportIOError, SizeOverflowError
from .ensemble import CSV_HEADER

SCHEMA_VERSION = "1.0"
MAX_DIM = 4096

_FORMATS = {"array", "coordinate"}
_FIELDS = {"real", "complex", "integer"}
_SYMMETRIES = {"general", "hermitian", "symmetric"}


def _read_header(path: Path):
    try:
        with open(path, "r", encoding="ascii", errors="replace") as fh:
            banner = fh.readline()
            size_line = ""
            for line in fh:
                if line.strip() and not line.lstrip().startswith("%"):
                    size_line = line
                    break
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    tokens = banner.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise ParseError(f"{path}: bad Matrix Market banner {banner.strip()!r}")
    fmt, fld, sym = tokens[2:]
    if fmt not in _FORMATS or fld not in _FIELDS or sym not in _SYMMETRIES:
        raise ParseError(f"{path}: unsupported header {' '.join(tokens[2:])!r}")
    try:
        dims = [int(t) for t in size_line.split()]
    except ValueError as exc:
        raise ParseError(f"{path}: bad size line {size_line.strip()!r}") from exc
    if len(dims) != (2 if fmt == "array" else 3):
        raise ParseError(f"{path}: bad size line {size_line.strip()!r}")
    if max(dims[:2]) > MAX_DIM:
        raise SizeOverflowError(f"{path}: dimension {max(dims[:2])} exceeds {MAX_DIM}")
    return fmt, fld, sym


def read_matrix_market(path) -> np.ndarray:
    """Dense complex matrix from a Matrix Market file.

    Symmetric and Hermitian storage (lower triangle) is mirrored, with
    conjugation for Hermitian files.
    """
    path = Path(path)
    _read_header(path)
    try:
        m = scipy.io.mmread(str(path))
    except Exception as exc:  # scipy raises a grab-bag of types on bad bodies
        raise ParseError(f"{path}: {exc}") from exc
    if hasattr(m, "toarray"):
        m = m.toarray()
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ParseError(f"{path}: non-finite entries")
    return m


def write_matrix_market(path, m, comment: str = "") -> None:
    """Dense ``array`` file: ``real general`` for real input, ``complex general`` otherwise."""
    m = np.asarray(m)
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    scipy.io.mmwrite(str(path), m, comment=comment, symmetry="general", precision=17)


def content_digest(*arrays) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        arr = np.ascontiguousarray(np.asarray(arr, dtype=complex))
        h.update(str(arr.shape).encode())
        h.update(arr.tobytes())
    return "sha256:" + h.hexdigest()


@dataclass
class CertificateReport:
    kind: str
    inputs: dict
    certificate: dict
    oracle: Optional[dict] = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "inputs": self.inputs,
            "certificate": self.certificate,
        }
        if self.oracle is not None:
            d["oracle"] = self.oracle
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CertificateReport":
        return cls(
            kind=d["kind"],
            inputs=d["inputs"],
            certificate=d["certificate"],
            oracle=d.get("oracle"),
            schema_version=d["schema_version"],
        )


def build_report(cert, a, q1, oracle: Optional[dict] = None) -> CertificateReport:
    """Wrap a certificate with input sizes and a content hash of ``(A, Q1)``."""
    inputs = {
        "n": int(a.n),
        "k": int(q1.k),
        "digest": content_digest(a.entries, q1.columns),
    }
    return CertificateReport(kind=cert.kind, inputs=inputs, certificate=cert.to_dict(), oracle=oracle)


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k, ensure_ascii=False)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(report) -> str:
    """Canonical JSON: sorted keys, reals with 17 significant digits."""
    d = report.to_dict() if isinstance(report, CertificateReport) else report
    return _encode(d) + "\n"


def write_report(report, path) -> None:
    try:
        Path(path).write_text(dumps_report(report), encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc


def read_report(path) -> CertificateReport:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
    return CertificateReport.from_dict(json.loads(text))


def write_sweep_csv(result, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for row in result.rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])

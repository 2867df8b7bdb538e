"""JSON documents holding an exact quaternionic matrix together with its group data.

Layout::

    {"d": 2, "delta": [x, y], "gamma": [x, y], "a": [x, y], "n": 1,
     "entries": [[[c1, c_i, c_j, c_ij], ...], ...]}

Each field element is [x, y] meaning x + y sqrt(d), and each rational is
[num, den].  Input also accepts bare integers, "p/q" strings and field elements
written in CLI syntax ("1+1s2").
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .lattice import AdmissibleGroupSpec
from .numberfield import FieldElement, FieldError, RealQuadraticField
from .quaternion import QuaternionAlgebra
from .quatlinalg import QuatMatrix

KEYS = ("d", "delta", "gamma", "a", "n", "entries")


class MatrixFileError(ValueError):
    """Malformed matrix document; ``where`` is a field path, ``line`` a source line if known."""

    def __init__(self, message: str, where: str = "", line: int | None = None):
        self.where = where
        self.line = line
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if where:
            loc.append(f"field {where}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)


@dataclass(frozen=True)
class MatrixFile:
    spec: AdmissibleGroupSpec
    matrix: QuatMatrix


def _rational(v: Any, where: str) -> Fraction:
    if isinstance(v, bool):
        raise MatrixFileError("boolean is not a rational", where)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MatrixFileError(f"bad rational {v!r}", where) from exc
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        if v[1] == 0:
            raise MatrixFileError("zero denominator", where)
        return Fraction(v[0], v[1])
    raise MatrixFileError(f"expected [num, den], an integer or 'p/q', got {v!r}", where)


def _element(v: Any, k: RealQuadraticField, where: str) -> FieldElement:
    if isinstance(v, str):
        try:
            return k.parse(v)
        except FieldError as exc:
            raise MatrixFileError(str(exc), where) from exc
    if isinstance(v, int) and not isinstance(v, bool):
        return k(v)
    if isinstance(v, list) and len(v) == 2:
        return k(_rational(v[0], f"{where}[0]"), _rational(v[1], f"{where}[1]"))
    raise MatrixFileError(f"expected a field element [x, y], got {v!r}", where)


def _int(doc: dict, key: str) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise MatrixFileError(f"expected an integer, got {v!r}", key)
    return v


def _key_line(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return lineno
    return None


def from_document(doc: Any) -> MatrixFile:
    if not isinstance(doc, dict):
        raise MatrixFileError("top level must be an object")
    missing = [k for k in KEYS if k not in doc]
    if missing:
        raise MatrixFileError(f"missing keys {missing}", missing[0])
    d = _int(doc, "d")
    try:
        k = RealQuadraticField(d)
    except FieldError as exc:
        raise MatrixFileError(str(exc), "d") from exc
    delta = _element(doc["delta"], k, "delta")
    gamma = _element(doc["gamma"], k, "gamma")
    a = _element(doc["a"], k, "a")
    n = _int(doc, "n")
    if n < 0:
        raise MatrixFileError("n must be non-negative", "n")
    try:
        algebra = QuaternionAlgebra(k, delta, gamma)
    except (FieldError, ValueError) as exc:
        raise MatrixFileError(str(exc), "delta") from exc
    m = n + 1
    entries = doc["entries"]
    if not isinstance(entries, list) or len(entries) != m:
        raise MatrixFileError(f"expected {m} rows", "entries")
    rows = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != m:
            raise MatrixFileError(f"expected {m} entries", f"entries[{i}]")
        out = []
        for j, q in enumerate(row):
            where = f"entries[{i}][{j}]"
            if not isinstance(q, list) or len(q) != 4:
                raise MatrixFileError("expected 4 basis coefficients", where)
            out.append(algebra(*(_element(c, k, f"{where}[{t}]") for t, c in enumerate(q))))
        rows.append(tuple(out))
    return MatrixFile(AdmissibleGroupSpec(algebra, a, n), QuatMatrix(tuple(rows), algebra))


def parse(text: str) -> MatrixFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(exc.msg, line=exc.lineno) from exc
    try:
        return from_document(doc)
    except MatrixFileError as exc:
        if exc.line is None and exc.where:
            top = exc.where.split("[")[0]
            raise MatrixFileError(str(exc).split(": ", 1)[-1], exc.where, _key_line(text, top)) from exc
        raise


def load(path: str) -> MatrixFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse(text)


def _rat_out(q: Fraction) -> list[int]:
    return [q.numerator, q.denominator]


def _el_out(x: FieldElement) -> list:
    return [_rat_out(x.x), _rat_out(x.y)]


def to_document(mf: MatrixFile) -> dict:
    spec = mf.spec
    return {
        "d": spec.d,
        "delta": _el_out(spec.algebra.delta),
        "gamma": _el_out(spec.algebra.gamma),
        "a": _el_out(spec.a),
        "n": spec.n,
        "entries": [[[_el_out(c) for c in q.coords] for q in row] for row in mf.matrix.rows],
    }


def serialize(mf: MatrixFile) -> str:
    return json.dumps(to_document(mf), indent=1) + "\n"


def dump(mf: MatrixFile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(mf))

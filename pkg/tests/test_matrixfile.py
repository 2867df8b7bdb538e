import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatsystole.lattice import AdmissibleGroupSpec
from quatsystole.matrixfile import MatrixFile, MatrixFileError, dump, load, parse, serialize, to_document
from quatsystole.quatlinalg import QuatMatrix

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)


@st.composite
def matrix_files(draw):
    d = draw(st.sampled_from([2, 3, 7]))
    n = draw(st.integers(1, 3))
    spec = AdmissibleGroupSpec.build(d=d, a=f"1+1s{d}", n=n)
    k, D = spec.field, spec.algebra
    el = lambda: k(draw(rationals), draw(rationals))
    rows = [[D(el(), el(), el(), el()) for _ in range(n + 1)] for _ in range(n + 1)]
    return MatrixFile(spec, QuatMatrix.from_entries(D, rows))


@settings(max_examples=100, deadline=None)
@given(matrix_files())
def test_round_trip(mf):
    text = serialize(mf)
    assert parse(text) == mf
    assert serialize(parse(text)) == text


@settings(max_examples=30, deadline=None)
@given(matrix_files())
def test_lowest_terms_positive_denominators(mf):
    doc = to_document(mf)

    def walk(x):
        if isinstance(x, list) and len(x) == 2 and all(isinstance(t, int) for t in x):
            num, den = x
            assert den > 0
            assert Fraction(num, den).denominator == den
        elif isinstance(x, list):
            for t in x:
                walk(t)

    walk(doc["entries"])
    walk(doc["a"])


def _doc(**over):
    base = {"d": 2, "delta": "-1", "gamma": "-1", "a": "1+1s2", "n": 1, "entries": [[[1, 0, 0, 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [1, 0, 0, 0]]]}
    base.update(over)
    return json.dumps(base, indent=1)


def test_flexible_input_forms():
    text = _doc(a=[[1, 1], [2, 2]], entries=[[[[[4, 2], [0, 1]], "1/2", "s2", 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [1, 0, 0, 0]]])
    mf = parse(text)
    k = mf.spec.field
    assert mf.spec.a == k(1, 1)
    assert mf.matrix[0, 0].coords == (k(2), k(Fraction(1, 2)), k(0, 1), k(0))


@pytest.mark.parametrize(
    "text,field",
    [
        (_doc(d=5), "d"),
        (_doc(gamma="x"), "gamma"),
        (_doc(a=[[1, 0], [1, 1]]), "a[0]"),
        (_doc(n="1"), "n"),
        (_doc(entries=[[[1, 0, 0, 0]]]), "entries"),
        (_doc(entries=[[[1, 0, 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [1, 0, 0, 0]]]), "entries[0][0]"),
        (_doc(entries=[[[1, 0, 0, True], [0, 0, 0, 0]], [[0, 0, 0, 0], [1, 0, 0, 0]]]), "entries[0][0][3]"),
        (json.dumps({"d": 2}), "delta"),
    ],
)
def test_field_diagnostics(text, field):
    with pytest.raises(MatrixFileError) as info:
        parse(text)
    assert info.value.where == field
    assert field in str(info.value)


def test_line_diagnostics():
    with pytest.raises(MatrixFileError) as info:
        parse('{"d": 2,\n "delta": "-1",\n "gamma" "x"}')
    assert info.value.line == 3
    with pytest.raises(MatrixFileError) as info:
        parse(_doc(gamma="x"))
    assert info.value.line == 4


def test_top_level_must_be_object():
    with pytest.raises(MatrixFileError):
        parse("[1, 2]")


def test_file_io(tmp_path, witness, spec):
    mf = MatrixFile(spec, witness.matrix())
    path = tmp_path / "m.json"
    dump(mf, str(path))
    assert load(str(path)) == mf
    with pytest.raises(MatrixFileError):
        load(str(tmp_path / "missing.json"))

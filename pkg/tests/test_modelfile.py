import pytest
from hypothesis import given

from fo2t.formula import Signature
from fo2t.modelfile import (
    ModelFileError,
    format_certificate,
    format_structure,
    parse_model_text,
    read_structure,
    write_structure,
)
from fo2t.structure import Structure

from .strategies import transitive_structures

SAMPLE = """\
signature: unary P Q
signature: binary T
element 0: [+P -Q -Txx]
element 1: [-P +Q -Txx]
pair 0 1: [+Txy -Tyx]
"""


def test_sample_parses():
    A = parse_model_text(SAMPLE).structure
    assert A.n == 2 and A.sig == Signature(("P", "Q"), ("T",))
    assert A.t(0, 1) and not A.t(1, 0)


@given(transitive_structures(max_size=5))
def test_round_trip(A):
    assert parse_model_text(format_structure(A)).structure == A


def test_file_round_trip(tmp_path):
    A = parse_model_text(SAMPLE).structure
    path = tmp_path / "m.txt"
    write_structure(path, A)
    assert read_structure(path) == A


def test_certificate_lines():
    A = Structure.chain(4)
    text = format_certificate(A, [(0,), (1,), (2,), (3,)], {((0, 2), (0, 1)): {0: 0, 2: 1}})
    parsed = parse_model_text(text)
    assert parsed.structure == A
    assert parsed.segments == {0: (0,), 1: (1,), 2: (2,), 3: (3,)}
    assert parsed.maps == {((0, 2), (0, 1)): {0: 0, 2: 1}}


@pytest.mark.parametrize(
    "text, fragment",
    [
        (SAMPLE.replace("pair 0 1: [+Txy -Tyx]\n", ""), "pair 0 1 missing"),
        (SAMPLE.replace("element 1", "element 2"), "numbered"),
        (SAMPLE + "pair 1 0: [-Txy -Tyx]\n", "i < j"),
        (SAMPLE + "bogus line\n", "expected"),
        (SAMPLE + "map S0->S1: 0->0\n", "bad map header"),
        ("signature: binary T\n", "no element lines"),
    ],
)
def test_errors(text, fragment):
    with pytest.raises(ModelFileError, match=fragment):
        parse_model_text(text)


def test_error_carries_line_number():
    with pytest.raises(ModelFileError) as exc:
        parse_model_text(SAMPLE + "element x: [+P]\n")
    assert exc.value.line == 6

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fo2t.formula import parse
from fo2t.normal_form import scottify
from fo2t.structure import Structure, check_model, cliques, is_isomorphic, royal_part, splice
from fo2t.surgery import (
    SurgeryError,
    default_bound,
    duplicable_pairs,
    duplicate_clique,
    is_redundant_segment,
    is_segment,
    remove_segment,
    saturation_rounds,
    shrink_clique,
)

from ._gen import duplication_instances, with_twin

ASYM = scottify(parse("!x.!y.(T(x,y) -> ~T(y,x))"))
REFL = scottify(parse("!x.T(x,x)"))
SUCC = scottify(parse("!x.(P(x) -> ?y.(T(x,y) & ~T(y,x)))"))


def _fan():
    # 0 below two incomparable points 1 and 2
    return Structure.from_pairs(ASYM.signature, [0, 0, 0], {(0, 1): 1, (0, 2): 1})


def _mutual_clique(n):
    sig = REFL.signature
    return Structure.from_pairs(sig, [1] * n, {(i, j): 3 for i in range(n) for j in range(i + 1, n)})


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_duplication_postconditions(seed):
    for A, nf, B, B1 in duplication_instances(np.random.default_rng(seed), 3):
        out, rep = duplicate_clique(A, nf, B, B1)
        assert rep.ok, str(rep)
        assert len(rep.checks) == 5
        assert out.n == A.n + len(B)
        assert out.induced(A.elements) == A or rep.notes


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_removing_the_copy_restores_the_input(seed):
    for A, nf, B, B1 in duplication_instances(np.random.default_rng(seed), 3):
        out, rep = duplicate_clique(A, nf, B, B1)
        assert is_redundant_segment(out, nf, rep.added)
        back = remove_segment(out, nf, rep.added)
        assert is_isomorphic(back, A)
        assert check_model(back, nf).ok


def test_duplicate_fan_point():
    A = _fan()
    assert list(duplicable_pairs(A)) == [((1,), (2,)), ((2,), (1,))]
    out, rep = duplicate_clique(A, ASYM, [1], [2])
    assert out.n == 4 and rep.added == [3]
    assert splice(out, [3]) == splice(A, [1])
    assert "operation: duplicate" in str(rep)


def test_duplicate_rejects_bad_input():
    A = _fan()
    with pytest.raises(SurgeryError, match="different"):
        duplicate_clique(A, ASYM, [1], [1])
    with pytest.raises(SurgeryError, match="splices"):
        duplicate_clique(A, ASYM, [0], [1])
    with pytest.raises(SurgeryError, match="not a clique"):
        duplicate_clique(A, ASYM, [1, 2], [0])
    bad = Structure.from_pairs(ASYM.signature, [0, 0], {(0, 1): 3})
    with pytest.raises(SurgeryError, match="not a model"):
        duplicate_clique(bad, ASYM, [0], [1])


def test_royal_part_is_not_a_segment():
    A = _fan()
    assert not is_segment(A, [0])
    assert is_segment(A, [1])
    with pytest.raises(SurgeryError, match="royal"):
        is_redundant_segment(A, ASYM, [0])


def test_last_witness_blocks_removal():
    # 0 needs a strict successor; 1 and 2 both serve, so one of them may go
    sig = SUCC.signature
    A = Structure.from_pairs(sig, [1, 0, 0], {(0, 1): 1, (0, 2): 1})
    assert is_redundant_segment(A, SUCC, [1])
    B = remove_segment(A, SUCC, [1])
    assert B.n == 2 and check_model(B, SUCC).ok
    with pytest.raises(SurgeryError, match="not redundant"):
        remove_segment(A, SUCC, [1, 2])


def test_shrink_mutual_clique():
    A = _mutual_clique(3)
    assert default_bound(A, (0, 1, 2)) == 1
    res, rep = shrink_clique(A, REFL, (0, 1, 2), h=1)
    assert res is None and "not found at bound 1" in str(rep)
    res, rep = shrink_clique(A, REFL, (0, 1, 2), h=2)
    assert res is not None and res.n == 2 and rep.ok
    assert check_model(res, REFL).ok
    with pytest.raises(SurgeryError):
        shrink_clique(A, REFL, (0, 1, 2), h=0)


def test_shrink_singleton_is_identity():
    A = _mutual_clique(1)
    res, rep = shrink_clique(A, REFL, (0,))
    assert res == A and rep.ok


def test_saturation_grows_non_royal_part():
    A = with_twin(Structure.chain(3, ASYM.signature), [2])
    out, reports = saturation_rounds(A, ASYM, 2)
    assert out.n > A.n
    assert all(r.ok for r in reports)
    assert check_model(out, ASYM).ok
    royal, _ = royal_part(out)
    assert len(cliques(out).cliques) > len(royal)


def test_saturation_stops_when_everything_is_royal():
    A = Structure.chain(3, ASYM.signature)
    out, reports = saturation_rounds(A, ASYM, 3)
    assert out == A and reports == []

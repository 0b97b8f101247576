import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fo2t.formula import Signature, parse
from fo2t.normal_form import scottify
from fo2t.semantics import holds
from fo2t.structure import (
    NonTransitiveError,
    Structure,
    StructureError,
    canonical_form,
    check_model,
    cliques,
    connection_type,
    is_isomorphic,
    is_transitive,
    order_condition,
    royal_part,
    splice,
    transfer,
)

from .naive import naive_holds
from .strategies import SIG, sentences, transitive_structures
from ._gen import random_structure, random_transitive


def permuted(A: Structure, rng) -> Structure:
    return A.induced(rng.permutation(A.n).tolist())


def test_chain_is_a_strict_order_of_singletons():
    A = Structure.chain(4)
    part = cliques(A)
    assert [list(c) for c in part.cliques] == [[0], [1], [2], [3]]
    assert part.is_strict_partial_order()
    assert all(part.less(i, j) for i, j in itertools.combinations(range(4), 2))


def test_chain_is_entirely_royal():
    royal, K = royal_part(Structure.chain(3))
    assert len(royal) == 3 and K == frozenset({0, 1, 2})


def test_incomparable_twins_share_a_splice():
    A = Structure.from_pairs(Signature(), [0, 0, 0], {(0, 1): 1, (0, 2): 1})
    s1, s2 = splice(A, [1]), splice(A, [2])
    assert s1 == s2
    _, K = royal_part(A)
    assert K == frozenset({0})


def test_cliques_reject_non_transitive():
    A = Structure.from_pairs(Signature(), [0, 0, 0], {(0, 1): 1, (1, 2): 1})
    assert not is_transitive(A)
    with pytest.raises(NonTransitiveError):
        cliques(A)


def test_flip_inconsistency_is_rejected():
    with pytest.raises(StructureError):
        Structure(Signature(), [0, 0], [[0, 1], [1, 0]])


def test_mutual_pair_is_one_clique():
    A = Structure.from_pairs(Signature(), [1, 1], {(0, 1): 3})
    assert list(cliques(A).cliques) == [(0, 1)]


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_order_condition_matches_transitivity(seed, n):
    rng = np.random.default_rng(seed)
    A = random_structure(rng, n, SIG, density=rng.choice([0.2, 0.5, 0.8]))
    assert order_condition(A) == is_transitive(A)


@given(transitive_structures(max_size=5), st.integers(0, 2**32 - 1))
def test_canonical_form_is_invariant_under_renumbering(A, seed):
    B = permuted(A, np.random.default_rng(seed))
    assert canonical_form(A) == canonical_form(B)
    assert is_isomorphic(A, B)


@given(transitive_structures(max_size=5))
def test_cliques_partition_the_universe(A):
    part = cliques(A)
    seen = sorted(a for c in part.cliques for a in c)
    assert seen == list(A.elements)
    Tm = A.t_matrix()
    for c in part.cliques:
        if len(c) > 1:
            assert Tm[np.ix_(c, c)].all()
    assert part.is_strict_partial_order()


@given(transitive_structures(max_size=5))
def test_royal_part_is_exactly_the_unique_splices(A):
    part = cliques(A)
    spl = [splice(A, c, part) for c in part.cliques]
    royal, _ = royal_part(A)
    for c, s in zip(part.cliques, spl):
        assert (c in royal) == (spl.count(s) == 1)


@given(sentences, st.data())
def test_check_model_agrees_with_the_normal_form_sentence(f, data):
    nf = scottify(f)
    if nf.signature.u > 6:
        return
    A = data.draw(transitive_structures(sig=nf.signature, max_size=3))
    assert check_model(A, nf).ok == naive_holds(nf.to_formula(), A) == holds(nf.to_formula(), A)


def test_check_model_reports_transitivity():
    nf = scottify(parse("!x.!y.(T(x,y) -> T(x,y))"))
    A = Structure.from_pairs(nf.signature, [0, 0, 0], {(0, 1): 1, (1, 2): 1})
    assert check_model(A, nf).condition == "d"


def test_check_model_missing_witness_and_frontier():
    nf = scottify(parse("!x.?y.(T(x,y) & ~T(y,x)) & !x.~T(x,x)"))
    A = Structure.chain(3, nf.signature)
    v = check_model(A, nf)
    assert v.condition == "a" and v.first.witness[0] == 2
    v = check_model(A, nf, frontier=[2])
    assert v.ok and v.frontier_missing


def test_transfer_copies_a_connection():
    rng = np.random.default_rng(3)
    A = random_transitive(rng, 4, SIG, 0.4)
    B = A.induced([0, 1, 2, 3])
    conn = connection_type(A, [0], [1])
    out = transfer(B, {0: 0}, {1: 1}, conn)
    assert out == B


def test_expand_and_reduct_are_inverse():
    A = random_transitive(np.random.default_rng(1), 4, SIG)
    big = A.sig.extend(["R1"])
    assert A.expand(big).reduct(A.sig) == A

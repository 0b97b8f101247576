import pytest
from hypothesis import assume, given, settings

from fo2t.formula import FormulaError, NotFO2Error, parse, size, to_nnf
from fo2t.normal_form import (
    SIZE_FACTOR,
    SIZE_OFFSET,
    canonical_expansion,
    find_expansion,
    scottify,
    verify_equisat_small,
)
from fo2t.semantics import holds
from fo2t.structure import Structure, check_model
from fo2t.typetable import Direction

from .strategies import sentences, transitive_structures


def test_strict_successor_becomes_a_forward_conjunct():
    nf = scottify(parse("!x.?y.(T(x,y) & ~T(y,x))"))
    (g,) = nf.existentials
    assert g.direction is Direction.RIGHT
    assert nf.m == 1 and not nf.deltas
    assert nf.is_transitive_witness_form()


def test_mutual_witness_is_a_delta():
    nf = scottify(parse("!x.?y.(T(x,y) & T(y,x) & x != y)"))
    assert [c.direction for c in nf.existentials] == [Direction.BOTH]
    assert nf.deltas and not nf.gammas


def test_free_witness_conjunct_is_kept_apart():
    nf = scottify(parse("!x.?y.(~T(x,y) & ~T(y,x) & x != y)"))
    assert nf.extra_gammas_free
    assert not nf.is_transitive_witness_form()


def test_global_existential():
    nf = scottify(parse("?x.P(x) & !x.!y.(T(x,y) -> ~T(y,x))"))
    assert nf.global_existentials
    assert not nf.existentials


def test_nested_quantifiers_get_fresh_predicates():
    nf = scottify(parse("!x.(P(x) | ?y.(T(x,y) & ?x.(T(y,x) & ~T(x,y))))"))
    assert nf.fresh
    assert set(nf.fresh) <= set(nf.signature.unary)
    assert nf.base_signature.unary == ("P",)


def test_rejects_open_formulas_and_third_variables():
    with pytest.raises(FormulaError):
        scottify(parse("P(x)", sentence=False))
    with pytest.raises((NotFO2Error, FormulaError)):
        scottify(parse("!x.!z.T(x,z)"))


def test_text_rendering_reparses():
    nf = scottify(parse("!x.(P(x) -> ?y.(T(x,y) & ~T(y,x) & P(y)))"))
    body = "\n".join(l.split("#")[0] for l in nf.to_text().splitlines() if not l.startswith("#"))
    g = parse(" & ".join(s.strip().rstrip(";") for s in body.splitlines() if s.strip()))
    A = Structure.chain(1, nf.signature)
    assert holds(g, A) == check_model(A, nf).ok


@given(sentences)
def test_output_size_is_linear(f):
    nf = scottify(f)
    assert nf.output_size() <= SIZE_FACTOR * size(to_nnf(f)) + SIZE_OFFSET


@settings(max_examples=40)
@given(sentences, transitive_structures(max_size=3))
def test_formula_holds_iff_some_expansion_models_the_normal_form(f, A):
    nf = scottify(f)
    A = A.reduct(nf.base_signature) if A.sig != nf.base_signature else A
    exp, exhausted = find_expansion(A, nf, limit=1 << 9)
    assume(exp is not None or exhausted)
    assert holds(f, A) == (exp is not None)


@settings(max_examples=40)
@given(sentences, transitive_structures(max_size=3))
def test_every_normal_form_model_reduct_satisfies_the_formula(f, A):
    nf = scottify(f)
    A = A.reduct(nf.base_signature) if A.sig != nf.base_signature else A
    exp = canonical_expansion(A, nf)
    if check_model(exp, nf).ok:
        assert holds(f, A)


@settings(max_examples=25)
@given(sentences)
def test_equisat_at_bound_two(f):
    assert verify_equisat_small(f, scottify(f), 2).ok


def test_equisat_vacuous_bound_is_flagged():
    f = parse("!x.P(x)")
    rep = verify_equisat_small(f, scottify(f), 0)
    assert rep.inconclusive and "vacuous" in rep.inconclusive

"""Small hand-checkable values, each frozen from an independent computation."""
import pytest

from fo2t.certificate import (
    Certificate,
    NotFoundUpTo,
    check_certificate,
    compute_M,
    connection_equiv,
    find_certificate,
    unfold,
    verify_unfolding,
)
from fo2t.corpus import (
    build_phi_model_prefix,
    build_upsilon_model,
    get_entry,
    load_formula,
    phi_frontier,
    phi_index,
    run_pipeline,
)
from fo2t.formula import (
    FragmentClass,
    ParseError,
    Signature,
    classify_fragment,
    parse,
    parse_qf,
    to_nnf,
)
from fo2t.model_finder import all_models_up_to, find_finite_model, SearchConfig
from fo2t.normal_form import directional_split, scottify, verify_equisat_small
from fo2t.structure import (
    Structure,
    check_model,
    cliques,
    connection_type,
    royal_part,
    splice,
    transfer,
    witness_set,
)
from fo2t.surgery import duplicate_clique, is_redundant_segment, remove_segment, saturation_rounds
from fo2t.typetable import DIRECTIONS, Direction, count_2types_satisfying, enumerate_2types, layout, type_satisfies

STRICT = "!x.?y.(T(x,y) & ~T(y,x)) & !x.~T(x,x)"
SUCC_NF = scottify(parse("!x.?y.(T(x,y) & ~T(y,x))"))
ASYM_NF = scottify(parse("!x.!y.(T(x,y) -> ~T(y,x))"))
T_ONLY = Signature()
FWD = 1
BOTH = 3


# formula

def test_third_variable_message():
    with pytest.raises(ParseError, match="variable z not allowed"):
        parse("!x.?z.P(z)")


def test_nnf_duality_and_de_morgan():
    assert to_nnf(parse("~!x.?y.T(x,y)")) == parse("?x.!y.~T(x,y)")
    assert to_nnf(parse("!x.!y.~(P(x) & T(x,y))")) == parse("!x.!y.(~P(x) | ~T(x,y))")
    f = parse("!x.(~P(x) | ?y.T(x,y))")
    assert to_nnf(f) == f


def test_fragment_examples():
    assert classify_fragment(parse(STRICT)) is FragmentClass.TRANSITIVE_WITNESSES
    assert classify_fragment(load_formula("phi")) is FragmentClass.FREE_WITNESSES
    assert classify_fragment(parse("!x.?y.x < y & !x.~x < x")) is FragmentClass.GENERAL


# directional split and normal form

def test_split_instances():
    psi = parse_qf("P(y)")
    assert directional_split(psi, Direction.RIGHT) == parse_qf("T(x,y) & ~T(y,x) & P(y)")
    assert directional_split(parse_qf("true"), Direction.BOTH) == parse_qf("T(x,y) & T(y,x)")


def test_splits_partition_pair_types():
    sig = Signature(("P",), ("T",))
    psi = parse_qf("P(y) | T(y,x)")
    for beta in enumerate_2types(sig).two_types.tolist():
        hits = [type_satisfies(beta, directional_split(psi, d), sig) for d in DIRECTIONS]
        assert sum(hits) <= 1
        assert any(hits) == type_satisfies(beta, psi, sig)


def test_strict_order_compiles_to_one_forward_conjunct():
    nf = scottify(parse(STRICT))
    assert nf.psi0 == parse_qf("~T(x,x)")
    assert [g.direction for g in nf.gammas] == [Direction.RIGHT] and not nf.fresh
    assert verify_equisat_small(parse(STRICT), nf, 4).ok


def test_nf_shaped_input_is_kept():
    f = parse("!x.!y.(P(x) -> ~T(x,y)) & !x.?y.(x != y & T(x,y) & ~T(y,x) & P(y))")
    nf = scottify(f)
    assert not nf.fresh and len(nf.gammas) == 1


def test_depth_three_input_gets_one_renaming_predicate():
    f = parse("!x.(P(x) -> ?y.(T(x,y) & !x.(Q(x) -> T(y,x))))")
    nf = scottify(f)
    assert len(nf.renamed) == 1
    assert verify_equisat_small(f, nf, 4).ok


def test_deliberate_mismatch_is_reported_at_size_one():
    rep = verify_equisat_small(parse("!x.P(x)"), scottify(parse("!x.~P(x)")), 1)
    assert not rep.ok
    assert any(A.n == 1 for A in rep.unsound + rep.incomplete)
    assert "size-1" in "\n".join(rep.lines())


# types

@pytest.mark.parametrize("sig, ones, twos", [(T_ONLY, 2, 16), (Signature(("P",)), 4, 64), (Signature(tuple(f"A{i}" for i in range(5))), 64, None)])
def test_type_counts(sig, ones, twos):
    lay = layout(sig)
    assert lay.n_one == ones
    if twos:
        table = enumerate_2types(sig)
        assert len(table.two_types) == twos
        assert {len(table.direction_class(d)) for d in DIRECTIONS} == {twos // 4}


def test_restrict_and_flip():
    sig = Signature(("P",))
    lay = layout(sig)
    beta = lay.pack(0b01, 0b00, 0)
    assert lay.restrict(beta, "x") == 0b01
    for b in enumerate_2types(sig).two_types.tolist():
        assert lay.restrict(lay.flip(b), "x") == lay.restrict(b, "y")
        assert lay.restrict(b, "x") < lay.n_one


def test_txy_count():
    assert count_2types_satisfying(parse_qf("T(x,y)"), T_ONLY) == 8
    assert count_2types_satisfying(parse_qf("x != y"), T_ONLY) == 16


# structures

def test_chain_model_checks():
    chain = Structure.chain(4)
    v = check_model(chain, scottify(parse(STRICT)))
    assert v.condition == "a" and v.first.witness[0] == 3
    assert check_model(chain, ASYM_NF).ok
    broken = Structure.from_pairs(T_ONLY, [0, 0, 0], {(0, 1): FWD, (1, 2): FWD})
    v = check_model(broken, ASYM_NF)
    assert v.condition == "d" and tuple(v.first.witness) == (0, 1, 2)


def test_clique_examples():
    full = Structure.from_pairs(T_ONLY, [1, 1, 1], {(0, 1): BOTH, (0, 2): BOTH, (1, 2): BOTH})
    assert list(cliques(full).cliques) == [(0, 1, 2)]
    two = Structure.from_pairs(
        T_ONLY, [1] * 4, {(0, 1): BOTH, (2, 3): BOTH, (0, 2): FWD, (0, 3): FWD, (1, 2): FWD, (1, 3): FWD}
    )
    part = cliques(two)
    assert list(part.cliques) == [(0, 1), (2, 3)]
    assert part.less(0, 1) and not part.less(1, 0)


def test_splice_and_royal_examples():
    chain = Structure.chain(4)
    s0 = splice(chain, [0])
    assert s0.In == frozenset() and s0.Out == frozenset({0})
    assert splice(chain, [1]) == splice(chain, [2])
    one = Structure.chain(1)
    assert splice(one, [0]).In == splice(one, [0]).Out == frozenset()
    royal, _ = royal_part(chain)
    assert royal == [(0,), (3,)]
    assert len(royal_part(Structure.chain(2))[0]) == 2
    anti = Structure.from_pairs(T_ONLY, [0, 0, 0], {})
    assert royal_part(anti) == ([], frozenset())


def test_witness_sets_on_chain():
    chain = Structure.chain(4)
    (g,) = SUCC_NF.gammas
    assert witness_set(chain, 0, g) == {1, 2, 3}
    assert witness_set(chain, 3, g) == set()


def test_transfer_examples():
    chain = Structure.chain(4)
    conn = connection_type(chain, [0], [2])
    # identity maps copy the structure
    assert transfer(chain, {0: 0}, {2: 2}, conn) == chain
    # move the forward edge 0->2 onto the pair 1,3; cliques are unchanged
    out = transfer(chain, {1: 0}, {3: 2}, conn)
    assert connection_type(out, [1], [3]).cross == conn.cross
    assert list(cliques(out).cliques) == list(cliques(chain).cliques)


# surgery

def test_duplicate_chain_middle():
    chain = Structure.chain(4)
    out, rep = duplicate_clique(chain, ASYM_NF, [1], [2])
    assert out.n == 5 and rep.ok and len(rep.checks) == 5
    (d,) = rep.added
    assert out.t(0, d) and out.t(d, 3)
    assert is_redundant_segment(out, ASYM_NF, [d])
    back = remove_segment(out, ASYM_NF, [d])
    assert back == chain


def test_incomparable_duplicate_stays_incomparable():
    fan = Structure.from_pairs(T_ONLY, [0, 0, 0], {(0, 1): FWD, (0, 2): FWD})
    out, _ = duplicate_clique(fan, ASYM_NF, [1], [2])
    assert not out.t(3, 1) and not out.t(1, 3)
    assert cliques(out).less(cliques(out).clique_of[0], cliques(out).clique_of[3])


def test_redundant_middle_of_chain():
    chain = Structure.chain(4)
    assert is_redundant_segment(chain, SUCC_NF, [1])
    with pytest.raises(ValueError):
        is_redundant_segment(
            Structure.from_pairs(T_ONLY, [1, 1, 0], {(0, 1): BOTH, (0, 2): FWD, (1, 2): FWD}), SUCC_NF, [0]
        )
    assert remove_segment(chain, SUCC_NF, []) == chain


def test_saturation_examples():
    chain = Structure.chain(4)
    assert saturation_rounds(chain, ASYM_NF, 0)[0] == chain
    out, reps = saturation_rounds(chain, ASYM_NF, 1)
    assert out.n == 6 and len(reps) == 2 and check_model(out, ASYM_NF).ok


# model finder

def test_finder_examples():
    A = find_finite_model(scottify(parse("!x.T(x,x)")), SearchConfig(max_size=3))
    assert isinstance(A, Structure) and A.n == 1
    assert list(all_models_up_to(parse("!x.false"), 3)) == []
    assert len(list(all_models_up_to(parse("!x.x = x"), 1, signature=T_ONLY))) == 2


# certificates

def test_bound_arithmetic():
    assert compute_M(1, 4, 2).M == 64
    assert compute_M(0, 3, 2).M == 9 * 2
    assert compute_M(2, 1, 1).M == 3


def test_connection_equivalence_examples():
    chain = Structure.chain(4)
    assert connection_equiv(chain, ((0,), (1,)), ((0,), (1,)))
    assert connection_equiv(chain, ((0,), (1,)), ((0,), (2,)))
    fan = Structure.from_pairs(T_ONLY, [0, 0, 0], {(0, 1): FWD})
    assert not connection_equiv(fan, ((0,), (1,)), ((0,), (2,)))


def test_chain_certificate_and_deleted_edge():
    nf = scottify(parse(STRICT))
    chain = Structure.chain(4, nf.signature)
    c = Certificate(chain, ((0,), (1,), (2,), (3,)))
    assert check_certificate(c, nf).ok
    bld = chain.builder()
    bld.set_cross(2, 3, 0)
    v = check_certificate(Certificate(bld.build(), c.segments), nf)
    assert v.conditions() == ["2b", "5"]
    cond5 = [f for f in v.failures if f.condition == "5"]
    assert [f.witness for f in cond5] == [(2, 1, 2)]


def test_finite_reflexive_certificate():
    nf = scottify(parse("!x.?y.(T(x,y) & T(y,x))"))
    c = find_certificate(nf, 1)
    assert c.finite and c.size == 1 and check_certificate(c, nf).ok


def test_unsatisfiable_certificate_search():
    nf = scottify(parse("!x.?y.(T(x,y) & ~T(y,x)) & !x.!y.~T(x,y)"))
    for b in (1, 2):
        assert isinstance(find_certificate(nf, b), NotFoundUpTo)


def test_unfold_examples():
    nf = scottify(parse(STRICT))
    c = find_certificate(nf, 1)
    U = unfold(c, 10)
    assert U == Structure.chain(11, nf.signature)
    for a in range(10):
        assert check_model(U, nf, frontier=[10]).ok
    assert unfold(c, 0).n == 1


def test_verify_unfolding_examples():
    nf = scottify(parse(STRICT))
    bad = Structure.from_pairs(nf.signature, [1, 0], {(0, 1): FWD})
    v = verify_unfolding(bad, nf, frontier=[1])
    assert v.condition == "c" and 0 in v.first.witness
    model = Structure.chain(3, ASYM_NF.signature)
    assert verify_unfolding(model, ASYM_NF).ok == check_model(model, ASYM_NF).ok


# corpus constructions

def test_phi_prefix_witnesses():
    k = 6
    A = build_phi_model_prefix(k)
    nf = scottify(load_formula("phi"))
    v = verify_unfolding(A, nf, frontier=phi_frontier(k))
    assert v.ok
    Tm = A.t_matrix()
    for l in range(-k + 1, k):
        a = phi_index(k, l)
        for nb in (a - 1, a + 1):
            assert not Tm[a, nb] and not Tm[nb, a]
    assert not verify_unfolding(A, nf).ok


def test_upsilon_examples():
    A = build_upsilon_model(5)
    Tm = A.t_matrix()
    q = range(5, 10)
    assert not any(Tm[a, b] for a in q for b in q)
    one = build_upsilon_model(1)
    assert one.n == 2 and not one.t(0, 1) and not one.t(1, 0)


@pytest.mark.parametrize(
    "name, fragment, finite, cert",
    [
        ("strict-order-infinity", "TransitiveWitnesses", "NoModelUpTo(6)", "found"),
        ("phi", "FreeWitnesses", "NoModelUpTo(5)", "skipped"),
        ("reflexive-point", "TransitiveWitnesses", "model", "finite"),
    ],
)
def test_pipeline_entries(name, fragment, finite, cert):
    rep = run_pipeline(get_entry(name))
    assert rep.ok, rep.to_text()
    res = rep.results
    assert res["fragment"] == fragment
    if finite == "model":
        assert res["model_size"] == 1
    else:
        assert res["finite"] == finite
    assert res["certificate"].startswith(cert)

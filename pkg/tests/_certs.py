"""The strict-order certificate and one targeted mutation per condition."""
from fo2t.certificate import Certificate, find_certificate
from fo2t.formula import parse
from fo2t.normal_form import scottify

STRICT_INFINITY = "!x.?y.(T(x,y) & ~T(y,x)) & !x.~T(x,x)"
# the same axiom plus a mutual witness, which the mutation for condition 6 violates
WITH_MUTUAL = STRICT_INFINITY + " & !x.?y.(T(x,y) & T(y,x))"


def strict_nf():
    return scottify(parse(STRICT_INFINITY))


def strict_certificate():
    return find_certificate(strict_nf(), 1)


def _recut(c, A):
    return Certificate(A, c.segments)


def _set_pairs(c, pairs, code):
    bld = c.structure.builder()
    for a, b in pairs:
        bld.set_cross(a, b, code)
    return bld.build()


def mutations(c):
    """condition -> (mutated certificate, normal form to check it against)."""
    nf = strict_nf()
    lay = c.structure.layout
    fwd = 1 << lay.t_cross_bit
    both = fwd | (fwd << 1)
    S = [seg[0] for seg in c.segments]
    out = {}
    # <S0,S2> loses its edge, so it no longer matches <S0,S1>
    out["2a"] = (_recut(c, _set_pairs(c, [(S[0], S[2])], 0)), nf)
    # <S1,S3> loses its edge, so it no longer matches <S1,S2>
    out["2b"] = (_recut(c, _set_pairs(c, [(S[1], S[3])], 0)), nf)
    # a reflexive point violates psi0 on the diagonal
    bld = c.structure.builder()
    bld.set_one(S[0], int(c.structure.tp1[S[0]]) | (1 << lay.t_diag_bit))
    out["3"] = (_recut(c, bld.build()), nf)
    # mutual edges among S1, S2, S3 without reflexivity break transitivity first
    out["4"] = (_recut(c, _set_pairs(c, [(S[1], S[2]), (S[1], S[3]), (S[2], S[3])], both)), nf)
    # the elements of S1 and S2 lose their successors in S2 and S3
    out["5"] = (_recut(c, _set_pairs(c, [(S[1], S[2]), (S[1], S[3]), (S[2], S[3])], 0)), nf)
    # formula side: the selector for the mutual witness is true everywhere,
    # but every clique is a single irreflexive point
    nf6 = scottify(parse(WITH_MUTUAL))
    sel = [p for p in nf6.signature.unary if p not in nf6.base_signature.unary]
    A6 = c.structure.expand(nf6.signature, {p: [True] * c.size for p in sel})
    out["6"] = (Certificate(A6, c.segments), nf6)
    return out

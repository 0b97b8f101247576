"""Random structure generators shared by the tests."""
import itertools

import numpy as np

from fo2t.formula import Signature
from fo2t.structure import Structure


def transitive_closure(R: np.ndarray) -> np.ndarray:
    R = R.copy()
    for k in range(R.shape[0]):
        R |= R[:, k:k + 1] & R[k:k + 1, :]
    return R


def random_relations(rng, n: int, sig: Signature, density: float = 0.3):
    U = rng.random((n, sig.u)) < 0.5
    B = rng.random((n, n, sig.k)) < density
    return U, B


def random_structure(rng, n: int, sig: Signature, density: float = 0.3) -> Structure:
    U, B = random_relations(rng, n, sig, density)
    return Structure.from_relations(sig, U, B)


def random_transitive(rng, n: int, sig: Signature, density: float = 0.2) -> Structure:
    U, B = random_relations(rng, n, sig, density)
    t = sig.t_index
    B[:, :, t] = transitive_closure(B[:, :, t])
    return Structure.from_relations(sig, U, B)


def with_twin(A: Structure, C) -> Structure:
    """Add a copy of the clique C, incomparable to C.

    The copy has the same 1-types, the same internal 2-types and the same
    2-types to every element outside C, so C and the copy share a splice.
    """
    C = list(C)
    bld = A.builder()
    D = bld.add_elements(len(C))
    for d, c in zip(D, C):
        bld.set_one(d, int(A.tp1[c]))
        for b in A.elements:
            if b not in C:
                bld.set_cross(d, b, int(A.cross[c, b]))
    for (d1, c1), (d2, c2) in itertools.combinations(zip(D, C), 2):
        bld.set_cross(d1, d2, int(A.cross[c1, c2]))
    return bld.build()


DUPLICATION_FORMULAS = (
    "!x.(P(x) -> ?y.(T(x,y) & ~T(y,x)))",
    "!x.!y.(T(x,y) -> ~T(y,x))",
    "!x.(Q(x) -> ?y.(~T(x,y) & T(y,x) & P(y)))",
    "!x.(P(x) | ?y.(T(x,y) & ~T(y,x) & Q(y)))",
    "!x.(T(x,x) -> ?y.(T(x,y) & T(y,x) & x != y))",
    "!x.!y.((P(x) & T(x,y)) -> P(y))",
)


def duplication_instances(rng, count: int, max_size: int = 6, tries: int = 20000):
    """Random (model, nf, B, B1) with B, B1 distinct cliques of equal splice.

    A random transitive structure is expanded canonically to the normal form
    signature, kept when it is a model, and given an incomparable twin of a
    random clique so at least one duplicable pair exists.
    """
    from fo2t.formula import parse
    from fo2t.normal_form import canonical_expansion, scottify
    from fo2t.structure import check_model, cliques
    from fo2t.surgery import duplicable_pairs

    nfs = [scottify(parse(t)) for t in DUPLICATION_FORMULAS]
    out = []
    for _ in range(tries):
        if len(out) >= count:
            break
        nf = nfs[rng.integers(len(nfs))]
        n = int(rng.integers(1, max_size))
        A = random_transitive(rng, n, nf.base_signature, density=float(rng.choice([0.15, 0.3, 0.5])))
        A = canonical_expansion(A, nf)
        part = cliques(A).cliques
        if rng.random() < 0.8:
            A = with_twin(A, part[rng.integers(len(part))])
        if not check_model(A, nf).ok:
            continue
        pairs = list(duplicable_pairs(A))
        if not pairs:
            continue
        B, B1 = pairs[rng.integers(len(pairs))]
        out.append((A, nf, B, B1))
    return out

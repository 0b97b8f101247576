"""Model transformations: clique duplication, clique shrinking, segment removal.

Every operation returns its result together with a :class:`SurgeryReport`
whose checklist was evaluated on that result. A structure is only returned
when every clause of the checklist passes; otherwise :class:`SurgeryError`
carries the failing report.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .structure import (
    NonTransitiveError,
    Structure,
    StructureBuilder,
    check_model,
    cliques,
    extend_partial_order,
    find_isomorphism,
    is_transitive,
    royal_part,
    splice,
    transitivity_violation,
    witness_set,
)
from .typetable import Direction


class SurgeryError(ValueError):
    def __init__(self, message: str, report: "SurgeryReport | None" = None):
        self.report = report
        super().__init__(message)


@dataclass
class SurgeryReport:
    operation: str
    added: list = field(default_factory=list)
    removed: list = field(default_factory=list)
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def __str__(self):
        lines = [f"operation: {self.operation}"]
        if self.added:
            lines.append("added: " + " ".join(map(str, self.added)))
        if self.removed:
            lines.append("removed: " + " ".join(map(str, self.removed)))
        for name, ok, detail in self.checks:
            tail = f" ({detail})" if detail else ""
            lines.append(f"  [{'pass' if ok else 'FAIL'}] {name}{tail}")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines)


def _require_clique(part, B, what="B"):
    B = tuple(sorted(B))
    if not B or part.of(B[0]) != B:
        raise SurgeryError(f"{what}={list(B)} is not a clique")
    return B


def _two_type_set(A: Structure, X, Y) -> frozenset:
    return frozenset(A.tp2(x, y) for x in X for y in Y if x != y)


def repair_order(A: Structure) -> Structure:
    """Close T under the minimal partial-order extension until it is transitive.

    Each violation ``T(a,b), T(b,c), not T(a,c)`` is repaired by putting the
    clique of ``a`` below the clique of ``c`` together with everything below
    and above them.
    """
    from .structure import _mutual_components, _partition

    for _ in range(A.n * A.n + 1):
        tri = transitivity_violation(A)
        if tri is None:
            return A
        a, _, c = tri
        part = _partition(A, _mutual_components(A))
        ia, ic = part.clique_of[a], part.clique_of[c]
        if ia == ic:
            raise NonTransitiveError(tri)
        if (ic, ia) in part.order:
            raise NonTransitiveError(tri)
        order = extend_partial_order(part.order, ia, ic)
        bld = A.builder()
        for i, j in order:
            for x in part.cliques[i]:
                for y in part.cliques[j]:
                    bld.set_t(x, y, True)
                    bld.set_t(y, x, False)
        A = bld.build()
    raise NonTransitiveError(transitivity_violation(A))


# duplication -------------------------------------------------------------------


def duplicate_clique(A: Structure, nf, B: Iterable[int], B1: Iterable[int]):
    """Extend A by a fresh copy D of clique B, placed using the clique B1.

    ``<D,B>`` is transferred from ``<B1,B>`` and ``<D, A minus B>`` from
    ``<B, A minus B>``. The report checks the five duplication properties.
    """
    verdict = check_model(A, nf)
    if not verdict.ok:
        raise SurgeryError(f"input is not a model: {verdict}")
    part = cliques(A)
    B = _require_clique(part, B)
    B1 = _require_clique(part, B1, "B1")
    if B == B1:
        raise SurgeryError("B and B1 must be different cliques")
    sB, sB1 = splice(A, B, part), splice(A, B1, part)
    if sB != sB1:
        raise SurgeryError("B and B1 have different splices")
    f1 = find_isomorphism(A, B, A, B1)
    if f1 is None:
        raise SurgeryError("B and B1 are not isomorphic")
    n = A.n
    bld = StructureBuilder(A.sig, n + len(B))
    bld.tp1[:n] = A.tp1
    bld.cross[:n, :n] = A.cross
    D = list(range(n, n + len(B)))
    to_b = dict(zip(D, B))  # f: D -> B
    to_b1 = {d: f1[b] for d, b in to_b.items()}  # f1: D -> B1
    for d, b in to_b.items():
        bld.set_one(d, int(A.tp1[b]))
    for d, d2 in itertools.combinations(D, 2):
        bld.set_cross(d, d2, int(A.cross[to_b[d], to_b[d2]]))
    for d in D:
        for b in B:
            bld.set_cross(d, b, int(A.cross[to_b1[d], b]))
        for a in range(n):
            if a not in B:
                bld.set_cross(d, a, int(A.cross[to_b[d], a]))
    out = bld.build()
    report = SurgeryReport("duplicate", added=D)
    if not is_transitive(out):
        report.notes.append("transfer broke transitivity; applied the minimal order extension")
        out = repair_order(out)
    _duplication_checks(A, out, nf, B, B1, D, to_b, report)
    if not report.ok:
        raise SurgeryError(f"duplication postconditions failed: {report.failed()}", report)
    return out, report


def _duplication_checks(A, out, nf, B, B1, D, to_b, report):
    v = check_model(out, nf)
    report.check("(1) result is a model", v.ok, "" if v.ok else str(v))
    inherit_ok, detail = True, ""
    for conj in nf.existentials:
        if conj.direction is Direction.BOTH:
            continue
        for a in A.elements:
            if a in B:
                continue
            if witness_set(A, a, conj) & set(B) and not witness_set(out, a, conj) & set(D):
                inherit_ok, detail = False, f"element {a}, conjunct {conj.index}"
                break
    report.check("(2) witnesses provided by B are provided by D", inherit_ok, detail)
    new_part = cliques(out)
    part_ok = new_part.of(D[0]) == tuple(D)
    sD = splice(out, D, new_part) if part_ok else None
    s_old = splice(A, B)
    report.check(
        "(3) splice(D) = splice(B) = original splice(B)",
        part_ok and sD == splice(out, B, new_part) == s_old,
    )
    report.check(
        "(4) 2-types of <D,B> equal those of <B1,B>",
        _two_type_set(out, D, B) == _two_type_set(out, B1, B) == _two_type_set(A, B1, B),
    )
    ok5, detail5 = True, ""
    for X in new_part.cliques:
        if set(X) & set(B) or set(X) & set(D):
            continue
        if not (_two_type_set(out, D, X) == _two_type_set(out, B, X) == _two_type_set(A, B, X)):
            ok5, detail5 = False, f"clique {list(X)}"
            break
    report.check("(5) 2-types of <D,X> equal those of <B,X> for other cliques X", ok5, detail5)


def duplicable_pairs(A: Structure):
    """Pairs (B, B1) of distinct cliques with equal splices, in clique order."""
    part = cliques(A)
    spl = [splice(A, c, part) for c in part.cliques]
    for i, j in itertools.permutations(range(len(part.cliques)), 2):
        if spl[i] == spl[j]:
            yield part.cliques[i], part.cliques[j]


# shrinking ---------------------------------------------------------------------


def default_bound(A: Structure, B) -> int:
    """|2-types realized inside B| squared, capped by |B|."""
    return max(1, min(len(_two_type_set(A, B, B)) ** 2, len(B)))


def shrink_clique(A: Structure, nf, B: Iterable[int], h: int | None = None, max_candidates: int = 200_000):
    """Replace clique B by a clique B' of size at most h.

    Candidates are built from multisets of B's elements ("roles"): a copy of
    role ``r`` keeps the 1-type of ``r`` and its 2-types to the outside.
    Pairs of distinct roles keep their 2-type; two copies of the same role
    take a 2-type realized in B between elements of that 1-type. Every
    candidate is judged by the full checklist, the first passing one wins.
    Returns ``(structure, report)`` or ``(None, report)`` when no candidate
    of size at most h passes.
    """
    if h is not None and h < 1:
        raise SurgeryError("bound must be ≥ 1")
    verdict = check_model(A, nf)
    if not verdict.ok:
        raise SurgeryError(f"input is not a model: {verdict}")
    part = cliques(A)
    B = _require_clique(part, B)
    h = default_bound(A, B) if h is None else h
    report = SurgeryReport("shrink")
    if len(B) == 1:
        report.notes.append("|B| = 1, returned unchanged")
        report.check("(i)-(v') trivially preserved", True)
        return A, report
    rest = [a for a in A.elements if a not in B]
    inner = _two_type_set(A, B, B)
    tried = 0
    for size in range(1, min(h, len(B)) + 1):
        for roles in itertools.combinations_with_replacement(B, size):
            for cand in _assemble(A, B, rest, roles, inner):
                tried += 1
                if tried > max_candidates:
                    report.notes.append(f"candidate budget {max_candidates} exhausted")
                    report.check(f"replacement found within bound {h}", False, "budget")
                    return None, report
                checks = _shrink_checklist(A, cand, nf, B, rest, len(roles))
                if all(ok for _, ok, _ in checks):
                    report.checks.extend(checks)
                    report.removed = list(B)
                    report.added = list(range(len(rest), cand.n))
                    report.notes.append(f"roles {list(roles)}; {tried} candidates tried")
                    return cand, report
    report.check(f"replacement found within bound {h}", False, f"not found at bound {h}")
    report.notes.append(f"not found at bound {h} ({tried} candidates tried)")
    return None, report


def _assemble(A, B, rest, roles, inner):
    """Candidate structures: ``rest`` renumbered 0.., then the copies of ``roles``."""
    m = len(rest)
    size = len(roles)
    same = [(i, j) for i in range(size) for j in range(i + 1, size) if roles[i] == roles[j]]
    lay = A.layout
    options = []
    for i, j in same:
        alpha = int(A.tp1[roles[i]])
        opts = sorted(
            {lay.unpack(beta)[2] for beta in inner if lay.unpack(beta)[0] == alpha and lay.unpack(beta)[1] == alpha}
        )
        if not opts:
            return
        options.append(opts)
    base = StructureBuilder(A.sig, m + size)
    for i, a in enumerate(rest):
        base.set_one(i, int(A.tp1[a]))
        for j in range(i + 1, m):
            base.set_cross(i, j, int(A.cross[a, rest[j]]))
    for i, r in enumerate(roles):
        base.set_one(m + i, int(A.tp1[r]))
        for j, a in enumerate(rest):
            base.set_cross(m + i, j, int(A.cross[r, a]))
        for k in range(i + 1, size):
            if roles[k] != r:
                base.set_cross(m + i, m + k, int(A.cross[r, roles[k]]))
    for choice in itertools.product(*options):
        for (i, j), c in zip(same, choice):
            base.set_cross(m + i, m + j, c)
        yield base.build()


def _shrink_checklist(A, cand, nf, B, rest, size):
    m = len(rest)
    Bp = list(range(m, m + size))
    restp = list(range(m))
    checks = []

    def add(name, ok, detail=""):
        checks.append((name, bool(ok), detail))
        return ok

    ri, rc = np.array(rest, dtype=np.int64), np.array(restp, dtype=np.int64)
    ok = add(
        "(i) outside of B unchanged",
        np.array_equal(cand.cross[np.ix_(rc, rc)], A.cross[np.ix_(ri, ri)]) and np.array_equal(cand.tp1[rc], A.tp1[ri]),
    )
    ok &= add("(ii) 1-types of B' equal those of B", {int(cand.tp1[b]) for b in Bp} == {int(A.tp1[b]) for b in B})
    ok &= add(
        "(iii) 2-types inside B' and towards the outside are preserved",
        _two_type_set(cand, Bp, Bp) == _two_type_set(A, B, B)
        and _two_type_set(cand, Bp, restp) == _two_type_set(A, B, rest),
    )
    all_A = list(A.elements)
    all_c = list(cand.elements)
    ok &= add(
        "(iv) each b' dominates some b",
        all(
            any(_two_type_set(cand, [bp], all_c) >= _two_type_set(A, [b], all_A) for b in B)
            for bp in Bp
        ),
    )
    v_ok = True
    for i, a in enumerate(rest):
        old = _two_type_set(A, [a], B)
        new = _two_type_set(cand, [i], Bp)
        if not new >= old:
            v_ok = False
            break
        for d in (Direction.RIGHT, Direction.LEFT, Direction.NONE):
            if all(A.layout.direction(beta) is d for beta in old) and not all(
                cand.layout.direction(beta) is d for beta in new
            ):
                v_ok = False
        if not v_ok:
            break
    ok &= add("(v') outside elements keep their 2-types and directional purity", v_ok)
    trans = is_transitive(cand)
    ok &= add("transitivity", trans)
    if trans:
        part = cliques(cand)
        ok &= add("B' is a clique", part.of(Bp[0]) == tuple(Bp))
    else:
        add("B' is a clique", False, "not transitive")
        ok = False
    v = check_model(cand, nf) if ok else None
    add("result is a model", v is not None and v.ok, "" if v is None or v.ok else str(v))
    return checks


# segments ----------------------------------------------------------------------


def _gamma_conjuncts(nf):
    return [c for c in nf.existentials if c.direction is not Direction.BOTH]


def is_segment(A: Structure, S: Iterable[int]) -> bool:
    S = set(S)
    part = cliques(A)
    _, K = royal_part(A)
    return all(set(part.of(a)) <= S for a in S) and not (S & K)


def is_redundant_segment(A: Structure, nf, S: Iterable[int]) -> bool:
    """Whether removing segment S leaves every outside element its witnesses."""
    S = set(int(a) for a in S)
    if not S:
        return True
    part = cliques(A)
    for a in S:
        if not set(part.of(a)) <= S:
            raise SurgeryError(f"S is not clique-closed: clique of {a} leaves S")
    _, K = royal_part(A)
    if S & K:
        raise SurgeryError(f"S meets the royal part at {sorted(S & K)}")
    if S == set(A.elements):
        return False
    for conj in _gamma_conjuncts(nf):
        for a in A.elements:
            if a in S:
                continue
            W = witness_set(A, a, conj)
            if W & S and not (W - S):
                return False
    return True


def remove_segment(A: Structure, nf, S: Iterable[int]) -> Structure:
    S = set(int(a) for a in S)
    if not S:
        return A
    if not is_redundant_segment(A, nf, S):
        raise SurgeryError("segment is not redundant")
    out = A.induced([a for a in A.elements if a not in S])
    v = check_model(out, nf)
    if not v.ok:
        raise SurgeryError(f"removal did not yield a model: {v}")
    return out


def saturation_rounds(A: Structure, nf, rounds: int):
    """Duplicate every non-royal clique once per round.

    Cliques are taken from the structure at the start of the round; each is
    duplicated against the first other clique with the same splice. Returns
    ``(structure, reports)``.
    """
    reports = []
    for _ in range(rounds):
        part = cliques(A)
        royal, _ = royal_part(A)
        todo = [B for B in part.cliques if B not in set(royal)]
        if not todo:
            break
        for B in todo:
            partner = next((B1 for B0, B1 in duplicable_pairs(A) if B0 == B), None)
            if partner is None:
                continue
            A, rep = duplicate_clique(A, nf, B, partner)
            reports.append(rep)
    return A, reports

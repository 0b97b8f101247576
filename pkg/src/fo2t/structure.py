"""Finite structures, model checking, cliques, splices and connection types.

A structure over a signature is stored densely: ``tp1[a]`` is the 1-type code
of element ``a`` and ``cross[a, b]`` (for ``a != b``) the cross part of the
2-type of ``(a, b)``; ``cross[b, a]`` is always the flip of ``cross[a, b]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .formula import Signature
from .typetable import Direction, TypeLayout, layout


class StructureError(ValueError):
    pass


class NonTransitiveError(StructureError):
    def __init__(self, triple):
        self.triple = triple
        a, b, c = triple
        super().__init__(f"T is not transitive: T({a},{b}) and T({b},{c}) but not T({a},{c})")


@lru_cache(maxsize=None)
def flip_table(lay: TypeLayout) -> np.ndarray:
    table = np.array([lay.flip_cross(c) for c in range(lay.n_cross)], dtype=np.int64)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=1024)
def _unary_remap_table(old: Signature, new: Signature) -> np.ndarray:
    codes = np.arange(layout(old).n_one, dtype=np.int64)
    out = np.zeros_like(codes)
    for i, p in enumerate(new.unary):
        if p in old.unary:
            out |= ((codes >> old.unary.index(p)) & 1) << i
    for r in range(new.k):
        out |= ((codes >> (old.u + r)) & 1) << (new.u + r)
    out.setflags(write=False)
    return out


class Structure:
    """Immutable finite structure; build new ones with :class:`StructureBuilder`."""

    __slots__ = ("sig", "layout", "tp1", "cross", "_hash")

    def __init__(self, sig: Signature, tp1, cross, validate: bool = True):
        lay = layout(sig)
        tp1 = np.array(tp1, dtype=np.int64).reshape(-1)
        n = tp1.shape[0]
        if n == 0:
            raise StructureError("structures have nonempty universes")
        cross = np.array(cross, dtype=np.int64).reshape(n, n)
        np.fill_diagonal(cross, 0)
        if validate:
            if np.any((tp1 < 0) | (tp1 >= lay.n_one)):
                raise StructureError("1-type code out of range")
            if np.any((cross < 0) | (cross >= lay.n_cross)):
                raise StructureError("cross code out of range")
            if not np.array_equal(flip_table(lay)[cross].T, cross):
                raise StructureError("cross types are not flip-consistent")
        tp1.setflags(write=False)
        cross.setflags(write=False)
        self.sig = sig
        self.layout = lay
        self.tp1 = tp1
        self.cross = cross
        self._hash = None

    # construction helpers

    @classmethod
    def from_pairs(cls, sig: Signature, tp1: Sequence[int], pairs: dict) -> "Structure":
        """Build from 1-types and ``{(i, j): cross}`` for i < j; missing pairs get 0."""
        b = StructureBuilder(sig, len(tp1))
        for i, t in enumerate(tp1):
            b.set_one(i, t)
        for (i, j), c in pairs.items():
            b.set_cross(i, j, c)
        return b.build()

    @classmethod
    def from_relations(cls, sig: Signature, unary: np.ndarray, binary: np.ndarray) -> "Structure":
        lay = layout(sig)
        n = binary.shape[0]
        tp1 = np.zeros(n, dtype=np.int64)
        for i in range(sig.u):
            tp1 |= unary[:, i].astype(np.int64) << i
        cross = np.zeros((n, n), dtype=np.int64)
        for r in range(sig.k):
            rel = binary[:, :, r].astype(np.int64)
            tp1 |= np.diagonal(rel) << (lay.u + r)
            cross |= (rel << (2 * r)) | (rel.T << (2 * r + 1))
        return cls(sig, tp1, cross)

    @classmethod
    def chain(cls, n: int, sig: Signature | None = None) -> "Structure":
        """Strict chain 0 < 1 < ... < n-1 with every other atom false."""
        sig = sig or Signature()
        lay = layout(sig)
        fwd = 1 << lay.t_cross_bit
        return cls.from_pairs(sig, [0] * n, {(i, j): fwd for i in range(n) for j in range(i + 1, n)})

    # accessors

    @property
    def n(self) -> int:
        return int(self.tp1.shape[0])

    def __len__(self):
        return self.n

    @property
    def elements(self) -> range:
        return range(self.n)

    def tp2(self, a: int, b: int) -> int:
        if a == b:
            raise StructureError("2-types are defined for distinct elements only")
        return self.layout.pack(int(self.tp1[a]), int(self.tp1[b]), int(self.cross[a, b]))

    def tp2_matrix(self) -> np.ndarray:
        w = self.layout.w
        return self.tp1[:, None] | (self.tp1[None, :] << w) | (self.cross << (2 * w))

    def t(self, a: int, b: int) -> bool:
        lay = self.layout
        if a == b:
            return bool((self.tp1[a] >> lay.t_diag_bit) & 1)
        return bool((self.cross[a, b] >> lay.t_cross_bit) & 1)

    def t_matrix(self) -> np.ndarray:
        lay = self.layout
        m = ((self.cross >> lay.t_cross_bit) & 1).astype(bool)
        np.fill_diagonal(m, ((self.tp1 >> lay.t_diag_bit) & 1).astype(bool))
        return m

    def direction(self, a: int, b: int) -> Direction:
        return self.layout.cross_direction(int(self.cross[a, b]))

    def relations(self) -> tuple[np.ndarray, np.ndarray]:
        """Boolean arrays ``U[a, i]`` and ``B[a, b, r]``."""
        lay = self.layout
        U = np.stack([(self.tp1 >> i) & 1 for i in range(lay.u)], axis=1).astype(bool) if lay.u else np.zeros((self.n, 0), bool)
        B = np.zeros((self.n, self.n, lay.k), dtype=bool)
        for r in range(lay.k):
            rel = ((self.cross >> (2 * r)) & 1).astype(bool)
            np.fill_diagonal(rel, ((self.tp1 >> (lay.u + r)) & 1).astype(bool))
            B[:, :, r] = rel
        return U, B

    # derived structures

    def induced(self, elements: Iterable[int]) -> "Structure":
        """Substructure on ``elements``, renumbered in the given order."""
        idx = np.array(list(elements), dtype=np.int64)
        if len(set(idx.tolist())) != len(idx):
            raise StructureError("repeated element in induced substructure")
        return Structure(self.sig, self.tp1[idx], self.cross[np.ix_(idx, idx)], validate=False)

    @classmethod
    def _raw(cls, sig: Signature, tp1: np.ndarray, cross: np.ndarray) -> "Structure":
        # trusted fast path: arrays are already int64, shaped and read-only
        A = object.__new__(cls)
        A.sig = sig
        A.layout = layout(sig)
        A.tp1 = tp1
        A.cross = cross
        A._hash = None
        return A

    def _remap_unary(self, sig: Signature, unary_values: dict) -> "Structure":
        # same binary symbols: only the 1-type bits move, cross codes are shared
        out = _unary_remap_table(self.sig, sig)[self.tp1]
        for i, p in enumerate(sig.unary):
            if p not in self.sig.unary and p in unary_values:
                out |= np.asarray(unary_values[p], dtype=bool).astype(np.int64) << i
        out.setflags(write=False)
        return Structure._raw(sig, out, self.cross)

    def expand(self, sig: Signature, unary_values: dict | None = None) -> "Structure":
        """Expansion to a larger signature; new symbols default to false."""
        unary_values = unary_values or {}
        if sig.binary == self.sig.binary:
            return self._remap_unary(sig, unary_values)
        U, B = self.relations()
        newU = np.zeros((self.n, sig.u), dtype=bool)
        for i, p in enumerate(sig.unary):
            if p in self.sig.unary:
                newU[:, i] = U[:, self.sig.unary.index(p)]
            elif p in unary_values:
                newU[:, i] = np.asarray(unary_values[p], dtype=bool)
        newB = np.zeros((self.n, self.n, sig.k), dtype=bool)
        for r, name in enumerate(sig.binary):
            if name in self.sig.binary:
                newB[:, :, r] = B[:, :, self.sig.binary.index(name)]
        return Structure.from_relations(sig, newU, newB)

    def reduct(self, sig: Signature) -> "Structure":
        missing = [p for p in sig.unary + sig.binary if self.sig.arity(p) is None]
        if missing:
            raise StructureError(f"reduct to symbols not in the structure: {missing}")
        if sig.binary == self.sig.binary:
            return self._remap_unary(sig, {})
        U, B = self.relations()
        ui = [self.sig.unary.index(p) for p in sig.unary]
        bi = [self.sig.binary.index(r) for r in sig.binary]
        return Structure.from_relations(sig, U[:, ui], B[:, :, bi])

    def builder(self) -> "StructureBuilder":
        b = StructureBuilder(self.sig, self.n)
        b.tp1[:] = self.tp1
        b.cross[:, :] = self.cross
        return b

    # value semantics

    def key(self) -> tuple:
        return (self.sig, self.tp1.tobytes(), self.cross.tobytes())

    def __eq__(self, other):
        return isinstance(other, Structure) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"Structure(n={self.n}, sig=<{self.sig}>)"

    def describe(self) -> str:
        lay = self.layout
        lines = [f"element {a}: {lay.format_one(int(self.tp1[a]))}" for a in self.elements]
        for a in self.elements:
            for b in range(a + 1, self.n):
                lines.append(f"pair {a} {b}: {lay.format_cross(int(self.cross[a, b]))}")
        return "\n".join(lines)


class StructureBuilder:
    """Mutable staging area; ``build()`` validates and freezes."""

    def __init__(self, sig: Signature, n: int):
        self.sig = sig
        self.layout = layout(sig)
        self.tp1 = np.zeros(n, dtype=np.int64)
        self.cross = np.zeros((n, n), dtype=np.int64)
        self._flip = flip_table(self.layout)

    @property
    def n(self) -> int:
        return self.tp1.shape[0]

    def set_one(self, a: int, alpha: int):
        self.tp1[a] = alpha

    def set_cross(self, a: int, b: int, c: int):
        if a == b:
            raise StructureError("no cross type on the diagonal")
        self.cross[a, b] = c
        self.cross[b, a] = self._flip[c]

    def set_t(self, a: int, b: int, value: bool = True):
        sh = self.layout.t_cross_bit
        c = int(self.cross[a, b])
        c = (c | (1 << sh)) if value else (c & ~(1 << sh))
        self.set_cross(a, b, c)

    def add_elements(self, count: int) -> list[int]:
        n = self.n
        self.tp1 = np.concatenate([self.tp1, np.zeros(count, dtype=np.int64)])
        cross = np.zeros((n + count, n + count), dtype=np.int64)
        cross[:n, :n] = self.cross
        self.cross = cross
        return list(range(n, n + count))

    def build(self) -> Structure:
        return Structure(self.sig, self.tp1, self.cross)


# Model checking -------------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    condition: str
    message: str
    witness: tuple = ()

    def __str__(self):
        return f"({self.condition}) {self.message}"


@dataclass
class ModelVerdict:
    """Outcome of checking the normal-form conditions.

    Conditions: (a) γ-witnesses, (b) δ-witnesses, (c) ψ₀ on pairs and on the
    diagonal, (d) transitivity, (e) global existential conjuncts.
    """

    failures: list[Failure] = field(default_factory=list)
    frontier: frozenset = frozenset()
    frontier_missing: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    @property
    def first(self) -> Failure | None:
        return self.failures[0] if self.failures else None

    @property
    def condition(self) -> str | None:
        return self.failures[0].condition if self.failures else None

    def __str__(self):
        if self.ok:
            text = "pass"
            if self.frontier_missing:
                text += f" ({len(self.frontier_missing)} frontier witness gaps reported)"
            return text
        return f"fail {self.failures[0]}"


def transitivity_violation(A: Structure) -> tuple[int, int, int] | None:
    """Lexicographically first (a, b, c) with T(a,b), T(b,c), not T(a,c)."""
    Tm = A.t_matrix()
    Ti = Tm.astype(np.int64)
    bad = ((Ti @ Ti) > 0) & ~Tm
    if not bad.any():
        return None
    best = None
    for a, c in zip(*np.nonzero(bad)):
        bs = np.nonzero(Tm[a] & Tm[:, c])[0]
        cand = (int(a), int(bs[0]), int(c))
        if best is None or cand < best:
            best = cand
    return best


def is_transitive(A: Structure) -> bool:
    return transitivity_violation(A) is None


def _check_signature(A: Structure, nf):
    if A.sig != nf.signature:
        raise StructureError(f"signature mismatch: structure <{A.sig}> vs normal form <{nf.signature}>")


def check_model(A: Structure, nf, frontier: Iterable[int] = ()) -> ModelVerdict:
    """Check A against a normal form.

    Elements in ``frontier`` are exempt from (a) and (b); their missing
    witnesses are listed in ``frontier_missing`` instead.
    """
    _check_signature(A, nf)
    ev = nf.evaluators()
    frontier = frozenset(int(a) for a in frontier)
    verdict = ModelVerdict(frontier=frontier)
    n = A.n
    M = A.tp2_matrix()
    off = ~np.eye(n, dtype=bool)
    for conj, prem_fn, mat_fn in zip(nf.existentials, ev.premises, ev.matrices):
        prem = np.asarray(prem_fn(A.tp1)).astype(bool)
        has = (np.asarray(mat_fn(M)).astype(bool) & off).any(axis=1)
        cond = "b" if conj.direction is Direction.BOTH else "a"
        kind = "δ" if cond == "b" else "γ"
        for a in np.nonzero(prem & ~has)[0]:
            a = int(a)
            if a in frontier:
                verdict.frontier_missing.append((a, conj.index))
                continue
            verdict.failures.append(
                Failure(cond, f"element {a} has no {kind}{conj.index}-witness", (a, conj.index))
            )
    # keep the documented order (a) before (b)
    verdict.failures.sort(key=lambda f: f.condition)
    pair_ok = np.asarray(ev.psi0_pair(M)).astype(bool)
    bad_pairs = np.argwhere(off & ~pair_ok)
    for a, b in bad_pairs:
        verdict.failures.append(Failure("c", f"psi0 fails on pair ({a},{b})", (int(a), int(b))))
    diag_ok = np.asarray(ev.psi0_diag(A.tp1)).astype(bool)
    for a in np.nonzero(~diag_ok)[0]:
        verdict.failures.append(Failure("c", f"psi0 fails on diagonal ({a},{a})", (int(a), int(a))))
    tri = transitivity_violation(A)
    if tri is not None:
        verdict.failures.append(Failure("d", f"transitivity fails at {tri}", tri))
    for idx, fn in enumerate(ev.globals_):
        if not np.asarray(fn(A.tp1)).astype(bool).any():
            verdict.failures.append(
                Failure("e", f"no element satisfies global existential {idx + 1}", (idx + 1,))
            )
    return verdict


# Cliques and splices ----------------------------------------------------------------


@dataclass(frozen=True)
class CliquePartition:
    cliques: tuple[tuple[int, ...], ...]
    clique_of: tuple[int, ...]
    order: frozenset  # pairs (i, j) of clique ids with clique i below clique j

    def less(self, i: int, j: int) -> bool:
        return (i, j) in self.order

    def incomparable(self, i: int, j: int) -> bool:
        return i != j and not self.less(i, j) and not self.less(j, i)

    def of(self, a: int) -> tuple[int, ...]:
        return self.cliques[self.clique_of[a]]

    def is_strict_partial_order(self) -> bool:
        if any(i == j for i, j in self.order):
            return False
        for (i, j), (k, l) in itertools.product(self.order, repeat=2):
            if j == k and (i, l) not in self.order:
                return False
        return True


def _mutual_components(A: Structure) -> list[list[int]]:
    Tm = A.t_matrix()
    mutual = Tm & Tm.T
    seen = [-1] * A.n
    comps: list[list[int]] = []
    for s in A.elements:
        if seen[s] >= 0:
            continue
        stack, comp = [s], []
        seen[s] = len(comps)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in np.nonzero(mutual[a])[0]:
                b = int(b)
                if seen[b] < 0:
                    seen[b] = len(comps)
                    stack.append(b)
        comps.append(sorted(comp))
    return comps


def _partition(A: Structure, comps: list[list[int]]) -> CliquePartition:
    comps = sorted(comps, key=lambda c: c[0])
    clique_of = [0] * A.n
    for i, c in enumerate(comps):
        for a in c:
            clique_of[a] = i
    Tm = A.t_matrix()
    order = set()
    for i, ci in enumerate(comps):
        for j, cj in enumerate(comps):
            if i == j:
                continue
            block = Tm[np.ix_(ci, cj)]
            back = Tm[np.ix_(cj, ci)]
            if block.all() and not back.any():
                order.add((i, j))
    return CliquePartition(tuple(tuple(c) for c in comps), tuple(clique_of), frozenset(order))


def cliques(A: Structure) -> CliquePartition:
    """Clique partition and clique order; T must be transitive."""
    tri = transitivity_violation(A)
    if tri is not None:
        raise NonTransitiveError(tri)
    return _partition(A, _mutual_components(A))


def order_condition(A: Structure) -> bool:
    """Clique-side characterization of transitivity, evaluated on any structure.

    Candidate cliques are the components of the mutual-T graph. The condition
    holds iff every in-component pair is a ↔ pair, every element of a
    component of size ≥ 2 is T-reflexive, every cross-component T edge runs
    from a lower to an upper component, and the component order is a strict
    partial order.
    """
    comps = _mutual_components(A)
    Tm = A.t_matrix()
    for c in comps:
        if len(c) >= 2:
            sub = Tm[np.ix_(c, c)]
            if not sub.all():
                return False
    part = _partition(A, comps)
    for a in A.elements:
        for b in A.elements:
            ia, ib = part.clique_of[a], part.clique_of[b]
            if ia != ib and Tm[a, b] and not part.less(ia, ib):
                return False
    return part.is_strict_partial_order()


def canonical_form(A: Structure) -> tuple:
    """Minimal encoding over element orderings that sort 1-types.

    Cost is the product of factorials of the 1-type class sizes; intended for
    cliques and other small structures.
    """
    groups: dict[int, list[int]] = {}
    for a in A.elements:
        groups.setdefault(int(A.tp1[a]), []).append(a)
    keys = sorted(groups)
    types = tuple(t for t in keys for _ in groups[t])
    best = None
    for combo in itertools.product(*(itertools.permutations(groups[t]) for t in keys)):
        order = [a for part in combo for a in part]
        enc = tuple(int(A.cross[order[i], order[j]]) for i in range(len(order)) for j in range(i + 1, len(order)))
        if best is None or enc < best:
            best = enc
    return (A.sig, types, best)


@dataclass(frozen=True)
class Splice:
    clique_iso_class: tuple
    In: frozenset
    Out: frozenset


def splice(A: Structure, C: Iterable[int], part: CliquePartition | None = None) -> Splice:
    part = part or cliques(A)
    C = tuple(sorted(C))
    if not C or part.of(C[0]) != C:
        raise StructureError(f"{C} is not a clique")
    cid = part.clique_of[C[0]]
    ins, outs = set(), set()
    for a in A.elements:
        other_id = part.clique_of[a]
        if part.less(other_id, cid):
            ins.add(int(A.tp1[a]))
        elif part.less(cid, other_id):
            outs.add(int(A.tp1[a]))
    return Splice(canonical_form(A.induced(C)), frozenset(ins), frozenset(outs))


def royal_part(A: Structure) -> tuple[list[tuple[int, ...]], frozenset]:
    """Cliques whose splice no other clique realizes, and their union."""
    part = cliques(A)
    spl = [splice(A, c, part) for c in part.cliques]
    counts: dict[Splice, int] = {}
    for s in spl:
        counts[s] = counts.get(s, 0) + 1
    royal = [c for c, s in zip(part.cliques, spl) if counts[s] == 1]
    return royal, frozenset(a for c in royal for a in c)


def witness_set(A: Structure, a: int, conj, nf=None) -> set[int]:
    """Proper witnesses of ``a`` for an existential conjunct."""
    fn = conj.matrix_fn(A.sig)
    return {b for b in A.elements if b != a and fn(A.tp2(a, b))}


# Connection types ------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionType:
    """Cross types between disjoint sets B and C of a source structure."""

    source: Structure
    B: tuple[int, ...]
    C: tuple[int, ...]
    cross: tuple[tuple[int, ...], ...]

    def type_set(self) -> frozenset:
        lay = self.source.layout
        return frozenset(
            lay.pack(int(self.source.tp1[b]), int(self.source.tp1[c]), self.cross[i][j])
            for i, b in enumerate(self.B)
            for j, c in enumerate(self.C)
        )


def connection_type(A: Structure, B: Iterable[int], C: Iterable[int]) -> ConnectionType:
    B, C = tuple(B), tuple(C)
    if set(B) & set(C):
        raise StructureError("connection type needs disjoint sets")
    return ConnectionType(A, B, C, tuple(tuple(int(A.cross[b, c]) for c in C) for b in B))


def is_isomorphism(A: Structure, X: Sequence[int], B: Structure, f: dict) -> bool:
    """Whether ``f`` maps A restricted to X isomorphically onto its image in B."""
    X = list(X)
    if sorted(f) != sorted(X) or len(set(f.values())) != len(X):
        return False
    for a in X:
        if A.tp1[a] != B.tp1[f[a]]:
            return False
    for a, b in itertools.combinations(X, 2):
        if A.cross[a, b] != B.cross[f[a], f[b]]:
            return False
    return True


def transfer(target: Structure, fB: dict, fC: dict, conn: ConnectionType) -> Structure:
    """Overwrite the cross types between dom(fB) and dom(fC) with pulled-back ones."""
    src = conn.source
    if set(fB.values()) != set(conn.B) or set(fC.values()) != set(conn.C):
        raise StructureError("maps must be onto the connection's sets")
    if set(fB) & set(fC):
        raise StructureError("transfer needs disjoint target sets")
    if not is_isomorphism(target, list(fB), src, fB):
        raise StructureError("map on B is not an isomorphism of induced substructures")
    if not is_isomorphism(target, list(fC), src, fC):
        raise StructureError("map on C is not an isomorphism of induced substructures")
    bi = {b: i for i, b in enumerate(conn.B)}
    ci = {c: j for j, c in enumerate(conn.C)}
    bld = target.builder()
    for b2, b in fB.items():
        for c2, c in fC.items():
            bld.set_cross(b2, c2, conn.cross[bi[b]][ci[c]])
    return bld.build()


def find_isomorphism(
    A: Structure,
    X: Sequence[int],
    B: Structure,
    Y: Sequence[int],
    fixed: dict | None = None,
    extra_check=None,
):
    """Backtracking search for an isomorphism A|X -> B|Y.

    ``extra_check(f, a, image)`` may veto partial extensions. Returns a dict
    or ``None``.
    """
    for f in iter_isomorphisms(A, X, B, Y, fixed, extra_check):
        return f
    return None


def iter_isomorphisms(A, X, B, Y, fixed=None, extra_check=None):
    X, Y = list(X), list(Y)
    if len(X) != len(Y):
        return
    if sorted(int(A.tp1[a]) for a in X) != sorted(int(B.tp1[b]) for b in Y):
        return
    f: dict = dict(fixed or {})
    used = set(f.values())
    order = [a for a in X if a not in f]

    def rec(i):
        if i == len(order):
            yield dict(f)
            return
        a = order[i]
        for b in Y:
            if b in used or A.tp1[a] != B.tp1[b]:
                continue
            if any(A.cross[a, a2] != B.cross[b, f[a2]] for a2 in f):
                continue
            if extra_check is not None and not extra_check(f, a, b):
                continue
            f[a] = b
            used.add(b)
            yield from rec(i + 1)
            del f[a]
            used.discard(b)

    for a, b in f.items():
        if A.tp1[a] != B.tp1[b]:
            return
    yield from rec(0)


def is_isomorphic(A: Structure, B: Structure) -> bool:
    if A.sig != B.sig or A.n != B.n:
        return False
    return find_isomorphism(A, list(A.elements), B, list(B.elements)) is not None


# Partial-order extension -------------------------------------------------------------


def extend_partial_order(R: Iterable[tuple], a, b) -> frozenset:
    """Least strict partial order containing R and (a, b), for incomparable a, b."""
    R = frozenset(R)
    if (a, b) in R or (b, a) in R or a == b:
        raise ValueError("a and b must be distinct and incomparable")
    down = {c for (c, d) in R if d == a} | {a}
    up = {d for (c, d) in R if c == b} | {b}
    return R | frozenset((c, d) for c in down for d in up)


def place_below(A: Structure, B: Iterable[int], C: Iterable[int]) -> Structure:
    """Make clique B lie below clique C by the minimal order extension.

    Pairs outside the closure keep their types; the affected pairs become
    one-directional T pairs with their other cross bits kept.
    """
    part = cliques(A)
    ib, ic = part.clique_of[min(B)], part.clique_of[min(C)]
    new_order = extend_partial_order(part.order, ib, ic)
    bld = A.builder()
    for i, j in new_order - part.order:
        for c in part.cliques[i]:
            for d in part.cliques[j]:
                bld.set_t(c, d, True)
                bld.set_t(d, c, False)
    return bld.build()

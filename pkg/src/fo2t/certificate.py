"""Four-segment certificates of infinite satisfiability.

A certificate is a finite structure with a partition ``S0, S1, S2, S3``.
When ``S1 = S2 = S3 = ∅`` it is simply a finite model. Otherwise the
connection types between segments repeat (``<S0,S1> ≈ <S0,S2> ≈ <S0,S3>``
and ``<S1,S2> ≈ <S2,S3> ≈ <S1,S3>``), and every element of ``S0, S1, S2``
finds its γ-witnesses in ``S0`` or the next segment. Repeating ``S1``
forever then yields an infinite model; :func:`unfold` builds its prefixes.

Conditions are numbered as follows:

* ``1`` size at most ``4·M`` (only when bound parameters are given)
* ``2a`` ``<S0,S2>`` and ``<S0,S3>`` equivalent to ``<S0,S1>``
* ``2b`` ``<S2,S3>`` and ``<S1,S3>`` equivalent to ``<S1,S2>``
* ``3`` ``psi0`` on every pair and on the diagonal
* ``4`` T transitive
* ``5`` γ-witnesses in ``S0`` or ``S_{j+1}`` for ``a ∈ S_j``, ``j = 0, 1, 2``
* ``6`` δ-witnesses inside the element's clique
* ``E`` global existential conjuncts
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .model_finder import BudgetExhausted, SearchConfig, find_finite_model
from .model_finder.tables import SearchTables, compile_tables
from .normal_form import NormalForm, canonical_expansion
from .structure import (
    Structure,
    StructureBuilder,
    _mutual_components,
    check_model,
    is_isomorphism,
    iter_isomorphisms,
    transitivity_violation,
)
from .typetable import Direction, layout

CONDITIONS = ("1", "2a", "2b", "3", "4", "5", "6", "E")
_FINITE_MAP = {"a": "5", "b": "6", "c": "3", "d": "4", "e": "E"}

# ((j', k'), (j, k)) pairs whose equivalence each condition asserts
EQUIVALENCES = {
    "2a": (((0, 2), (0, 1)), ((0, 3), (0, 1))),
    "2b": (((2, 3), (1, 2)), ((1, 3), (1, 2))),
}


class CertificateError(ValueError):
    """Malformed certificate or unsupported normal form."""


class NothingToUnfold(CertificateError):
    pass


def _require_transitive_witnesses(nf: NormalForm):
    if not nf.is_transitive_witness_form():
        labels = ", ".join(c.label() for c in nf.extra_gammas_free)
        raise CertificateError(
            "certificates only characterize the transitive-witness fragment; "
            f"conjuncts {labels} use free witnesses (¬Txy ∧ ¬Tyx), for which "
            "no bounded-segment characterization holds"
        )


# Bounds --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    m: int
    s: int
    h: int
    M: int
    log2_s_ceiling: float | None = None

    def __str__(self):
        text = f"m={self.m} s={self.s} h={self.h} M={self.M}"
        if self.log2_s_ceiling is not None:
            text += f" (splice count ceiling 2^{self.log2_s_ceiling:.1f})"
        return text


def splice_ceiling_log2(nf: NormalForm, h: int) -> float:
    """log2 of the count of possible splices with cliques of size ≤ h.

    A splice is a clique isomorphism type plus two sets of 1-types, so there
    are at most ``sum_i n1^i · nc^(i(i-1)/2) · 4^n1`` of them.
    """
    lay = layout(nf.signature)
    n1, nc = lay.n_one, lay.n_cross
    iso = sum(n1 ** i * nc ** (i * (i - 1) // 2) for i in range(1, h + 1))
    return math.log2(iso) + 2 * n1


def compute_M(nf: NormalForm, s: int, h: int) -> BoundParams:
    if s < 1 or h < 1:
        raise ValueError("s and h must be at least 1")
    m = nf.m if isinstance(nf, NormalForm) else int(nf)
    ceiling = splice_ceiling_log2(nf, h) if isinstance(nf, NormalForm) else None
    return BoundParams(m, s, h, (m + 1) * s * s * h, ceiling)


# Certificates ----------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    structure: Structure
    segments: tuple
    seg_maps: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        segs = tuple(tuple(sorted(int(a) for a in s)) for s in self.segments)
        segs = segs + ((),) * (4 - len(segs))
        object.__setattr__(self, "segments", segs)
        _validate_partition(self.structure, segs)

    @property
    def finite(self) -> bool:
        return not any(self.segments[1:])

    @property
    def size(self) -> int:
        return self.structure.n

    def segment_of(self, a: int) -> int:
        for j, seg in enumerate(self.segments):
            if a in seg:
                return j
        raise KeyError(a)

    def with_maps(self, maps: dict) -> "Certificate":
        return Certificate(self.structure, self.segments, dict(maps))


def _validate_partition(A: Structure, segs):
    if len(segs) != 4:
        raise CertificateError(f"expected 4 segments, got {len(segs)}")
    seen = [a for s in segs for a in s]
    if sorted(seen) != list(range(A.n)):
        raise CertificateError("segments must partition the universe")
    rest = segs[1:]
    if any(rest) and not all(rest):
        raise CertificateError("either S1 = S2 = S3 = ∅ or all four segments are nonempty")
    if not segs[0] and not any(rest):
        raise CertificateError("empty certificate")
    if transitivity_violation(A) is not None:
        # cliques are only defined for transitive T; condition 4 reports it
        return
    where = {a: j for j, s in enumerate(segs) for a in s}
    for C in _mutual_components(A):
        if len({where[a] for a in C}) > 1:
            raise CertificateError(f"clique {list(C)} meets several segments")


# Connection-type equivalence ---------------------------------------------------------


@dataclass(frozen=True)
class NotEquivalent:
    reason: str

    def __bool__(self):
        return False

    def __str__(self):
        return f"NotEquivalent({self.reason})"


def _cross_multiset(A: Structure, X, Y) -> list:
    lay = A.layout
    return sorted(lay.pack(int(A.tp1[x]), int(A.tp1[y]), int(A.cross[x, y])) for x in X for y in Y)


def is_transfer(A: Structure, source, target, f: dict) -> bool:
    """Whether ``f`` shows <source> ≡ <target>: an isomorphism of the unions
    mapping ``source[0]`` onto ``target[0]`` and ``source[1]`` onto ``target[1]``."""
    (Xj, Xk), (Yj, Yk) = source, target
    if {f.get(a) for a in Xj} != set(Yj) or {f.get(a) for a in Xk} != set(Yk):
        return False
    return is_isomorphism(A, list(Xj) + list(Xk), A, f)


def iter_transfers(A: Structure, source, target):
    (Xj, Xk), (Yj, Yk) = source, target
    if len(Xj) != len(Yj) or len(Xk) != len(Yk):
        return
    side = {a: set(Yj) for a in Xj}
    side.update({a: set(Yk) for a in Xk})
    X = list(Xj) + list(Xk)
    yield from iter_isomorphisms(A, X, A, list(Yj) + list(Yk), extra_check=lambda f, a, b: b in side[a])


def connection_equiv(A: Structure, source, target):
    """Maps showing ``<source[0], source[1]> ≈ <target[0], target[1]>``.

    Returns a dict sending ``source[0] ∪ source[1]`` onto
    ``target[0] ∪ target[1]`` segment-wise, or :class:`NotEquivalent`.
    """
    (Xj, Xk), (Yj, Yk) = source, target
    if len(Xj) != len(Yj) or len(Xk) != len(Yk):
        return NotEquivalent("segment sizes differ")
    if sorted(int(A.tp1[a]) for a in Xj) != sorted(int(A.tp1[a]) for a in Yj) or sorted(
        int(A.tp1[a]) for a in Xk
    ) != sorted(int(A.tp1[a]) for a in Yk):
        return NotEquivalent("1-type multisets differ")
    if _cross_multiset(A, Xj, Xk) != _cross_multiset(A, Yj, Yk):
        return NotEquivalent("cross 2-type multisets differ")
    for f in iter_transfers(A, source, target):
        return f
    return NotEquivalent("no pair of isomorphisms transfers the connection type")


# Checking --------------------------------------------------------------------------


@dataclass(frozen=True)
class CertFailure:
    condition: str
    message: str
    witness: tuple = ()

    def __str__(self):
        return f"condition {self.condition}: {self.message}"


@dataclass
class CertificateVerdict:
    failures: list = field(default_factory=list)
    maps: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    finite: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    @property
    def condition(self) -> str | None:
        return self.failures[0].condition if self.failures else None

    @property
    def first(self) -> CertFailure | None:
        return self.failures[0] if self.failures else None

    def conditions(self) -> list:
        return sorted({f.condition for f in self.failures}, key=CONDITIONS.index)

    def __str__(self):
        kind = "finite" if self.finite else "infinite"
        if self.ok:
            lines = [f"pass ({kind} certificate)"]
        else:
            lines = [f"fail ({kind} certificate), first violated {self.failures[0]}"]
            lines += [f"  {f}" for f in self.failures[1:]]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def _sorted_failures(failures):
    return sorted(failures, key=lambda f: CONDITIONS.index(f.condition))


def check_certificate(
    c: Certificate,
    nf: NormalForm,
    bounds: BoundParams | None = None,
    research_maps: bool = False,
) -> CertificateVerdict:
    """Check every condition and report all failures, condition order first.

    Stored maps are replayed; maps that are missing (or every map, with
    ``research_maps``) are searched for.
    """
    _require_transitive_witnesses(nf)
    A = c.structure
    if A.sig != nf.signature:
        raise CertificateError(f"signature mismatch: certificate <{A.sig}> vs normal form <{nf.signature}>")
    verdict = CertificateVerdict(finite=c.finite)
    failures = []
    if bounds is not None and A.n > 4 * bounds.M:
        failures.append(CertFailure("1", f"{A.n} elements exceed 4·M = {4 * bounds.M}", (A.n,)))
    elif bounds is None:
        verdict.notes.append("condition 1 not checked (no bound parameters)")
    if c.finite:
        mv = check_model(A, nf)
        for f in mv.failures:
            failures.append(CertFailure(_FINITE_MAP[f.condition], f.message, f.witness))
        verdict.failures = _sorted_failures(failures)
        return verdict
    S = c.segments
    for cond, pairs in EQUIVALENCES.items():
        for left, right in pairs:
            source = (S[left[0]], S[left[1]])
            target = (S[right[0]], S[right[1]])
            stored = None if research_maps else c.seg_maps.get((left, right))
            name = f"<S{left[0]},S{left[1]}> ≈ <S{right[0]},S{right[1]}>"
            if stored is not None:
                if is_transfer(A, source, target, stored):
                    verdict.maps[(left, right)] = dict(stored)
                else:
                    failures.append(CertFailure(cond, f"stored map does not show {name}", (left, right)))
                continue
            found = connection_equiv(A, source, target)
            if found:
                verdict.maps[(left, right)] = found
            else:
                failures.append(CertFailure(cond, f"{name} fails: {found.reason}", (left, right)))
    failures += _local_failures(A, nf, S)
    verdict.failures = _sorted_failures(failures)
    return verdict


def _local_failures(A: Structure, nf: NormalForm, S) -> list:
    out = []
    ev = nf.evaluators()
    M = A.tp2_matrix()
    n = A.n
    off = ~np.eye(n, dtype=bool)
    pair_ok = np.asarray(ev.psi0_pair(M)).astype(bool)
    for a, b in np.argwhere(off & ~pair_ok):
        if a < b or not (off & ~pair_ok)[b, a]:
            out.append(CertFailure("3", f"psi0 fails on pair ({a},{b})", (int(a), int(b))))
    diag_ok = np.broadcast_to(np.asarray(ev.psi0_diag(A.tp1)).astype(bool), (n,))
    for a in np.nonzero(~diag_ok)[0]:
        out.append(CertFailure("3", f"psi0 fails on diagonal ({a},{a})", (int(a), int(a))))
    tri = transitivity_violation(A)
    if tri is not None:
        out.append(CertFailure("4", f"transitivity fails at {tri}", tri))
    comp = {a: C for C in _mutual_components(A) for a in C}
    seg_of = np.zeros(n, dtype=np.int64)
    for j, seg in enumerate(S):
        seg_of[list(seg)] = j
    for conj, prem_fn, mat_fn in zip(nf.existentials, ev.premises, ev.matrices):
        prem = np.broadcast_to(np.asarray(prem_fn(A.tp1)).astype(bool), (n,))
        W = np.asarray(mat_fn(M)).astype(bool) & off
        for a in np.nonzero(prem)[0]:
            a = int(a)
            if conj.direction is Direction.BOTH:
                if not any(W[a, b] for b in comp[a]):
                    out.append(CertFailure("6", f"element {a} has no δ{conj.index}-witness in its clique", (a, conj.index)))
                continue
            j = int(seg_of[a])
            if j == 3:
                continue
            if W[a, list(S[0])].any():
                continue
            if not W[a, list(S[j + 1])].any():
                out.append(
                    CertFailure(
                        "5",
                        f"element {a} in S{j} has no γ{conj.index}-witness in S0 or S{j + 1}",
                        (a, conj.index, j),
                    )
                )
    for idx, fn in enumerate(ev.globals_):
        if not np.asarray(fn(A.tp1)).astype(bool).any():
            out.append(CertFailure("E", f"no element satisfies global existential {idx + 1}", (idx + 1,)))
    return out


# Search ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NotFoundUpTo:
    b: int
    nodes: int = 0
    M: int | None = None
    finite_size: int = 0

    @property
    def refutes(self) -> bool:
        return self.M is not None and self.b >= self.M

    def __str__(self):
        text = f"NotFoundUpTo({self.b}): no certificate with segments of size ≤ {self.b}"
        if self.finite_size:
            text += f" and no finite model of size ≤ {self.finite_size}"
        if self.refutes:
            return text + f"; since {self.b} ≥ M = {self.M} the formula is unsatisfiable"
        return text + (
            "; this is not a refutation of satisfiability, which would need "
            "a segment bound of at least M"
        )


class _RegularSearch:
    """Search over regular 4-segment structures with identity-coherent copies.

    ``S2`` and ``S3`` are copies of ``S1``. Pairs between ``S0`` and each copy
    repeat the ``S0 x S1`` codes, and pairs between copies ``i < j`` repeat one
    ``S1 x S2`` block, so both equivalence conditions hold by construction.
    """

    def __init__(self, tables: SearchTables, n0: int, n1: int, node_limit):
        self.t = tables
        self.n0, self.n1 = n0, n1
        self.n = n0 + 3 * n1
        self.limit = -1 if node_limit is None else node_limit
        self.nodes = 0
        self.K = tables.K
        self.C = tables.C
        self.flip = tables.flip
        self.tsh = tables.tsh
        seg0 = list(range(n0))
        copies = [list(range(n0 + i * n1, n0 + (i + 1) * n1)) for i in range(3)]
        self.segments = [seg0] + copies
        self.base = [a for a in seg0] + [p for _ in range(3) for p in range(n0, n0 + n1)]
        # classes: one decision variable shared by several (a, b) pairs, a < b
        classes = []
        for a, b in itertools.combinations(range(n0), 2):
            classes.append([(a, b)])
        for p, q in itertools.combinations(range(n1), 2):
            classes.append([(c[p], c[q]) for c in copies])
        for a in range(n0):
            for p in range(n1):
                classes.append([(a, c[p]) for c in copies])
        for p in range(n1):
            for q in range(n1):
                classes.append([(copies[i][p], copies[j][q]) for i, j in ((0, 1), (0, 2), (1, 2))])
        self.classes = classes
        self.types = [0] * (n0 + n1)
        self.T = np.zeros((self.n, self.n), dtype=bool)
        self.known = np.zeros((self.n, self.n), dtype=bool)
        self.cross = np.zeros((self.n, self.n), dtype=np.int64)

    def _tp(self, a):
        return self.types[self.base[a]]

    def _tick(self):
        self.nodes += 1
        return self.limit >= 0 and self.nodes > self.limit

    def run(self, on_leaf):
        self.on_leaf = on_leaf
        return self._types(0)

    def _types(self, i):
        if i == self.n0 + self.n1:
            for a in range(self.n):
                self.T[a, a] = bool(self.t.tdiag[self._tp(a)])
                self.known[a, a] = True
            return self._pairs(0)
        # symmetry: non-decreasing types within S0 and within S1
        lo = self.types[i - 1] if i not in (0, self.n0) else 0
        for k in range(lo, self.K):
            if self._tick():
                return "budget"
            self.types[i] = k
            r = self._types(i + 1)
            if r:
                return r
        return None

    def _pairs(self, ci):
        if ci == len(self.classes):
            return self.on_leaf(self)
        pairs = self.classes[ci]
        a0, b0 = pairs[0]
        ta, tb = self._tp(a0), self._tp(b0)
        cross_seg = self._seg(a0) != self._seg(b0)
        lo, hi = int(self.t.allow_off[ta * self.K + tb]), int(self.t.allow_off[ta * self.K + tb + 1])
        for idx in range(lo, hi):
            c = int(self.t.allow_codes[idx])
            x, y = (c >> self.tsh) & 1, (c >> (self.tsh + 1)) & 1
            if x and y and (cross_seg or not (self.t.tdiag[ta] and self.t.tdiag[tb])):
                continue
            for a, b in pairs:
                self.T[a, b], self.T[b, a] = bool(x), bool(y)
                self.known[a, b] = self.known[b, a] = True
                self.cross[a, b], self.cross[b, a] = c, int(self.flip[c])
            if self._tick():
                return "budget"
            if self._consistent():
                r = self._pairs(ci + 1)
                if r:
                    return r
            for a, b in pairs:
                self.known[a, b] = self.known[b, a] = False
        return None

    def _seg(self, a):
        if a < self.n0:
            return 0
        return 1 + (a - self.n0) // self.n1

    def _consistent(self) -> bool:
        pos = (self.known & self.T).astype(np.uint8)
        neg = self.known & ~self.T
        return not np.any(((pos @ pos) > 0) & neg)

    def certificate(self) -> Certificate | None:
        t = self.t
        n = self.n
        g_mask, d_mask = t.gamma_mask, t.delta_mask
        seg = [self._seg(a) for a in range(n)]
        wit = np.zeros((n, n), dtype=np.uint64)
        for a in range(n):
            for b in range(n):
                if a != b:
                    wit[a, b] = t.wit[self._tp(a), self._tp(b), self.cross[a, b]]
        full = []
        for a in range(n):
            j = seg[a]
            if j == 3:
                full.append(full[a - 2 * self.n1])
                continue
            ok = [b for b in range(n) if b != a and (seg[b] == 0 or seg[b] == j + 1)]
            avail = 0
            for b in ok:
                avail |= int(wit[a, b]) & g_mask
            for b in range(n):
                if b != a:
                    avail |= int(wit[a, b]) & d_mask
            if j == 2:
                # copies share the 1-type chosen for S1
                if not _feasible(t, self._tp(a), avail):
                    return None
                full.append(full[a - self.n1])
                continue
            try:
                full.append(t.full_type(self._tp(a), avail))
            except ValueError:
                return None
        g = 0
        for a in range(n):
            g |= int(t.gex[self._tp(a)])
        if g & t.gex_all != t.gex_all:
            return None
        A = Structure(t.nf.signature, full, self.cross.copy(), validate=False)
        return Certificate(A, tuple(tuple(s) for s in self.segments))


def _feasible(t: SearchTables, k: int, avail: int) -> bool:
    for r in range(int(t.req_off[k]), int(t.req_off[k + 1])):
        if int(t.req_masks[r]) & ~avail == 0:
            return True
    return False


DEFAULT_FINITE_BOUND = 6


def find_certificate(nf: NormalForm, max_segment: int, cfg: SearchConfig | None = None, finite_first: bool = True):
    """A certificate with segments of size ≤ ``max_segment``.

    Finite models up to ``cfg.max_size`` elements are tried first and
    returned as finite certificates; without ``cfg`` the finite bound is
    ``min(4·max_segment, DEFAULT_FINITE_BOUND)``. Returns
    :class:`NotFoundUpTo` when the bounded space is exhausted and
    ``BudgetExhausted`` when the node budget runs out.
    """
    _require_transitive_witnesses(nf)
    if max_segment < 1:
        raise ValueError("max_segment must be at least 1")
    node_limit = cfg.node_limit if cfg is not None else None
    kernel = cfg.kernel if cfg is not None else None
    finite_size = cfg.max_size if cfg is not None else min(4 * max_segment, DEFAULT_FINITE_BOUND)
    tables = compile_tables(nf)
    nodes = 0
    if finite_first:
        fin = find_finite_model(nf, SearchConfig(max_size=finite_size, node_limit=node_limit, kernel=kernel), tables)
        if isinstance(fin, Structure):
            return Certificate(fin, (tuple(fin.elements), (), (), ()))
        if isinstance(fin, BudgetExhausted):
            return fin
        nodes = fin.nodes
    else:
        finite_size = 0
    sizes = sorted(itertools.product(range(1, max_segment + 1), repeat=2), key=lambda p: (p[0] + 3 * p[1], p[1]))
    for n0, n1 in sizes:
        remaining = None if node_limit is None else node_limit - nodes
        if remaining is not None and remaining <= 0:
            return BudgetExhausted(nodes, n0 + 3 * n1)
        search = _RegularSearch(tables, n0, n1, remaining)
        found = []

        def leaf(s, found=found):
            cert = s.certificate()
            if cert is None:
                return None
            verdict = check_certificate(cert, nf)
            if verdict.ok:
                found.append(cert.with_maps(verdict.maps))
                return "found"
            return None

        status = search.run(leaf)
        nodes += search.nodes
        if status == "found":
            return found[0]
        if status == "budget":
            return BudgetExhausted(nodes, n0 + 3 * n1)
    return NotFoundUpTo(max_segment, nodes, finite_size=finite_size)


# Unfolding -------------------------------------------------------------------------


def _coherent_shift(c: Certificate):
    """An isomorphism of S0∪S1∪S2 onto S0∪S2∪S3, identity on S0, that also
    makes <S1,S3> agree with <S1,S2>."""
    A = c.structure
    S0, S1, S2, S3 = c.segments
    side = {a: {a} for a in S0}
    side.update({a: set(S2) for a in S1})
    side.update({a: set(S3) for a in S2})
    X = list(S0) + list(S1) + list(S2)
    Y = list(S0) + list(S2) + list(S3)
    fixed = {a: a for a in S0}
    for rho in iter_isomorphisms(A, X, A, Y, fixed=fixed, extra_check=lambda f, a, b: b in side[a]):
        if all(A.cross[p, rho[rho[q]]] == A.cross[p, rho[q]] for p in S1 for q in S1):
            return rho
    return None


def unfold(c: Certificate, k: int, notes: list | None = None) -> Structure:
    """Prefix ``S0, S1, ..., S_k`` of the infinite model a certificate describes.

    Elements are numbered ``S0`` first (in certificate order), then the copies
    of ``S1`` segment by segment. ``unfold(c, 3)`` is isomorphic to the
    certificate structure.
    """
    if c.finite:
        raise NothingToUnfold("nothing to unfold: finite certificate")
    if k < 0:
        raise ValueError("k must be non-negative")
    A = c.structure
    S0, S1, S2, _ = c.segments
    rho = _coherent_shift(c)
    if rho is not None:
        sigma = {p: rho[p] for p in S1}
    else:
        # fall back to the stored 2a map; the result is verified by the caller
        stored = c.seg_maps.get(((0, 2), (0, 1)))
        if stored is None:
            found = connection_equiv(A, (S0, S2), (S0, S1))
            if not found:
                raise CertificateError("certificate fails condition 2a")
            stored = found
        inv = {v: a for a, v in stored.items()}
        sigma = {p: inv[p] for p in S1}
        if notes is not None:
            notes.append("segment maps are not coherent; unfolded from the stored <S0,S2> map")
    n0, n1 = len(S0), len(S1)
    n = n0 + k * n1
    src = list(S0) + [p for _ in range(k) for p in S1]
    copy = [None] * n0 + [j for j in range(1, k + 1) for _ in S1]
    bld = StructureBuilder(A.sig, n)
    for e in range(n):
        bld.set_one(e, int(A.tp1[src[e]]))
    for e, f in itertools.combinations(range(n), 2):
        a, b = src[e], src[f]
        if copy[e] is None or copy[f] is None or copy[e] == copy[f]:
            code = A.cross[a, b]
        else:
            code = A.cross[a, sigma[b]]
        bld.set_cross(e, f, int(code))
    return bld.build()


def unfold_segments(c: Certificate, k: int) -> list:
    n0, n1 = len(c.segments[0]), len(c.segments[1])
    segs = [tuple(range(n0))]
    segs += [tuple(range(n0 + (j - 1) * n1, n0 + j * n1)) for j in range(1, k + 1)]
    return segs


def verify_unfolding(prefix: Structure, nf: NormalForm, frontier=()):
    """Check a finite prefix of an intended infinite model.

    psi0, transitivity and global existentials are checked everywhere;
    witness conditions only outside ``frontier``. A prefix over the base
    signature is first expanded with the fresh predicates, with frontier
    elements treated optimistically.
    """
    frontier = tuple(frontier)
    if prefix.sig != nf.signature:
        prefix = canonical_expansion(prefix, nf, frontier=frontier)
    return check_model(prefix, nf, frontier)


@dataclass
class NarrowReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok


def is_narrow(A: Structure, nf: NormalForm, segments, M: int | None = None) -> NarrowReport:
    """Narrowness of a finite prefix partitioned into ``segments``.

    The royal part must lie in ``S0``, each segment has at most ``M``
    elements, and for every ``j`` with a next segment, each element of
    ``S0..Sj`` lacking a γ-witness in ``S0`` has one in ``S_{j+1}``.
    """
    from .structure import royal_part

    rep = NarrowReport()
    segs = [tuple(s) for s in segments]
    _, royal = royal_part(A)
    if not royal <= set(segs[0]):
        rep.failures.append(f"royal elements {sorted(royal - set(segs[0]))} outside S0")
    if M is not None:
        for j, s in enumerate(segs):
            if len(s) > M:
                rep.failures.append(f"S{j} has {len(s)} > M = {M} elements")
    ev = nf.evaluators()
    Mx = A.tp2_matrix()
    off = ~np.eye(A.n, dtype=bool)
    for conj, prem_fn, mat_fn in zip(nf.existentials, ev.premises, ev.matrices):
        if conj.direction is Direction.BOTH:
            continue
        prem = np.broadcast_to(np.asarray(prem_fn(A.tp1)).astype(bool), (A.n,))
        W = np.asarray(mat_fn(Mx)).astype(bool) & off
        for j in range(len(segs) - 1):
            for a in (a for s in segs[: j + 1] for a in s):
                if prem[a] and not W[a, list(segs[0])].any() and not W[a, list(segs[j + 1])].any():
                    rep.failures.append(f"element {a} has no γ{conj.index}-witness in S0 or S{j + 1}")
    return rep


__all__ = [
    "BoundParams",
    "Certificate",
    "CertificateError",
    "CertificateVerdict",
    "CertFailure",
    "NotEquivalent",
    "NotFoundUpTo",
    "NothingToUnfold",
    "check_certificate",
    "compute_M",
    "connection_equiv",
    "find_certificate",
    "is_narrow",
    "unfold",
    "unfold_segments",
    "verify_unfolding",
]

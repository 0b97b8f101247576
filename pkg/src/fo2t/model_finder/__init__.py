"""Bounded finite-model search for normal forms, and a brute-force oracle."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..formula import Forall, Formula, Signature, conjuncts, free_vars, is_quantifier_free, rename_vars, signature_of
from ..semantics import evaluate
from ..structure import Structure, canonical_form, flip_table
from ..typetable import compile_qf, layout
from . import _kernel
from .tables import SearchTables, TableTooLarge, compile_tables

KERNEL = _kernel.KERNEL


class SearchBudgetError(RuntimeError):
    pass


@dataclass
class SearchConfig:
    max_size: int
    symmetry_breaking: bool = True
    node_limit: int | None = None
    parallel_width: int = 1
    min_size: int = 1
    kernel: str | None = None

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be at least 1")


@dataclass(frozen=True)
class NoModelUpTo:
    n: int
    nodes: int = 0

    def __str__(self):
        return f"NoModelUpTo({self.n})"


@dataclass(frozen=True)
class BudgetExhausted:
    nodes: int
    size: int

    def __str__(self):
        return f"BudgetExhausted(nodes={self.nodes}, at size {self.size})"


def build_structure(tables: SearchTables, types, codes) -> Structure:
    """Turn a kernel solution into a structure, choosing selector bits."""
    nf = tables.nf
    sig = nf.signature
    n = len(types)
    cross = np.zeros((n, n), dtype=np.int64)
    ft = flip_table(layout(sig))
    for i in range(n):
        for j in range(i + 1, n):
            cross[i, j] = codes[i][j]
            cross[j, i] = ft[codes[i][j]]
    tp1 = []
    for i in range(n):
        t = types[i]
        avail = 0
        for l in range(n):
            if l != i:
                avail |= int(tables.wit[t, types[l], cross[i, l]])
        tp1.append(tables.full_type(t, avail))
    return Structure(sig, tp1, cross)


def _run(kernel, tables, n, cfg, node_limit, roots=None, callback=None, leaf_hook=None):
    search = _kernel.get_kernel(kernel)
    return search(
        tables.kernel_args(),
        n,
        symmetry=cfg.symmetry_breaking,
        node_limit=node_limit,
        roots=roots,
        callback=callback,
        leaf_hook=leaf_hook,
    )


def _worker(kernel, args, n, symmetry, node_limit, roots):
    return _kernel.get_kernel(kernel)(args, n, symmetry=symmetry, node_limit=node_limit, roots=roots)


def _run_parallel(tables, n, cfg, node_limit):
    width = cfg.parallel_width
    roots = [list(range(w, tables.K, width)) for w in range(width)]
    roots = [r for r in roots if r]
    per = None if node_limit is None else max(1, node_limit // len(roots))
    args = tables.kernel_args()
    with ProcessPoolExecutor(max_workers=len(roots)) as pool:
        futs = [pool.submit(_worker, cfg.kernel, args, n, cfg.symmetry_breaking, per, r) for r in roots]
        results = [f.result() for f in futs]
    nodes = sum(r[1] for r in results)
    found = [(r[2][0], r) for r in results if r[0] == 1]
    if found:
        found.sort(key=lambda item: item[0])
        _, res = found[0]
        return 1, nodes, res[2], res[3]
    if any(r[0] == 2 for r in results):
        return 2, nodes, None, None
    return 0, nodes, None, None


def find_finite_model(nf, cfg: SearchConfig, tables: SearchTables | None = None):
    """A model of size ≤ cfg.max_size, NoModelUpTo, or BudgetExhausted."""
    tables = tables or compile_tables(nf)
    total = 0
    for n in range(cfg.min_size, cfg.max_size + 1):
        remaining = None if cfg.node_limit is None else cfg.node_limit - total
        if remaining is not None and remaining <= 0:
            return BudgetExhausted(total, n)
        if cfg.parallel_width > 1 and tables.K > 1:
            status, nodes, types, codes = _run_parallel(tables, n, cfg, remaining)
        else:
            status, nodes, types, codes = _run(cfg.kernel, tables, n, cfg, remaining)
        total += nodes
        if status == 1:
            return build_structure(tables, types, codes)
        if status == 2:
            return BudgetExhausted(total, n)
    return NoModelUpTo(cfg.max_size, total)


def enumerate_nf_models(nf, n: int, selectors=None, node_limit=None, kernel=None, leaf_hook=None):
    """All models of exactly ``n`` elements, one per canonical core assignment.

    Only symbols in ``selectors`` are left to per-element choice, so passing
    the fresh symbols of a normal form makes the reducts to the original
    signature exhaustive up to isomorphism.
    """
    tables = compile_tables(nf, selectors=selectors)
    found = []

    def collect(types, codes):
        found.append(build_structure(tables, types, codes))
        return False

    cfg = SearchConfig(max_size=n)
    status, nodes, _, _ = _run(kernel, tables, n, cfg, node_limit, callback=collect, leaf_hook=leaf_hook)
    if status == 2:
        raise SearchBudgetError(f"node budget {node_limit} exhausted at size {n}")
    return found


# Brute-force oracle ----------------------------------------------------------------

BRUTE_FORCE_LIMIT = 30_000_000
_CHUNK = 200_000


def _unary_filter(f: Formula, sig: Signature) -> np.ndarray:
    """1-types allowed by top-level universal conjuncts with one variable."""
    lay = layout(sig)
    codes = np.arange(lay.n_one, dtype=np.int64)
    ok = np.ones(lay.n_one, dtype=bool)
    for c in conjuncts(f):
        if isinstance(c, Forall) and is_quantifier_free(c.body) and free_vars(c.body) <= {c.var}:
            body = rename_vars(c.body, {c.var: "x"})
            ok &= np.broadcast_to(np.asarray(compile_qf(body, sig, "diag")(codes)).astype(bool), ok.shape)
    return codes[ok]


def _batch(sig: Signature, tp1s: np.ndarray, crosses: np.ndarray):
    """Relation arrays for all combinations of type tuples and cross assignments."""
    lay = layout(sig)
    s = tp1s.shape[1]
    pairs = [(i, j) for i in range(s) for j in range(i + 1, s)]
    nt, nc = tp1s.shape[0], crosses.shape[0]
    T1 = np.repeat(tp1s, nc, axis=0)
    CR = np.tile(crosses, (nt, 1))
    N = nt * nc
    U = np.zeros((N, s, sig.u), dtype=bool)
    for i in range(sig.u):
        U[:, :, i] = (T1 >> i) & 1
    B = np.zeros((N, s, s, sig.k), dtype=bool)
    for r in range(sig.k):
        for a in range(s):
            B[:, a, a, r] = (T1[:, a] >> (lay.u + r)) & 1
        for p, (a, b) in enumerate(pairs):
            B[:, a, b, r] = (CR[:, p] >> (2 * r)) & 1
            B[:, b, a, r] = (CR[:, p] >> (2 * r + 1)) & 1
    return T1, CR, U, B


def transitive_mask(BT: np.ndarray) -> np.ndarray:
    """(N,) mask of the (N, n, n) relation stack that is transitive."""
    if BT.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    comp = np.matmul(BT.astype(np.uint8), BT.astype(np.uint8)) > 0
    return ~np.any(comp & ~BT, axis=(1, 2))


def all_models_up_to(f: Formula, n: int, signature: Signature | None = None, limit: int = BRUTE_FORCE_LIMIT):
    """Every model of ``f`` with at most ``n`` elements, by direct evaluation.

    T is read as a transitive relation: structures where it is not are skipped.

    Element 1-types are enumerated in non-decreasing order, so each model is
    produced once per ordering compatible with that canonicalization.
    """
    sig = signature_of(f, signature)
    lay = layout(sig)
    allowed = _unary_filter(f, sig)
    ft = flip_table(lay)
    for s in range(1, n + 1):
        n_pairs = s * (s - 1) // 2
        tuples = np.array(list(itertools.combinations_with_replacement(allowed.tolist(), s)), dtype=np.int64)
        if tuples.size == 0:
            continue
        tuples = tuples.reshape(-1, s)
        n_cross = lay.n_cross ** n_pairs
        if tuples.shape[0] * n_cross > limit:
            raise SearchBudgetError(f"brute force over {tuples.shape[0] * n_cross} structures at size {s}")
        crosses = np.array(list(itertools.product(range(lay.n_cross), repeat=n_pairs)), dtype=np.int64).reshape(n_cross, n_pairs)
        step = max(1, _CHUNK // max(1, n_cross))
        pairs = [(i, j) for i in range(s) for j in range(i + 1, s)]
        for start in range(0, tuples.shape[0], step):
            T1, CR, U, B = _batch(sig, tuples[start:start + step], crosses)
            sat = evaluate(f, sig, U, B) & transitive_mask(B[..., sig.t_index])
            for idx in np.nonzero(sat)[0]:
                cross = np.zeros((s, s), dtype=np.int64)
                for p, (a, b) in enumerate(pairs):
                    cross[a, b] = CR[idx, p]
                    cross[b, a] = ft[CR[idx, p]]
                yield Structure(sig, T1[idx], cross, validate=False)


def count_structures(sig: Signature, n: int) -> int:
    lay = layout(sig)
    return sum(lay.n_one ** s * lay.n_cross ** (s * (s - 1) // 2) for s in range(1, n + 1))


def model_classes(structures) -> set:
    """Isomorphism classes of a stream of structures."""
    return {canonical_form(s) for s in structures}


__all__ = [
    "KERNEL",
    "SearchBudgetError",
    "SearchConfig",
    "NoModelUpTo",
    "BudgetExhausted",
    "TableTooLarge",
    "compile_tables",
    "find_finite_model",
    "enumerate_nf_models",
    "all_models_up_to",
    "build_structure",
    "model_classes",
]

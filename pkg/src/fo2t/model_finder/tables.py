"""Compilation of a normal form into the lookup tables used by the search.

Unary symbols that occur only in unary ``psi0`` conjuncts or in premises are
*selectors*: they never constrain a pair, so the search leaves them open and
picks them per element once its witnesses are known. All other atoms of a
1-type are *core* bits, enumerated by the search.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..formula import Atom, Formula, conj, conjuncts, free_vars, rename_vars, walk
from ..typetable import compile_qf, layout

MAX_SELECTORS = 12
MAX_TYPE_PRODUCT = 1 << 22
MAX_EXISTENTIALS = 64
MAX_PAIR_TABLE = 1 << 24


class TableTooLarge(ValueError):
    pass


@dataclass
class SearchTables:
    nf: object
    core_bits: list
    sel_bits: list
    codes: np.ndarray        # (K,) full 1-type code of each admissible core type, selectors 0
    tdiag: np.ndarray        # (K,) uint8
    pair_ok: np.ndarray      # (K, K, C) uint8, both orientations checked
    wit: np.ndarray          # (K, K, C) uint64 bitmask of conjuncts witnessed by b for a
    flip: np.ndarray         # (C,) int32
    req_off: np.ndarray      # (K+1,) int32
    req_masks: np.ndarray    # uint64, minimal premise-requirement masks
    req_full: np.ndarray     # int64, full 1-type realizing each requirement mask
    reach: np.ndarray        # (K, K) uint64, what a later element of type >= b can supply
    gex: np.ndarray          # (K,) uint64, global existentials satisfied
    gex_all: int
    allow_off: np.ndarray    # (K*K+1,) int32
    allow_codes: np.ndarray  # int32, allowed cross codes per ordered type pair
    tsh: int
    gamma_mask: int
    delta_mask: int
    free_mask: int

    @property
    def K(self) -> int:
        return int(self.codes.shape[0])

    @property
    def C(self) -> int:
        return int(self.flip.shape[0])

    def kernel_args(self) -> dict:
        return dict(
            K=self.K,
            C=self.C,
            tdiag=self.tdiag,
            pair_ok=self.pair_ok,
            wit=self.wit,
            flip=self.flip,
            req_off=self.req_off,
            req_masks=self.req_masks,
            reach=self.reach,
            gex=self.gex,
            gex_all=self.gex_all,
            allow_off=self.allow_off,
            allow_codes=self.allow_codes,
            tsh=self.tsh,
        )

    def full_type(self, t: int, avail: int) -> int:
        """Full 1-type for core type ``t`` given the available witness mask."""
        lo, hi = int(self.req_off[t]), int(self.req_off[t + 1])
        for r in range(lo, hi):
            m = int(self.req_masks[r])
            if m & ~avail == 0:
                return int(self.req_full[r])
        raise ValueError("no selector choice is feasible")


def _unary_names(f: Formula) -> set:
    return {n.pred for n in walk(f) if isinstance(n, Atom) and len(n.args) == 1}


def compile_tables(nf, selectors=None) -> SearchTables:
    """Build search tables; ``selectors`` restricts which symbols may be selectors."""
    sig = nf.signature
    lay = layout(sig)
    ex = nf.existentials
    if len(ex) > MAX_EXISTENTIALS:
        raise TableTooLarge(f"more than {MAX_EXISTENTIALS} existential conjuncts")
    unary_parts, binary_parts = [], []
    for c in conjuncts(nf.psi0):
        fv = free_vars(c)
        if fv == {"x", "y"}:
            binary_parts.append(c)
        elif fv == {"y"}:
            unary_parts.append(rename_vars(c, {"y": "x"}))
        else:
            unary_parts.append(c)
    forced = set()
    for f in binary_parts + [c.body for c in ex] + list(nf.global_existentials):
        forced |= _unary_names(f)
    cand = [p for p in sig.unary if p not in forced and (selectors is None or p in selectors)]
    cand = cand[:MAX_SELECTORS]
    sel_bits = [sig.unary.index(p) for p in cand]
    core_bits = [b for b in range(lay.w) if b not in sel_bits]
    n_core, n_sel = 1 << len(core_bits), 1 << len(sel_bits)
    if n_core * n_sel > MAX_TYPE_PRODUCT:
        raise TableTooLarge(f"{len(core_bits)} core and {len(sel_bits)} selector bits")

    def scatter(bits):
        idx = np.arange(1 << len(bits), dtype=np.int64)
        out = np.zeros_like(idx)
        for j, b in enumerate(bits):
            out |= ((idx >> j) & 1) << b
        return out

    core_all = scatter(core_bits)
    sel_all = scatter(sel_bits)
    full = core_all[:, None] | sel_all[None, :]
    diag_ok = np.asarray(compile_qf(nf.psi0, sig, "diag")(full)).astype(bool)
    prem = np.zeros(full.shape, dtype=np.uint64)
    for i, c in enumerate(ex):
        p = np.asarray(c.premise_fn(sig)(full)).astype(np.uint64)
        prem |= p << np.uint64(i)

    codes, req_off, req_masks, req_full = [], [0], [], []
    for ci in range(n_core):
        rows = np.nonzero(diag_ok[ci])[0]
        if rows.size == 0:
            continue
        options = {}
        for r in rows:
            m = int(prem[ci, r])
            options.setdefault(m, int(full[ci, r]))
        minimal = []
        for m in sorted(options, key=lambda v: (bin(v).count("1"), v)):
            if not any((o & m) == o for o in minimal):
                minimal.append(m)
        codes.append(int(core_all[ci]))
        for m in minimal:
            req_masks.append(m)
            req_full.append(options[m])
        req_off.append(len(req_masks))
    codes = np.array(codes, dtype=np.int64)
    K = codes.shape[0]
    C = lay.n_cross
    if K * K * C > MAX_PAIR_TABLE:
        raise TableTooLarge(f"pair table of {K} x {K} x {C} entries")
    flip = np.array([lay.flip_cross(c) for c in range(C)], dtype=np.int32)
    w = lay.w
    cross = np.arange(C, dtype=np.int64)
    beta = codes[:, None, None] | (codes[None, :, None] << w) | (cross[None, None, :] << (2 * w))
    beta_rev = codes[None, :, None] | (codes[:, None, None] << w) | (flip.astype(np.int64)[None, None, :] << (2 * w))
    bin_fn = compile_qf(conj(binary_parts), sig, "pair")
    pair_ok = (np.asarray(bin_fn(beta)).astype(bool) & np.asarray(bin_fn(beta_rev)).astype(bool))
    pair_ok = np.ascontiguousarray(np.broadcast_to(pair_ok, (K, K, C))).astype(np.uint8)
    wit = np.zeros((K, K, C), dtype=np.uint64)
    for i, c in enumerate(ex):
        hit = np.broadcast_to(np.asarray(c.matrix_fn(sig)(beta)).astype(np.uint64), (K, K, C))
        wit |= hit << np.uint64(i)
    masked = np.where(pair_ok.astype(bool), wit, np.uint64(0))
    per_b = np.bitwise_or.reduce(masked, axis=2) if K else np.zeros((0, 0), np.uint64)
    reach = np.zeros((K, K), dtype=np.uint64)
    acc = np.zeros(K, dtype=np.uint64)
    for b in range(K - 1, -1, -1):
        acc = acc | per_b[:, b]
        reach[:, b] = acc
    gex = np.zeros(K, dtype=np.uint64)
    for i, g in enumerate(nf.global_existentials):
        hit = np.asarray(compile_qf(g, sig, "diag")(codes)).astype(np.uint64)
        gex |= np.broadcast_to(hit, (K,)) << np.uint64(i)
    allow_off, allow_codes = [0], []
    for a in range(K):
        for b in range(K):
            allow_codes.extend(np.nonzero(pair_ok[a, b])[0].tolist())
            allow_off.append(len(allow_codes))
    tdiag = ((codes >> lay.t_diag_bit) & 1).astype(np.uint8)
    masks = {"gamma": 0, "delta": 0, "free": 0}
    for i, c in enumerate(ex):
        masks[c.kind] |= 1 << i
    return SearchTables(
        nf=nf,
        core_bits=core_bits,
        sel_bits=sel_bits,
        codes=codes,
        tdiag=tdiag,
        pair_ok=pair_ok,
        wit=np.ascontiguousarray(wit),
        flip=flip,
        req_off=np.array(req_off, dtype=np.int32),
        req_masks=np.array(req_masks, dtype=np.uint64),
        req_full=np.array(req_full, dtype=np.int64),
        reach=np.ascontiguousarray(reach),
        gex=gex,
        gex_all=(1 << len(nf.global_existentials)) - 1,
        allow_off=np.array(allow_off, dtype=np.int32),
        allow_codes=np.array(allow_codes, dtype=np.int32),
        tsh=lay.t_cross_bit,
        gamma_mask=masks["gamma"],
        delta_mask=masks["delta"],
        free_mask=masks["free"],
    )

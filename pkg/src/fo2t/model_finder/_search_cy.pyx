# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled depth-first search kernel; same algorithm as ``_search_py``."""
import numpy as np

from libc.stdint cimport int32_t, uint8_t, uint64_t

cdef enum:
    FOUND = 1
    BUDGET = 2


cdef class _Search:
    cdef int K, n, sym, tsh
    cdef long long nodes, limit
    cdef const uint8_t[::1] tdiag
    cdef const uint64_t[:, :, ::1] wit
    cdef const int32_t[::1] flip
    cdef const int32_t[::1] req_off
    cdef const uint64_t[::1] req_masks
    cdef const uint64_t[:, ::1] reach
    cdef const uint64_t[::1] gex
    cdef uint64_t gex_all
    cdef const int32_t[::1] allow_off
    cdef const int32_t[::1] allow_codes
    cdef const int32_t[::1] roots
    cdef int32_t[::1] types
    cdef int32_t[:, ::1] codes
    cdef uint8_t[:, ::1] T
    cdef object callback

    def __init__(self, args, int n, bint symmetry, node_limit, roots, callback):
        self.K = args["K"]
        self.n = n
        self.sym = symmetry
        self.tsh = args["tsh"]
        self.limit = -1 if node_limit is None else node_limit
        self.tdiag = np.ascontiguousarray(args["tdiag"], dtype=np.uint8)
        self.wit = np.ascontiguousarray(args["wit"], dtype=np.uint64)
        self.flip = np.ascontiguousarray(args["flip"], dtype=np.int32)
        self.req_off = np.ascontiguousarray(args["req_off"], dtype=np.int32)
        self.req_masks = np.ascontiguousarray(args["req_masks"], dtype=np.uint64)
        self.reach = np.ascontiguousarray(args["reach"], dtype=np.uint64)
        self.gex = np.ascontiguousarray(args["gex"], dtype=np.uint64)
        self.gex_all = args["gex_all"]
        self.allow_off = np.ascontiguousarray(args["allow_off"], dtype=np.int32)
        self.allow_codes = np.ascontiguousarray(args["allow_codes"], dtype=np.int32)
        self.roots = np.ascontiguousarray(roots, dtype=np.int32)
        self.types = np.zeros(n, dtype=np.int32)
        self.codes = np.zeros((n, n), dtype=np.int32)
        self.T = np.zeros((n, n), dtype=np.uint8)
        self.callback = callback
        self.nodes = 0

    cdef bint feasible(self, int t, uint64_t avail):
        cdef int r
        for r in range(self.req_off[t], self.req_off[t + 1]):
            if self.req_masks[r] & ~avail == 0:
                return True
        return False

    cdef uint64_t avail(self, int i, int upto):
        cdef int l, ti = self.types[i]
        cdef uint64_t acc = 0
        for l in range(upto + 1):
            if l == i:
                continue
            if i < l:
                acc |= self.wit[ti, self.types[l], self.codes[i, l]]
            else:
                acc |= self.wit[ti, self.types[l], self.flip[self.codes[l, i]]]
        return acc

    cdef int place(self, int j):
        cdef int a, lo, r, idx
        if j == self.n:
            return self.leaf()
        if j == 0:
            for idx in range(self.roots.shape[0]):
                a = self.roots[idx]
                r = self.try_type(0, a)
                if r:
                    return r
            return 0
        lo = self.types[j - 1] if self.sym else 0
        for a in range(lo, self.K):
            r = self.try_type(j, a)
            if r:
                return r
        return 0

    cdef int try_type(self, int j, int a):
        self.nodes += 1
        if self.limit >= 0 and self.nodes > self.limit:
            return BUDGET
        self.types[j] = a
        self.T[j, j] = self.tdiag[a]
        return self.pair(0, j)

    cdef int pair(self, int i, int j):
        cdef int ti, tj, idx, c, k, r
        cdef uint8_t a, b, tik, tki, tjk, tkj
        cdef bint mutual_ok, ok
        if i == j:
            if j < self.n - 1 and not self.lookahead(j):
                return 0
            return self.place(j + 1)
        ti = self.types[i]
        tj = self.types[j]
        mutual_ok = self.tdiag[ti] and self.tdiag[tj]
        for idx in range(self.allow_off[ti * self.K + tj], self.allow_off[ti * self.K + tj + 1]):
            c = self.allow_codes[idx]
            a = (c >> self.tsh) & 1
            b = (c >> (self.tsh + 1)) & 1
            if a and b and not mutual_ok:
                continue
            self.T[i, j] = a
            self.T[j, i] = b
            ok = True
            for k in range(i):
                tik = self.T[i, k]
                tki = self.T[k, i]
                tjk = self.T[j, k]
                tkj = self.T[k, j]
                if ((a and tjk and not tik) or (tik and tkj and not a)
                        or (b and tik and not tjk) or (tjk and tki and not b)
                        or (tki and a and not tkj) or (tkj and b and not tki)):
                    ok = False
                    break
            if not ok:
                continue
            self.nodes += 1
            if self.limit >= 0 and self.nodes > self.limit:
                return BUDGET
            self.codes[i, j] = c
            r = self.pair(i + 1, j)
            if r:
                return r
        return 0

    cdef bint lookahead(self, int j):
        cdef int i, ti
        cdef int nxt = self.types[j] if self.sym else 0
        for i in range(j + 1):
            ti = self.types[i]
            if not self.feasible(ti, self.avail(i, j) | self.reach[ti, nxt]):
                return False
        return True

    cdef int leaf(self):
        cdef int i, ti, last = self.n - 1
        cdef uint64_t g = 0
        for i in range(self.n):
            ti = self.types[i]
            if not self.feasible(ti, self.avail(i, last)):
                return 0
            g |= self.gex[ti]
        if g & self.gex_all != self.gex_all:
            return 0
        if self.callback is None:
            return FOUND
        if self.callback(np.asarray(self.types).tolist(), np.asarray(self.codes).tolist()):
            return FOUND
        return 0

    def run(self):
        cdef int status
        if self.K == 0:
            return 0, 0, None, None
        status = self.place(0)
        if status == FOUND:
            return status, self.nodes, np.asarray(self.types).tolist(), np.asarray(self.codes).tolist()
        return status, self.nodes, None, None


def search(args, n, symmetry=True, node_limit=None, roots=None, callback=None, leaf_hook=None):
    """Compiled counterpart of ``_search_py.search``; ``leaf_hook`` is unsupported."""
    if leaf_hook is not None:
        raise ValueError("leaf_hook requires the pure-Python kernel")
    if roots is None:
        roots = np.arange(args["K"], dtype=np.int32)
    return _Search(args, n, symmetry, node_limit, roots, callback).run()

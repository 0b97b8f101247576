"""Pure-Python depth-first search kernel.

Decision order: the core type of element ``j``, then the cross types of
``(0, j), (1, j), ..., (j-1, j)``. Pairs violating ``psi0`` never appear as
candidates; transitivity is checked on every triple as soon as its three
pairs are decided. Witness requirements are checked exactly at the leaf and
used as a lookahead bound whenever an element's pairs are complete.
"""

FOUND = 1
BUDGET = 2


class _Search:
    def __init__(self, args, n, symmetry, node_limit, roots, callback, leaf_hook):
        K = args["K"]
        self.K = K
        self.n = n
        self.sym = symmetry
        self.limit = node_limit if node_limit is not None else -1
        self.roots = [int(r) for r in roots]
        self.callback = callback
        self.leaf_hook = leaf_hook
        self.tsh = args["tsh"]
        self.tdiag = [int(v) for v in args["tdiag"]]
        self.flip = [int(v) for v in args["flip"]]
        off, codes = args["allow_off"], args["allow_codes"]
        tsh = self.tsh
        self.allowed = [
            [
                [(int(c), (int(c) >> tsh) & 1, (int(c) >> (tsh + 1)) & 1) for c in codes[off[a * K + b]:off[a * K + b + 1]]]
                for b in range(K)
            ]
            for a in range(K)
        ]
        wit = args["wit"]
        self.wit = [[[int(v) for v in wit[a, b]] for b in range(K)] for a in range(K)]
        ro, rm = args["req_off"], args["req_masks"]
        self.reqs = [[int(m) for m in rm[ro[a]:ro[a + 1]]] for a in range(K)]
        reach = args["reach"]
        self.reach = [[int(v) for v in reach[a]] for a in range(K)]
        self.gex = [int(v) for v in args["gex"]]
        self.gex_all = int(args["gex_all"])
        self.types = [0] * n
        self.codes = [[0] * n for _ in range(n)]
        self.T = [[0] * n for _ in range(n)]
        self.nodes = 0

    def feasible(self, t, avail):
        for m in self.reqs[t]:
            if m & ~avail == 0:
                return True
        return False

    def avail(self, i, upto):
        types, codes, wit, flip = self.types, self.codes, self.wit, self.flip
        ti = types[i]
        acc = 0
        for l in range(upto + 1):
            if l == i:
                continue
            if i < l:
                acc |= wit[ti][types[l]][codes[i][l]]
            else:
                acc |= wit[ti][types[l]][flip[codes[l][i]]]
        return acc

    def place(self, j):
        if j == self.n:
            return self.leaf()
        if j == 0:
            cands = self.roots
        else:
            cands = range(self.types[j - 1] if self.sym else 0, self.K)
        for a in cands:
            self.nodes += 1
            if self.limit >= 0 and self.nodes > self.limit:
                return BUDGET
            self.types[j] = a
            self.T[j][j] = self.tdiag[a]
            r = self.pair(0, j)
            if r:
                return r
        return 0

    def pair(self, i, j):
        if i == j:
            if j < self.n - 1 and not self.lookahead(j):
                return 0
            return self.place(j + 1)
        T = self.T
        ti, tj = self.types[i], self.types[j]
        mutual_ok = self.tdiag[ti] and self.tdiag[tj]
        Ti, Tj = T[i], T[j]
        for c, a, b in self.allowed[ti][tj]:
            if a and b and not mutual_ok:
                continue
            Ti[j] = a
            Tj[i] = b
            ok = True
            for k in range(i):
                Tk = T[k]
                if (
                    (a and Tj[k] and not Ti[k])
                    or (Ti[k] and Tk[j] and not a)
                    or (b and Ti[k] and not Tj[k])
                    or (Tj[k] and Tk[i] and not b)
                    or (Tk[i] and a and not Tk[j])
                    or (Tk[j] and b and not Tk[i])
                ):
                    ok = False
                    break
            if not ok:
                continue
            self.nodes += 1
            if self.limit >= 0 and self.nodes > self.limit:
                return BUDGET
            self.codes[i][j] = c
            r = self.pair(i + 1, j)
            if r:
                return r
        return 0

    def lookahead(self, j):
        nxt = self.types[j] if self.sym else 0
        for i in range(j + 1):
            ti = self.types[i]
            if not self.feasible(ti, self.avail(i, j) | self.reach[ti][nxt]):
                return False
        return True

    def leaf(self):
        if self.leaf_hook is not None:
            self.leaf_hook(list(self.types), [row[:] for row in self.codes])
        last = self.n - 1
        g = 0
        for i in range(self.n):
            ti = self.types[i]
            if not self.feasible(ti, self.avail(i, last)):
                return 0
            g |= self.gex[ti]
        if g & self.gex_all != self.gex_all:
            return 0
        if self.callback is None:
            return FOUND
        return FOUND if self.callback(list(self.types), [row[:] for row in self.codes]) else 0


def search(args, n, symmetry=True, node_limit=None, roots=None, callback=None, leaf_hook=None):
    """Run the search for models of exactly ``n`` elements.

    Returns ``(status, nodes, types, codes)`` with status 0 (exhausted),
    1 (found, or stopped by the callback) or 2 (node budget hit).
    """
    if roots is None:
        roots = range(args["K"])
    s = _Search(args, n, symmetry, node_limit, roots, callback, leaf_hook)
    if s.K == 0:
        return 0, 0, None, None
    status = s.place(0)
    if status == FOUND:
        return status, s.nodes, list(s.types), [row[:] for row in s.codes]
    return status, s.nodes, None, None

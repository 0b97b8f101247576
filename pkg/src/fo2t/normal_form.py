"""Directional Scott normal form and its desk-scale equisatisfiability check.

A :class:`NormalForm` is read as the conjunction of

* ``!x.!y.psi0``, with ``psi0`` quantifier free;
* for each existential conjunct ``(i, d, psi_i, premise_i)``::

      !x.(premise_i(x) -> ?y.(x != y & xi_d(x,y) & psi_i(x,y)))

  where ``xi_d`` is the T-literal pattern of direction ``d``;
* for each global existential ``chi``: ``?x.chi(x)``.

Premises default to ``true``. They express the conditional existentials
that arise when an existential is nested under a disjunction, without a
second renaming symbol.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaError,
    FragmentClass,
    Implies,
    NotFO2Error,
    Not,
    Or,
    Signature,
    classify_fragment,
    conj,
    conjuncts,
    disj,
    disjuncts,
    free_vars,
    is_quantifier_free,
    map_atoms,
    other,
    rename_vars,
    signature_of,
    simplify,
    size,
    to_nnf,
    to_text,
    TRANSITIVE,
    walk,
)
from .typetable import DIRECTIONS, Direction, compile_qf

# Output size is at most SIZE_FACTOR * size(to_nnf(input)) + SIZE_OFFSET.
SIZE_FACTOR = 12
SIZE_OFFSET = 8


def directional_split(psi: Formula, d: Direction) -> Formula:
    """``xi_d & psi`` with the T-literal pattern of ``d``."""
    items = list(d.guard().args)
    if psi != TRUE:
        items.append(psi)
    return And(tuple(items))


def substitute_direction(psi: Formula, d: Direction) -> Formula:
    """Fix T(x,y), T(y,x) to the pattern of ``d`` and x = y to false."""
    a, b = d.bits

    def sub(node):
        if isinstance(node, Atom) and node.pred == TRANSITIVE and node.args[0] != node.args[1]:
            return Const(bool(a)) if node.args == ("x", "y") else Const(bool(b))
        if isinstance(node, Eq) and node.left != node.right:
            return FALSE
        return node

    return simplify(map_atoms(psi, sub))


@dataclass(frozen=True)
class ExistentialConjunct:
    index: int
    direction: Direction
    body: Formula
    premise: Formula = TRUE

    @property
    def matrix(self) -> Formula:
        """``x != y & xi_d & body``."""
        return And((Not(Eq("x", "y")),) + directional_split(self.body, self.direction).args)

    def matrix_fn(self, sig: Signature):
        return compile_qf(self.matrix, sig, "pair")

    def premise_fn(self, sig: Signature):
        return compile_qf(self.premise, sig, "diag")

    @property
    def kind(self) -> str:
        if self.direction is Direction.BOTH:
            return "delta"
        return "gamma" if self.direction is not Direction.NONE else "free"

    def to_formula(self) -> Formula:
        ex = Exists("y", self.matrix)
        if self.premise == TRUE:
            return Forall("x", ex)
        return Forall("x", Implies(self.premise, ex))

    def label(self) -> str:
        sym = {"gamma": "γ", "delta": "δ", "free": "γ"}[self.kind]
        return f"{sym}{self.index}"


@dataclass(frozen=True)
class _Evaluators:
    psi0_pair: object
    psi0_diag: object
    premises: tuple
    matrices: tuple
    globals_: tuple


@dataclass(frozen=True)
class NormalForm:
    psi0: Formula
    gammas: tuple = ()
    deltas: tuple = ()
    extra_gammas_free: tuple = ()
    signature: Signature = field(default_factory=Signature)
    base_signature: Signature = field(default_factory=Signature)
    global_existentials: tuple = ()
    fresh: tuple = ()
    renamed: tuple = ()
    definitions: tuple = ()

    @property
    def existentials(self) -> tuple:
        return tuple(sorted(self.gammas + self.deltas + self.extra_gammas_free, key=lambda c: c.index))

    @property
    def m(self) -> int:
        return len(self.gammas)

    def is_transitive_witness_form(self) -> bool:
        return not self.extra_gammas_free

    @cached_property
    def _evals(self) -> _Evaluators:
        sig = self.signature
        ex = self.existentials
        return _Evaluators(
            compile_qf(self.psi0, sig, "pair"),
            compile_qf(self.psi0, sig, "diag"),
            tuple(c.premise_fn(sig) for c in ex),
            tuple(c.matrix_fn(sig) for c in ex),
            tuple(compile_qf(g, sig, "diag") for g in self.global_existentials),
        )

    def evaluators(self) -> _Evaluators:
        return self._evals

    def to_formula(self) -> Formula:
        parts = [Forall("x", Forall("y", self.psi0))]
        parts += [c.to_formula() for c in self.existentials]
        parts += [Exists("x", g) for g in self.global_existentials]
        return And(tuple(parts))

    def output_size(self) -> int:
        total = size(self.psi0)
        for c in self.existentials:
            total += size(c.body) + size(c.premise)
        return total + sum(size(g) for g in self.global_existentials)

    def to_text(self) -> str:
        lines = [f"# fresh predicates: {' '.join(self.fresh) or '(none)'}"]
        lines.append(f"# signature: {self.signature}")
        lines.append(f"!x.!y.({to_text(self.psi0)});")
        for c in self.existentials:
            lines.append(f"{to_text(c.to_formula())};  # {c.label()} {c.direction}")
        for g in self.global_existentials:
            lines.append(f"?x.({to_text(g)});  # global")
        return "\n".join(lines)


def _truth_value(f: Formula, limit: int = 14):
    """TRUE or FALSE if the quantifier-free ``f`` is valid or unsatisfiable."""
    f = simplify(f)
    if isinstance(f, Const):
        return f
    atoms = sorted({n for n in walk(f) if isinstance(n, (Atom, Eq))}, key=repr)
    if len(atoms) > limit:
        return f
    seen = set()
    for bits in itertools.product((False, True), repeat=len(atoms)):
        val = dict(zip(atoms, bits))
        seen.add(simplify(map_atoms(f, lambda a: Const(val[a]))).value)
        if len(seen) == 2:
            return f
    return TRUE if seen == {True} else FALSE


class _Scottifier:
    def __init__(self, base: Signature):
        self.base = base
        self.counter = 0
        self.clauses: list[Formula] = []
        self.conjs: list[tuple] = []
        self.globals: list[Formula] = []
        self.fresh: list[str] = []
        self.renamed: list[str] = []
        self.definitions: list[tuple[str, Formula]] = []
        # quantified subformula -> (fresh symbol, attaches to the other variable)
        self.memo: dict[Formula, tuple[str, bool]] = {}

    def new_symbol(self) -> str:
        self.counter += 1
        name = f"_nf{self.counter}"
        while name in self.base.unary or name in self.base.binary:
            self.counter += 1
            name = f"_nf{self.counter}"
        return name

    # top level

    def top(self, c: Formula):
        if c == TRUE:
            return
        if isinstance(c, Forall):
            for b in conjuncts(c.body):
                self.forall_body(c.var, b)
            if not conjuncts(c.body):
                return
        elif isinstance(c, Exists):
            chi = self.abstract(c.body, c.var)
            self.globals.append(rename_vars(chi, {c.var: "x", other(c.var): "y"}))
        else:
            q = self.abstract(c, "x")
            self.clauses.append(q)

    def forall_body(self, v: str, b: Formula):
        w = other(v)
        ren = {v: "x", w: "y"}
        if is_quantifier_free(b):
            self.clauses.append(rename_vars(b, ren))
            return
        if isinstance(b, Forall):
            if b.var == v:
                for bb in conjuncts(b.body):
                    self.forall_body(v, bb)
                return
            for bb in conjuncts(b.body):
                q = self.abstract(bb, w)
                self.clauses.append(rename_vars(q, ren))
            return
        if isinstance(b, Exists) and b.var == w:
            chi = self.abstract(b.body, w)
            if free_vars(chi) == {v, w}:
                self.emit_exists(TRUE, rename_vars(chi, ren))
                return
        if isinstance(b, Or):
            parts = disjuncts(b)
            exists = [p for p in parts if isinstance(p, Exists) and p.var == w]
            if len(exists) == 1:
                chi = self.abstract(exists[0].body, w)
                if free_vars(chi) == {v, w}:
                    rest = [self.abstract(p, v) for p in parts if p is not exists[0]]
                    premise = to_nnf(Not(rename_vars(disj(rest), ren)))
                    self.emit_exists(simplify(premise), rename_vars(chi, ren))
                    return
                q = self.abstract(b, v)
                self.clauses.append(rename_vars(q, ren))
                return
        q = self.abstract(b, v)
        self.clauses.append(rename_vars(q, ren))

    # renaming of quantified subformulas

    def abstract(self, f: Formula, cv: str) -> Formula:
        """Quantifier-free replacement of ``f``; closed parts attach to ``cv``."""
        if isinstance(f, (Atom, Eq, Const)):
            return f
        if isinstance(f, Not):
            return f
        if isinstance(f, And):
            return And(tuple(self.abstract(a, cv) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(self.abstract(a, cv) for a in f.args))
        if isinstance(f, (Forall, Exists)):
            v = f.var
            w = other(v)
            if f in self.memo:
                name, on_w = self.memo[f]
                return Atom(name, (w if on_w else cv,))
            chi = self.abstract(f.body, v)
            fv = free_vars(chi)
            if v not in fv:
                return chi
            name = self.new_symbol()
            self.memo[f] = (name, w in fv)
            self.fresh.append(name)
            self.renamed.append(name)
            if w in fv:
                body = rename_vars(chi, {w: "x", v: "y"})
                if isinstance(f, Forall):
                    self.clauses.append(Or((Not(Atom(name, ("x",))), body)))
                    self.definitions.append((name, Forall("y", body)))
                else:
                    self.definitions.append((name, Exists("y", body)))
                    self.emit_exists(Atom(name, ("x",)), body)
                return Atom(name, (w,))
            body = rename_vars(chi, {v: "y", w: "x"})
            if isinstance(f, Forall):
                self.clauses.append(Or((Not(Atom(name, ("x",))), body)))
                self.definitions.append((name, Forall("y", body)))
            else:
                # constant symbol: true everywhere or nowhere
                self.clauses.append(Or((Not(Atom(name, ("x",))), Atom(name, ("y",)))))
                self.globals.append(Or((Not(Atom(name, ("x",))), rename_vars(body, {"y": "x"}))))
                self.definitions.append((name, Exists("y", body)))
            return Atom(name, (cv,))
        raise FormulaError(f"unexpected node in negation normal form: {f!r}")

    def emit_exists(self, premise: Formula, body: Formula):
        """Encode ``!x.(premise(x) -> ?y.body(x,y))``; y may equal x."""
        premise = simplify(premise)
        if premise == FALSE:
            return
        body = simplify(body)
        diag = _truth_value(rename_vars(body, {"y": "x"}))
        if diag == TRUE:
            return
        dirs = []
        for d in DIRECTIONS:
            bd = _truth_value(substitute_direction(body, d))
            if bd != FALSE:
                dirs.append((d, bd))
        if diag == FALSE and len(dirs) == 1:
            d, bd = dirs[0]
            self.conjs.append((d, bd, premise))
            return
        not_prem = simplify(to_nnf(Not(premise)))
        if not dirs:
            self.clauses.append(disj([not_prem, diag]) if diag != FALSE else not_prem)
            return
        self.counter += 1
        family = self.counter
        options = [] if diag == FALSE else [diag]
        for d, bd in dirs:
            sel = f"_nf{family}_{d.short}"
            self.fresh.append(sel)
            self.conjs.append((d, bd, Atom(sel, ("x",))))
            guard = And((Not(Eq("x", "y")),) + directional_split(bd, d).args)
            self.definitions.append((sel, And((premise, Exists("y", guard)))))
            options.append(Atom(sel, ("x",)))
        self.clauses.append(disj([not_prem] + options) if not_prem != FALSE else disj(options))


def scottify(f: Formula) -> NormalForm:
    """Compile a sentence to directional Scott normal form."""
    if classify_fragment(f) is FragmentClass.NOT_FO2:
        raise NotFO2Error("formula uses a variable other than x and y")
    if free_vars(f):
        raise FormulaError("scottify expects a sentence")
    base = signature_of(f)
    sc = _Scottifier(base)
    for c in conjuncts(to_nnf(f)):
        sc.top(c)
    psi0 = simplify(conj(sc.clauses)) if sc.clauses else TRUE
    sig = base.extend(sc.fresh)
    gammas, deltas, free = [], [], []
    for i, (d, bd, prem) in enumerate(sc.conjs, start=1):
        c = ExistentialConjunct(i, d, bd, prem)
        if d is Direction.BOTH:
            deltas.append(c)
        elif d is Direction.NONE:
            free.append(c)
        else:
            gammas.append(c)
    return NormalForm(
        psi0=psi0,
        gammas=tuple(gammas),
        deltas=tuple(deltas),
        extra_gammas_free=tuple(free),
        signature=sig,
        base_signature=base,
        global_existentials=tuple(simplify(g) for g in sc.globals),
        fresh=tuple(sc.fresh),
        renamed=tuple(sc.renamed),
        definitions=tuple(sc.definitions),
    )


# Equisatisfiability at desk scale -------------------------------------------------


@dataclass
class EquisatReport:
    bound: int
    unsound: list = field(default_factory=list)
    incomplete: list = field(default_factory=list)
    inconclusive: str | None = None
    nf_models_checked: int = 0
    f_models_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.unsound and not self.incomplete

    @property
    def empty(self) -> bool:
        return self.ok

    def lines(self) -> list[str]:
        out = []
        for s in self.unsound:
            out.append(f"(a) size-{s.n} model of the normal form does not satisfy the formula:\n{s.describe()}")
        for s in self.incomplete:
            out.append(f"(b) size-{s.n} model of the formula has no expansion to the normal form:\n{s.describe()}")
        if self.inconclusive:
            out.append(f"inconclusive: {self.inconclusive}")
        return out

    def __str__(self):
        if self.ok and not self.inconclusive:
            return (
                f"pass at bound {self.bound} ({self.nf_models_checked} normal-form models, "
                f"{self.f_models_checked} formula models)"
            )
        return "\n".join(self.lines()) or "pass"


def canonical_expansion(A, nf: NormalForm, frontier=()):
    """Expand A by evaluating the definitions of the fresh symbols in order.

    Elements in ``frontier`` are treated as having witnesses beyond the
    structure: existential definitions with a free ``x`` are set true there.
    """
    from .semantics import evaluate_open

    frontier = sorted(set(int(a) for a in frontier))
    base = A if A.sig == nf.base_signature else A.reduct(nf.base_signature)
    U, B = base.relations()
    sig = base.sig
    values = {}
    for name, definition in nf.definitions:
        sig = sig.extend([name])
        U = np.concatenate([U, np.zeros((U.shape[0], 1), dtype=bool)], axis=1)
        vals = np.array(evaluate_open(definition, sig, U[None], B[None])[0][:, 0])
        if frontier and _is_witness_definition(definition):
            vals[frontier] = True
        U[:, -1] = vals
        values[name] = vals
    return base.expand(nf.signature, values)


def _is_witness_definition(d: Formula) -> bool:
    body = d.args[-1] if isinstance(d, And) else d
    return isinstance(body, Exists) and free_vars(d) == {"x"}


def find_expansion(A, nf: NormalForm, limit: int = 1 << 16):
    """Some expansion of A over the fresh symbols that models nf, or None.

    Tries the canonical expansion first, then a bounded exhaustive search.
    Returns ``(structure_or_None, exhausted)``.
    """
    from .structure import check_model

    cand = canonical_expansion(A, nf)
    if check_model(cand, nf).ok:
        return cand, True
    fresh = [p for p in nf.signature.unary if p not in nf.base_signature.unary]
    extra_binary = [r for r in nf.signature.binary if r not in nf.base_signature.binary]
    if extra_binary:
        return None, False
    total = len(fresh) * A.n
    if (1 << total) > limit:
        return None, False
    base = A if A.sig == nf.base_signature else A.reduct(nf.base_signature)
    for bits in itertools.product((False, True), repeat=total):
        vals = {p: np.array(bits[i * A.n:(i + 1) * A.n]) for i, p in enumerate(fresh)}
        cand = base.expand(nf.signature, vals)
        if check_model(cand, nf).ok:
            return cand, True
    return None, True


def verify_equisat_small(f: Formula, nf: NormalForm, n: int, node_limit: int = 2_000_000) -> EquisatReport:
    """Compare models of ``f`` and of ``nf`` on all structures of size ≤ n."""
    from .model_finder import SearchBudgetError, TableTooLarge, all_models_up_to, enumerate_nf_models
    from .semantics import evaluate

    report = EquisatReport(bound=n)
    if n <= 0:
        report.inconclusive = f"inconclusive at bound {n}: empty size range, vacuous pass"
        return report
    base = signature_of(f, nf.base_signature)
    if base != nf.base_signature:
        base = nf.base_signature
    fresh_allowed = set(nf.signature.unary) - set(nf.base_signature.unary)
    try:
        for size_ in range(1, n + 1):
            models = enumerate_nf_models(nf, size_, selectors=fresh_allowed, node_limit=node_limit)
            report.nf_models_checked += len(models)
            reducts = list(dict.fromkeys(M.reduct(base) for M in models))
            for start in range(0, len(reducts), 4096):
                chunk = reducts[start:start + 4096]
                rel = [R.relations() for R in chunk]
                U = np.stack([u for u, _ in rel])
                B = np.stack([b for _, b in rel])
                sat = evaluate(f, base, U, B)
                report.unsound.extend(R for R, ok in zip(chunk, sat) if not ok)
        for A in all_models_up_to(f, n, signature=base):
            report.f_models_checked += 1
            exp, exhausted = find_expansion(A, nf)
            if exp is None:
                if exhausted:
                    report.incomplete.append(A)
                else:
                    report.inconclusive = f"inconclusive at bound {n}: expansion search too large"
    except (SearchBudgetError, TableTooLarge) as exc:
        report.inconclusive = f"inconclusive at bound {n}: {exc}"
    return report

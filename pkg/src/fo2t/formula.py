"""Syntax of two-variable sentences with a distinguished transitive symbol.

The concrete grammar, loosest binding first::

    formula := iff
    iff     := imp ('<->' imp)*
    imp     := or ('->' imp)?            right associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | ('!' | '?') VAR '.' unary | '(' formula ')'
             | 'true' | 'false' | NAME '(' VAR (',' VAR)? ')'
             | VAR '=' VAR | VAR '!=' VAR | VAR '<' VAR

``VAR`` is ``x`` or ``y``. ``a < b`` abbreviates ``T(a,b)``. A file holds
one or more statements separated by ``;``; ``#`` starts a line comment.
Several statements in one file are read as their conjunction.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

TRANSITIVE = "T"
VARIABLES = ("x", "y")
RESERVED = {"true", "false"}


class FormulaError(ValueError):
    """Base class for malformed input."""


class ParseError(FormulaError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class NotFO2Error(FormulaError):
    """Raised when a formula uses a third variable."""


def other(var: str) -> str:
    return "y" if var == "x" else "x"


@dataclass(frozen=True)
class Signature:
    """Ordered unary and binary symbol lists; ``T`` is always binary."""

    unary: tuple[str, ...] = ()
    binary: tuple[str, ...] = (TRANSITIVE,)

    def __post_init__(self):
        object.__setattr__(self, "unary", tuple(self.unary))
        object.__setattr__(self, "binary", tuple(self.binary))
        names = self.unary + self.binary
        if len(set(names)) != len(names):
            raise FormulaError(f"duplicate symbol in signature {names}")
        if self.binary.count(TRANSITIVE) != 1:
            raise FormulaError("signature must contain T exactly once as a binary symbol")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in RESERVED:
                raise FormulaError(f"bad symbol name {name!r}")

    @property
    def u(self) -> int:
        return len(self.unary)

    @property
    def k(self) -> int:
        return len(self.binary)

    @property
    def t_index(self) -> int:
        return self.binary.index(TRANSITIVE)

    def arity(self, name: str) -> int | None:
        if name in self.unary:
            return 1
        if name in self.binary:
            return 2
        return None

    def extend(self, unary: Iterable[str] = (), binary: Iterable[str] = ()) -> "Signature":
        new_u = self.unary + tuple(p for p in unary if p not in self.unary)
        new_b = self.binary + tuple(r for r in binary if r not in self.binary)
        return Signature(new_u, new_b)

    def union(self, other_sig: "Signature") -> "Signature":
        return self.extend(other_sig.unary, other_sig.binary)

    def __str__(self):
        return f"unary: {' '.join(self.unary) or '-'}; binary: {' '.join(self.binary)}"


# AST -------------------------------------------------------------------------


class Formula:
    """Base class of AST nodes. Nodes are immutable and hashable."""

    def __str__(self):
        return to_text(self)

    def __and__(self, other_f):
        return conj([self, other_f])

    def __or__(self, other_f):
        return disj([self, other_f])

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    pred: str
    args: tuple[str, ...]

    def __repr__(self):
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: str
    right: str

    def __repr__(self):
        return f"{self.left}={self.right}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


def T(a: str, b: str) -> Atom:
    return Atom(TRANSITIVE, (a, b))


def conj(items: Iterable[Formula]) -> Formula:
    """Conjunction that flattens nested conjunctions; empty means true."""
    flat: list[Formula] = []
    for f in items:
        if isinstance(f, And):
            flat.extend(f.args)
        else:
            flat.append(f)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(items: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for f in items:
        if isinstance(f, Or):
            flat.extend(f.args)
        else:
            flat.append(f)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def conjuncts(f: Formula) -> list[Formula]:
    """Top-level conjuncts, looking through nested conjunctions."""
    if isinstance(f, And):
        out: list[Formula] = []
        for a in f.args:
            out.extend(conjuncts(a))
        return out
    if f == TRUE:
        return []
    return [f]


def disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        out: list[Formula] = []
        for a in f.args:
            out.extend(disjuncts(a))
        return out
    return [f]


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from walk(c)


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in walk(f))


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def variables(f: Formula) -> set[str]:
    """Every variable name occurring anywhere, bound or free."""
    out: set[str] = set()
    for node in walk(f):
        if isinstance(node, Atom):
            out.update(node.args)
        elif isinstance(node, Eq):
            out.update((node.left, node.right))
        elif isinstance(node, (Forall, Exists)):
            out.add(node.var)
    return out


def predicates(f: Formula) -> dict[str, int]:
    """Predicate name to arity, in order of first occurrence."""
    out: dict[str, int] = {}
    for node in walk(f):
        if isinstance(node, Atom):
            if out.setdefault(node.pred, len(node.args)) != len(node.args):
                raise FormulaError(f"arity mismatch for {node.pred}")
    return out


def signature_of(f: Formula, base: Signature | None = None) -> Signature:
    preds = predicates(f)
    if preds.get(TRANSITIVE, 2) != 2:
        raise FormulaError("T must be binary")
    sig = base or Signature()
    unary = [p for p, a in preds.items() if a == 1]
    binary = [p for p, a in preds.items() if a == 2]
    for p in unary:
        if p in sig.binary:
            raise FormulaError(f"arity mismatch for {p}")
    for p in binary:
        if p in sig.unary:
            raise FormulaError(f"arity mismatch for {p}")
    return sig.extend(unary, binary)


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(n, (Forall, Exists)) for n in walk(f))


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with every Atom/Eq replaced by ``fn(node)``."""
    if isinstance(f, (Atom, Eq)):
        return fn(f)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, Iff):
        return Iff(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, Forall):
        return Forall(f.var, map_atoms(f.body, fn))
    if isinstance(f, Exists):
        return Exists(f.var, map_atoms(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def rename_vars(f: Formula, mapping: dict[str, str]) -> Formula:
    """Simultaneous variable renaming of a quantifier-free formula."""
    if not is_quantifier_free(f):
        raise FormulaError("rename_vars expects a quantifier-free formula")

    def sub(node):
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(mapping.get(a, a) for a in node.args))
        return Eq(mapping.get(node.left, node.left), mapping.get(node.right, node.right))

    return map_atoms(f, sub)


def rename_predicates(f: Formula, mapping: dict[str, str]) -> Formula:
    def sub(node):
        if isinstance(node, Atom):
            return Atom(mapping.get(node.pred, node.pred), node.args)
        return node

    return map_atoms(f, sub)


def _complementary(items) -> bool:
    flat = set(items)
    return any(isinstance(a, Not) and a.arg in flat for a in items)


def simplify(f: Formula) -> Formula:
    """Constant folding plus removal of vacuous quantifiers."""
    if isinstance(f, Eq):
        return TRUE if f.left == f.right else f
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        a = simplify(f.arg)
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, And):
        items = []
        for a in f.args:
            s = simplify(a)
            if s == FALSE:
                return FALSE
            for t in (s.args if isinstance(s, And) else (s,)):
                if t != TRUE and t not in items:
                    items.append(t)
        if _complementary(items):
            return FALSE
        return conj(items)
    if isinstance(f, Or):
        items = []
        for a in f.args:
            s = simplify(a)
            if s == TRUE:
                return TRUE
            for t in (s.args if isinstance(s, Or) else (s,)):
                if t != FALSE and t not in items:
                    items.append(t)
        if _complementary(items):
            return TRUE
        return disj(items)
    if isinstance(f, Implies):
        return simplify(Or((Not(f.left), f.right)))
    if isinstance(f, Iff):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, Const):
            return right if left.value else simplify(Not(right))
        if isinstance(right, Const):
            return left if right.value else simplify(Not(left))
        return Iff(left, right)
    if isinstance(f, (Forall, Exists)):
        body = simplify(f.body)
        if f.var not in free_vars(body):
            return body
        return type(f)(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


# Negation normal form ---------------------------------------------------------


def to_nnf(f: Formula) -> Formula:
    """Negation normal form; implications and biconditionals are desugared."""
    return _nnf(f, True)


def _nnf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, (Atom, Eq)):
        return f if positive else Not(f)
    if isinstance(f, Const):
        return f if positive else Const(not f.value)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        args = tuple(_nnf(a, positive) for a in f.args)
        return And(args) if positive else Or(args)
    if isinstance(f, Or):
        args = tuple(_nnf(a, positive) for a in f.args)
        return Or(args) if positive else And(args)
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.left), f.right)), positive)
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if positive:
            return And((_nnf(Or((Not(a), b)), True), _nnf(Or((a, Not(b))), True)))
        return Or((And((_nnf(a, True), _nnf(b, False))), And((_nnf(a, False), _nnf(b, True)))))
    if isinstance(f, Forall):
        body = _nnf(f.body, positive)
        return Forall(f.var, body) if positive else Exists(f.var, body)
    if isinstance(f, Exists):
        body = _nnf(f.body, positive)
        return Exists(f.var, body) if positive else Forall(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    for node in walk(f):
        if isinstance(node, (Implies, Iff)):
            return False
        if isinstance(node, Not) and not isinstance(node.arg, (Atom, Eq)):
            return False
    return True


# Fragment classification --------------------------------------------------------


class FragmentClass(enum.Enum):
    TRANSITIVE_WITNESSES = "TransitiveWitnesses"
    FREE_WITNESSES = "FreeWitnesses"
    GENERAL = "GeneralFO2T"
    NOT_FO2 = "NotFO2"

    def __str__(self):
        return self.value


def guard_kind(body: Formula, outer: str, inner: str) -> str | None:
    """Which direction literal pattern guards ``exists inner. body``.

    Returns ``"transitive"`` for one of the patterns T(o,i)&T(i,o),
    T(o,i)&~T(i,o), ~T(o,i)&T(i,o); ``"free"`` for ~T(o,i)&~T(i,o);
    ``None`` when no pattern is a conjunct of ``body``.
    """
    lits = set(conjuncts(body))
    fwd, bwd = T(outer, inner), T(inner, outer)
    pos_f, neg_f = fwd in lits, Not(fwd) in lits
    pos_b, neg_b = bwd in lits, Not(bwd) in lits
    if (pos_f and pos_b) or (pos_f and neg_b) or (neg_f and pos_b):
        return "transitive"
    if neg_f and neg_b:
        return "free"
    return None


def classify_fragment(f: Formula) -> FragmentClass:
    if not variables(f) <= set(VARIABLES):
        return FragmentClass.NOT_FO2
    g = to_nnf(f)
    kinds = set()
    for node in walk(g):
        if isinstance(node, Exists) and free_vars(node.body) == {"x", "y"}:
            kinds.add(guard_kind(node.body, other(node.var), node.var))
    if not kinds or kinds == {"transitive"}:
        return FragmentClass.TRANSITIVE_WITNESSES
    if kinds == {"free"}:
        return FragmentClass.FREE_WITNESSES
    return FragmentClass.GENERAL


# Printer -------------------------------------------------------------------------


_BINARY = (And, Or, Implies, Iff)


def to_text(f: Formula) -> str:
    """Render in the input grammar; ``parse(to_text(f)) == f``."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"{f.pred}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left}={f.right}"
    if isinstance(f, Not):
        return "~" + _wrap(f.arg)
    if isinstance(f, And):
        return " & ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left)} <-> {_wrap(f.right)}"
    if isinstance(f, Forall):
        return f"!{f.var}." + _wrap(f.body)
    if isinstance(f, Exists):
        return f"?{f.var}." + _wrap(f.body)
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula) -> str:
    text = to_text(f)
    return f"({text})" if isinstance(f, _BINARY) else text


# Parser --------------------------------------------------------------------------


_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
    |(?P<op><->|->|!=|[!?.()~&|=<,;])
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)""",
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("op", "name"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


@dataclass
class _Parser:
    toks: list[_Tok]
    arities: dict[str, int] = field(default_factory=dict)
    pos: int = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}", tok)
        return tok

    def variable(self) -> str:
        tok = self.next()
        if tok.kind != "name":
            raise self.error(f"expected a variable, found {tok.text or 'end of input'!r}", tok)
        if tok.text not in VARIABLES:
            raise self.error(f"variable {tok.text} not allowed", tok)
        return tok.text

    def statement(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek().text == "<->":
            self.next()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.next()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek().text == "|":
            self.next()
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self) -> Formula:
        items = [self.unary()]
        while self.peek().text == "&":
            self.next()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "~":
            self.next()
            return Not(self.unary())
        if tok.text in ("!", "?"):
            self.next()
            var = self.variable()
            self.expect(".")
            body = self.unary()
            return Forall(var, body) if tok.text == "!" else Exists(var, body)
        if tok.text == "(":
            self.next()
            inner = self.iff()
            self.expect(")")
            return inner
        if tok.kind == "name":
            if tok.text in RESERVED:
                self.next()
                return TRUE if tok.text == "true" else FALSE
            if self.toks[self.pos + 1].text == "(":
                return self.application()
            left = self.variable()
            op = self.next()
            if op.text not in ("=", "!=", "<"):
                raise self.error(f"expected '=', '!=' or '<' after variable, found {op.text!r}", op)
            right = self.variable()
            if op.text == "<":
                self.check_arity(TRANSITIVE, 2, op)
                return T(left, right)
            eq = Eq(left, right)
            return eq if op.text == "=" else Not(eq)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def application(self) -> Formula:
        name_tok = self.next()
        self.expect("(")
        args = [self.variable()]
        while self.peek().text == ",":
            self.next()
            args.append(self.variable())
        self.expect(")")
        if len(args) > 2:
            raise self.error(f"arity {len(args)} not supported for {name_tok.text}", name_tok)
        if name_tok.text == TRANSITIVE and len(args) != 2:
            raise self.error("arity mismatch: T is binary", name_tok)
        self.check_arity(name_tok.text, len(args), name_tok)
        return Atom(name_tok.text, tuple(args))

    def check_arity(self, name: str, arity: int, tok: _Tok):
        known = self.arities.setdefault(name, arity)
        if known != arity:
            raise self.error(f"arity mismatch: {name} used with {known} and {arity} arguments", tok)


def parse_statements(text: str, sentence: bool = True) -> list[Formula]:
    """Parse ``;``-separated statements."""
    p = _Parser(_tokenize(text))
    out: list[Formula] = []
    while p.peek().kind != "eof":
        if p.peek().text == ";":
            p.next()
            continue
        start = p.peek()
        f = p.statement()
        if sentence:
            free = free_vars(f)
            if free:
                raise ParseError(
                    f"free variable {' '.join(sorted(free))} in sentence", start.line, start.col
                )
        out.append(f)
        if p.peek().kind != "eof":
            p.expect(";")
    return out


def parse(text: str, sentence: bool = True) -> Formula:
    """Parse a sentence; several statements are conjoined in order."""
    stmts = parse_statements(text, sentence=sentence)
    if not stmts:
        raise ParseError("empty input", 1, 1)
    return stmts[0] if len(stmts) == 1 else And(tuple(stmts))


def parse_qf(text: str) -> Formula:
    """Parse an open quantifier-free formula over x, y."""
    f = parse(text, sentence=False)
    if not is_quantifier_free(f):
        raise ParseError("expected a quantifier-free formula", 1, 1)
    return f

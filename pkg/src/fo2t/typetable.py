"""Atomic 1-types and 2-types as packed integers.

Bit layout for a signature with ``u`` unary and ``k`` binary symbols, width
``w = u + k``:

* 1-type: bit ``i`` is ``P_i(x)`` for unary symbols in order, bit ``u + r``
  is ``R_r(x,x)``.
* 2-type: ``tx | ty << w | cross << 2w`` where ``tx``/``ty`` are the 1-types
  of x and y and cross bit ``2r`` is ``R_r(x,y)``, bit ``2r + 1`` is
  ``R_r(y,x)``.

Text encoding, used by the model file format::

    [+P -Q +Txx]                      1-type
    [+P -Q +Txx | +Txy -Tyx | -P +Q -Tyy]   2-type (x part | cross | y part)
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .formula import (
    Atom,
    Const,
    Eq,
    Formula,
    FormulaError,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Signature,
    T,
)


class Direction(enum.Enum):
    RIGHT = "->"
    LEFT = "<-"
    BOTH = "<->"
    NONE = "-"

    @property
    def bits(self) -> tuple[int, int]:
        """(T(x,y), T(y,x)) values for the pattern."""
        return _DIR_BITS[self]

    @property
    def short(self) -> str:
        return {"->": "r", "<-": "l", "<->": "s", "-": "n"}[self.value]

    @classmethod
    def from_bits(cls, txy: int, tyx: int) -> "Direction":
        return _BITS_DIR[(int(bool(txy)), int(bool(tyx)))]

    @classmethod
    def parse(cls, text: str) -> "Direction":
        aliases = {"→": "->", "←": "<-", "↔": "<->", "−": "-", "r": "->", "l": "<-", "s": "<->", "n": "-"}
        return cls(aliases.get(text, text))

    def guard(self) -> Formula:
        """Literal pattern over x, y for this direction."""
        a, b = self.bits
        fwd, bwd = T("x", "y"), T("y", "x")
        return And((fwd if a else Not(fwd), bwd if b else Not(bwd)))

    def flipped(self) -> "Direction":
        a, b = self.bits
        return Direction.from_bits(b, a)

    def __str__(self):
        return self.value


_DIR_BITS = {
    Direction.RIGHT: (1, 0),
    Direction.LEFT: (0, 1),
    Direction.BOTH: (1, 1),
    Direction.NONE: (0, 0),
}
_BITS_DIR = {v: k for k, v in _DIR_BITS.items()}
DIRECTIONS = (Direction.RIGHT, Direction.LEFT, Direction.BOTH, Direction.NONE)


@dataclass(frozen=True)
class TypeLayout:
    """Bit positions for one signature."""

    sig: Signature

    @property
    def u(self) -> int:
        return self.sig.u

    @property
    def k(self) -> int:
        return self.sig.k

    @property
    def w(self) -> int:
        return self.sig.u + self.sig.k

    @property
    def n_one(self) -> int:
        return 1 << self.w

    @property
    def n_cross(self) -> int:
        return 1 << (2 * self.k)

    @property
    def n_two(self) -> int:
        return 1 << (2 * self.w + 2 * self.k)

    @property
    def t_diag_bit(self) -> int:
        return self.u + self.sig.t_index

    @property
    def t_cross_bit(self) -> int:
        """Position of T(x,y) inside the cross part; T(y,x) is the next bit."""
        return 2 * self.sig.t_index

    def unary_bit(self, name: str) -> int:
        return self.sig.unary.index(name)

    def diag_bit(self, name: str) -> int:
        return self.u + self.sig.binary.index(name)

    def pack(self, tx: int, ty: int, cross: int) -> int:
        return tx | (ty << self.w) | (cross << (2 * self.w))

    def unpack(self, beta: int) -> tuple[int, int, int]:
        mask = self.n_one - 1
        return beta & mask, (beta >> self.w) & mask, beta >> (2 * self.w)

    def restrict(self, beta: int, var: str) -> int:
        tx, ty, _ = self.unpack(beta)
        if var == "x":
            return tx
        if var == "y":
            return ty
        raise ValueError(f"unknown variable {var!r}")

    def flip_cross(self, cross: int) -> int:
        out = 0
        for r in range(self.k):
            a = (cross >> (2 * r)) & 1
            b = (cross >> (2 * r + 1)) & 1
            out |= (b << (2 * r)) | (a << (2 * r + 1))
        return out

    def flip(self, beta: int) -> int:
        tx, ty, c = self.unpack(beta)
        return self.pack(ty, tx, self.flip_cross(c))

    def cross_direction(self, cross: int) -> Direction:
        sh = self.t_cross_bit
        return Direction.from_bits((cross >> sh) & 1, (cross >> (sh + 1)) & 1)

    def direction(self, beta: int) -> Direction:
        return self.cross_direction(self.unpack(beta)[2])

    def one_type_has_t(self, alpha: int) -> bool:
        return bool((alpha >> self.t_diag_bit) & 1)

    # text encoding

    def format_one(self, alpha: int, var: str = "x") -> str:
        return "[" + " ".join(self._one_tokens(alpha, var)) + "]"

    def _one_tokens(self, alpha: int, var: str) -> list[str]:
        toks = []
        for i, p in enumerate(self.sig.unary):
            toks.append(("+" if (alpha >> i) & 1 else "-") + p)
        for r, name in enumerate(self.sig.binary):
            toks.append(("+" if (alpha >> (self.u + r)) & 1 else "-") + name + var + var)
        return toks

    def _cross_tokens(self, cross: int) -> list[str]:
        toks = []
        for r, name in enumerate(self.sig.binary):
            toks.append(("+" if (cross >> (2 * r)) & 1 else "-") + name + "xy")
            toks.append(("+" if (cross >> (2 * r + 1)) & 1 else "-") + name + "yx")
        return toks

    def format_cross(self, cross: int) -> str:
        return "[" + " ".join(self._cross_tokens(cross)) + "]"

    def format_two(self, beta: int) -> str:
        tx, ty, c = self.unpack(beta)
        parts = [self._one_tokens(tx, "x"), self._cross_tokens(c), self._one_tokens(ty, "y")]
        return "[" + " | ".join(" ".join(p) for p in parts) + "]"

    def _token_table(self) -> dict[str, tuple[str, int]]:
        table = {}
        for i, p in enumerate(self.sig.unary):
            table[p] = ("unary", i)
        for r, name in enumerate(self.sig.binary):
            table[name + "xx"] = ("diag_x", r)
            table[name + "yy"] = ("diag_y", r)
            table[name + "xy"] = ("cross", 2 * r)
            table[name + "yx"] = ("cross", 2 * r + 1)
        return table

    def _parse_group(self, body: str, allowed: set[str], where: str) -> dict[tuple[str, int], int]:
        table = self._token_table()
        values: dict[tuple[str, int], int] = {}
        for tok in body.split():
            if tok[0] not in "+-" or tok[1:] not in table:
                raise FormulaError(f"{where}: bad atom token {tok!r}")
            kind, idx = table[tok[1:]]
            if kind not in allowed:
                raise FormulaError(f"{where}: atom {tok[1:]!r} not allowed here")
            val = 1 if tok[0] == "+" else 0
            if values.setdefault((kind, idx), val) != val:
                raise FormulaError(f"{where}: contradictory atom {tok[1:]!r}")
        return values

    def _one_from(self, values: dict, diag_kind: str, var: str, where: str) -> int:
        alpha = 0
        for i in range(self.u):
            if ("unary", i) not in values:
                raise FormulaError(f"{where}: atom {self.sig.unary[i]} undecided")
            alpha |= values[("unary", i)] << i
        for r in range(self.k):
            if (diag_kind, r) not in values:
                raise FormulaError(f"{where}: atom {self.sig.binary[r]}{var}{var} undecided")
            alpha |= values[(diag_kind, r)] << (self.u + r)
        return alpha

    @staticmethod
    def _groups(text: str, where: str) -> list[str]:
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise FormulaError(f"{where}: expected [...], got {text!r}")
        return body[1:-1].split("|")

    def parse_one(self, text: str, where: str = "one-type") -> int:
        """Parse ``[+P -Q +Txx]``; every atom must be decided."""
        groups = self._groups(text, where)
        if len(groups) != 1:
            raise FormulaError(f"{where}: a 1-type has no '|' groups")
        values = self._parse_group(groups[0], {"unary", "diag_x"}, where)
        return self._one_from(values, "diag_x", "x", where)

    def parse_cross(self, text: str, where: str = "two-type") -> tuple[int, int | None, int | None]:
        """Parse a 2-type, returning (cross, tx, ty).

        The x and y parts are optional: ``[+Txy -Tyx]`` gives only the cross
        bits and ``None`` for both 1-types.
        """
        groups = self._groups(text, where)
        if len(groups) not in (1, 3):
            raise FormulaError(f"{where}: expected 1 or 3 groups separated by '|'")
        cross_text = groups[0] if len(groups) == 1 else groups[1]
        values = self._parse_group(cross_text, {"cross"}, where)
        cross = 0
        for bit in range(2 * self.k):
            if ("cross", bit) not in values:
                name = self.sig.binary[bit // 2] + ("xy" if bit % 2 == 0 else "yx")
                raise FormulaError(f"{where}: atom {name} undecided")
            cross |= values[("cross", bit)] << bit
        if len(groups) == 1:
            return cross, None, None
        tx = self._one_from(self._parse_group(groups[0], {"unary", "diag_x"}, where), "diag_x", "x", where)
        ty = self._one_from(self._parse_group(groups[2], {"unary", "diag_y"}, where), "diag_y", "y", where)
        return cross, tx, ty

    def parse_two(self, text: str) -> int:
        cross, tx, ty = self.parse_cross(text)
        if tx is None:
            raise FormulaError("full 2-type needs x part | cross | y part")
        return self.pack(tx, ty, cross)


@lru_cache(maxsize=None)
def layout(sig: Signature) -> TypeLayout:
    return TypeLayout(sig)


def enumerate_1types(sig: Signature) -> list[int]:
    """All 1-type codes in increasing order."""
    return list(range(layout(sig).n_one))


@dataclass(frozen=True)
class TypeTable:
    sig: Signature
    one_types: np.ndarray
    two_types: np.ndarray
    partition: dict

    @property
    def layout(self) -> TypeLayout:
        return layout(self.sig)

    def direction_class(self, d: Direction) -> np.ndarray:
        return self.partition[d]


def enumerate_2types(sig: Signature) -> TypeTable:
    """Complete 2-type table with the four direction classes."""
    lay = layout(sig)
    codes = np.arange(lay.n_two, dtype=np.int64)
    cross = codes >> (2 * lay.w)
    txy = (cross >> lay.t_cross_bit) & 1
    tyx = (cross >> (lay.t_cross_bit + 1)) & 1
    partition = {}
    for d in DIRECTIONS:
        a, b = d.bits
        partition[d] = codes[(txy == a) & (tyx == b)]
    for arr in partition.values():
        arr.setflags(write=False)
    ones = np.arange(lay.n_one, dtype=np.int64)
    ones.setflags(write=False)
    codes.setflags(write=False)
    return TypeTable(sig, ones, codes, partition)


# Compiling quantifier-free formulas to bit expressions ---------------------------


# constants keep array shape when ``t`` is a numpy array
_ONE = "((t & 0) | 1)"
_ZERO = "(t & 0)"


def _bit(pos: int) -> str:
    return f"((t >> {pos}) & 1)"


def _expr(f: Formula, lay: TypeLayout, mode: str) -> str:
    """Python expression over ``t`` (1-type code in 'diag', 2-type in 'pair')."""
    if isinstance(f, Const):
        return _ONE if f.value else _ZERO
    if isinstance(f, Eq):
        same = f.left == f.right
        return _ONE if (same or mode == "diag") else _ZERO
    if isinstance(f, Atom):
        return _bit(_atom_bit(f, lay, mode))
    if isinstance(f, Not):
        return f"(1 ^ {_expr(f.arg, lay, mode)})"
    if isinstance(f, And):
        return "(" + " & ".join(_expr(a, lay, mode) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(_expr(a, lay, mode) for a in f.args) + ")"
    if isinstance(f, Implies):
        return f"((1 ^ {_expr(f.left, lay, mode)}) | {_expr(f.right, lay, mode)})"
    if isinstance(f, Iff):
        return f"(1 ^ ({_expr(f.left, lay, mode)} ^ {_expr(f.right, lay, mode)}))"
    raise FormulaError(f"quantifier in a formula that must be quantifier-free: {f}")


def _atom_bit(a: Atom, lay: TypeLayout, mode: str) -> int:
    sig = lay.sig
    arity = sig.arity(a.pred)
    if arity is None:
        raise FormulaError(f"atom outside signature: {a.pred}")
    if arity != len(a.args):
        raise FormulaError(f"arity mismatch for {a.pred}")
    if arity == 1:
        i = sig.unary.index(a.pred)
        if mode == "diag" or a.args[0] == "x":
            return i
        return lay.w + i
    r = sig.binary.index(a.pred)
    v1, v2 = a.args
    if mode == "diag" or v1 == v2:
        base = 0 if (mode == "diag" or v1 == "x") else lay.w
        return base + lay.u + r
    return 2 * lay.w + 2 * r + (0 if v1 == "x" else 1)


@lru_cache(maxsize=4096)
def compile_qf(f: Formula, sig: Signature, mode: str = "pair"):
    """Compile to a function of a type code returning 0/1.

    ``mode='pair'`` reads a 2-type (x and y distinct); ``mode='diag'`` reads
    a 1-type and evaluates ``f`` with y identified with x. The returned
    function also accepts numpy integer arrays.
    """
    if mode not in ("pair", "diag"):
        raise ValueError(mode)
    src = _expr(f, layout(sig), mode)
    return eval(f"lambda t: {src}", {})  # noqa: S307 - generated from the AST only


def type_satisfies(beta: int, psi: Formula, sig: Signature) -> bool:
    """Truth of ``psi(x,y)`` under the proper 2-type ``beta``."""
    return bool(compile_qf(psi, sig, "pair")(beta))


def diag_satisfies(alpha: int, psi: Formula, sig: Signature) -> bool:
    """Truth of ``psi(x,x)`` under the 1-type ``alpha``."""
    return bool(compile_qf(psi, sig, "diag")(alpha))


def count_2types_satisfying(psi: Formula, sig: Signature) -> int:
    table = enumerate_2types(sig)
    return int(np.count_nonzero(compile_qf(psi, sig, "pair")(table.two_types)))

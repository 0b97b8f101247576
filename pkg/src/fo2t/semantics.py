"""Direct, vectorized evaluation of formulas on batches of structures.

This evaluator interprets the AST as written (no normal form, no type
tables) and serves as the independent oracle for the rest of the package.
A batch is ``unary`` of shape (N, n, u) and ``binary`` of shape
(N, n, n, k), both boolean.
"""
from __future__ import annotations

import numpy as np

from .formula import (
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
)


def evaluate(f: Formula, sig: Signature, unary: np.ndarray, binary: np.ndarray) -> np.ndarray:
    """Truth value of the sentence ``f`` in each structure of the batch."""
    n_batch, n = binary.shape[0], binary.shape[1]
    val = _eval(f, sig, unary, binary, n)
    return np.broadcast_to(val, (n_batch, n, n))[:, 0, 0].copy()


def evaluate_open(f: Formula, sig: Signature, unary: np.ndarray, binary: np.ndarray) -> np.ndarray:
    """Values of ``f(x, y)`` with shape (N, n, n), indexed [batch, x, y]."""
    n_batch, n = binary.shape[0], binary.shape[1]
    return np.broadcast_to(_eval(f, sig, unary, binary, n), (n_batch, n, n)).copy()


def _eval(f, sig, U, B, n):
    # arrays broadcast over axes (batch, x, y)
    if isinstance(f, Const):
        return np.full((1, 1, 1), f.value)
    if isinstance(f, Eq):
        if f.left == f.right:
            return np.ones((1, 1, 1), dtype=bool)
        return np.eye(n, dtype=bool)[None]
    if isinstance(f, Atom):
        arity = sig.arity(f.pred)
        if arity is None or arity != len(f.args):
            raise FormulaError(f"atom outside signature: {f.pred}")
        if arity == 1:
            col = U[:, :, sig.unary.index(f.pred)]
            return col[:, :, None] if f.args[0] == "x" else col[:, None, :]
        rel = B[:, :, :, sig.binary.index(f.pred)]
        a, b = f.args
        if a == b:
            diag = np.diagonal(rel, axis1=1, axis2=2)
            return diag[:, :, None] if a == "x" else diag[:, None, :]
        return rel if a == "x" else rel.transpose(0, 2, 1)
    if isinstance(f, Not):
        return ~_eval(f.arg, sig, U, B, n)
    if isinstance(f, And):
        out = _eval(f.args[0], sig, U, B, n)
        for a in f.args[1:]:
            out = out & _eval(a, sig, U, B, n)
        return out
    if isinstance(f, Or):
        out = _eval(f.args[0], sig, U, B, n)
        for a in f.args[1:]:
            out = out | _eval(a, sig, U, B, n)
        return out
    if isinstance(f, Implies):
        return ~_eval(f.left, sig, U, B, n) | _eval(f.right, sig, U, B, n)
    if isinstance(f, Iff):
        return _eval(f.left, sig, U, B, n) == _eval(f.right, sig, U, B, n)
    if isinstance(f, (Forall, Exists)):
        body = _eval(f.body, sig, U, B, n)
        axis = 1 if f.var == "x" else 2
        if body.shape[axis] == 1:
            return body
        red = np.all if isinstance(f, Forall) else np.any
        return red(body, axis=axis, keepdims=True)
    raise TypeError(f"not a formula: {f!r}")


def holds(f: Formula, structure) -> bool:
    """Truth of ``f`` in a single :class:`~fo2t.structure.Structure`."""
    U, B = structure.relations()
    return bool(evaluate(f, structure.sig, U[None], B[None])[0])

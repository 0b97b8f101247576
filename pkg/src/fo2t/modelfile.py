"""Text format for structures and certificates.

A model file is a sequence of lines; ``#`` starts a comment::

    signature: unary P Q
    signature: binary T
    element 0: [+P -Q -Txx]
    element 1: [-P +Q -Txx]
    pair 0 1: [+Txy -Tyx]

Only pairs ``i < j`` are stored; the pair ``j i`` is the flip. A pair line may
give just the cross atoms or a full 2-type ``[x part | cross | y part]``,
whose x and y parts must agree with the element lines. Every element and
every pair must be listed.

A certificate file adds segment lines and optional stored maps::

    segment 0: 0
    segment 1: 1
    map S0,S2->S0,S1: 0->0 2->1

A map line states that the connection type of the left segment pair is
transferred from the right one along the listed element map.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .formula import FormulaError, Signature
from .structure import Structure, StructureBuilder


class ModelFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class ParsedFile:
    structure: Structure
    segments: dict[int, tuple[int, ...]] = field(default_factory=dict)
    maps: dict[tuple, dict[int, int]] = field(default_factory=dict)


_MAP_RE = re.compile(r"^S(\d+),S(\d+)->S(\d+),S(\d+)$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_model_text(text: str) -> ParsedFile:
    unary, binary = None, None
    elements: dict[int, tuple[str, int]] = {}
    pairs: dict[tuple[int, int], tuple[str, int]] = {}
    segments: dict[int, tuple[int, ...]] = {}
    maps: dict[tuple, dict[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ModelFileError(f"expected 'keyword: ...', got {line!r}", lineno)
        words = head.split()
        body = body.strip()
        key = words[0]
        if key == "signature":
            names = tuple(body.split()[1:])
            kind = body.split()[0] if body else ""
            if kind == "unary":
                unary = tuple(n for n in names if n != "-")
            elif kind == "binary":
                binary = names
            else:
                raise ModelFileError("signature line must say 'unary' or 'binary'", lineno)
        elif key == "element" and len(words) == 2:
            elements[_int(words[1], lineno)] = (body, lineno)
        elif key == "pair" and len(words) == 3:
            i, j = _int(words[1], lineno), _int(words[2], lineno)
            if i >= j:
                raise ModelFileError("pair lines need i < j", lineno)
            pairs[(i, j)] = (body, lineno)
        elif key == "segment" and len(words) == 2:
            segments[_int(words[1], lineno)] = tuple(_int(w, lineno) for w in body.split())
        elif key == "map" and len(words) == 2:
            m = _MAP_RE.match(words[1])
            if not m:
                raise ModelFileError(f"bad map header {words[1]!r}", lineno)
            left = (int(m.group(1)), int(m.group(2)))
            right = (int(m.group(3)), int(m.group(4)))
            f = {}
            for tok in body.split():
                a, arrow, b = tok.partition("->")
                if not arrow:
                    raise ModelFileError(f"bad map entry {tok!r}", lineno)
                f[_int(a, lineno)] = _int(b, lineno)
            maps[(left, right)] = f
        else:
            raise ModelFileError(f"unknown line {line!r}", lineno)
    if binary is None:
        binary = ("T",)
    try:
        sig = Signature(unary or (), binary)
    except (FormulaError, ValueError) as exc:
        raise ModelFileError(str(exc)) from exc
    n = len(elements)
    if n == 0:
        raise ModelFileError("no element lines")
    if sorted(elements) != list(range(n)):
        raise ModelFileError("elements must be numbered 0..n-1")
    bld = StructureBuilder(sig, n)
    lay = bld.layout
    for i, (body, lineno) in elements.items():
        try:
            bld.set_one(i, lay.parse_one(body, f"element {i}"))
        except FormulaError as exc:
            raise ModelFileError(str(exc), lineno) from exc
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in pairs:
                raise ModelFileError(f"pair {i} {j} missing")
            body, lineno = pairs[(i, j)]
            try:
                cross, tx, ty = lay.parse_cross(body, f"pair {i} {j}")
            except FormulaError as exc:
                raise ModelFileError(str(exc), lineno) from exc
            if tx is not None and (tx != bld.tp1[i] or ty != bld.tp1[j]):
                raise ModelFileError(f"pair {i} {j} disagrees with the element 1-types", lineno)
            bld.set_cross(i, j, cross)
    return ParsedFile(bld.build(), segments, maps)


def _int(word: str, lineno: int) -> int:
    try:
        return int(word)
    except ValueError:
        raise ModelFileError(f"expected an integer, got {word!r}", lineno) from None


def format_structure(A: Structure) -> str:
    sig = A.sig
    lines = [
        "signature: unary " + (" ".join(sig.unary) if sig.unary else "-"),
        "signature: binary " + " ".join(sig.binary),
    ]
    lines.append(A.describe())
    return "\n".join(lines) + "\n"


def format_certificate(structure: Structure, segments, maps=None) -> str:
    out = [format_structure(structure).rstrip("\n")]
    for j, seg in enumerate(segments):
        if seg:
            out.append(f"segment {j}: " + " ".join(str(a) for a in seg))
    for (left, right), f in sorted((maps or {}).items()):
        head = f"map S{left[0]},S{left[1]}->S{right[0]},S{right[1]}"
        out.append(head + ": " + " ".join(f"{a}->{b}" for a, b in sorted(f.items())))
    return "\n".join(out) + "\n"


def read_structure(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return parse_model_text(fh.read()).structure


def write_structure(path, A: Structure):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_structure(A))

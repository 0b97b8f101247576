"""Bundled formula corpus, the explicit infinite-model constructions, and the
end-to-end pipeline.

The manifest ``data/manifest.json`` lists one entry per formula file::

    {"name": ..., "file": ..., "fragment": "TransitiveWitnesses",
     "finite": {"bound": 6, "expect": "none"} | {"bound": 3, "expect": "model", "size": 1},
     "certificate": {"max_segment": 1, "expect": "found" | "finite" | "not_found" | "skipped"},
     "source": "literature" | "computed" | "trivial"}

``source`` says where an expectation comes from; the pipeline recomputes
every expectation regardless.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..certificate import (
    Certificate,
    check_certificate,
    find_certificate,
    unfold,
    unfold_segments,
    verify_unfolding,
)
from ..formula import Signature, classify_fragment, parse
from ..model_finder import (
    BudgetExhausted,
    NoModelUpTo,
    SearchConfig,
    all_models_up_to,
    enumerate_nf_models,
    find_finite_model,
)
from ..normal_form import find_expansion, scottify, verify_equisat_small
from ..structure import Structure, canonical_form, check_model

PHI_SIGNATURE = Signature(tuple(f"A{i}" for i in range(5)))
UPSILON_SIGNATURE = Signature(("P", "Q"))


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    fragment: str
    finite: dict
    certificate: dict = field(default_factory=dict)
    source: str = "computed"
    note: str = ""

    def path(self) -> Path:
        return data_dir() / self.file

    def text(self) -> str:
        return self.path().read_text(encoding="utf-8")


def data_dir() -> Path:
    return Path(str(resources.files(__package__) / "data"))


_SOURCES = {"literature", "computed", "trivial"}
_CERT_EXPECT = {"found", "finite", "not_found", "skipped"}


def load_manifest(path=None) -> list[CorpusEntry]:
    path = Path(path) if path else data_dir() / "manifest.json"
    raw = json.loads(path.read_text(encoding="utf-8"))
    entries = []
    for item in raw.get("entries", []):
        try:
            entry = CorpusEntry(**item)
        except TypeError as exc:
            raise ManifestError(f"bad manifest entry {item.get('name')!r}: {exc}") from exc
        if entry.source not in _SOURCES:
            raise ManifestError(f"{entry.name}: unknown source {entry.source!r}")
        if entry.finite.get("expect") not in ("none", "model"):
            raise ManifestError(f"{entry.name}: finite.expect must be 'none' or 'model'")
        if entry.certificate and entry.certificate.get("expect") not in _CERT_EXPECT:
            raise ManifestError(f"{entry.name}: bad certificate expectation")
        entries.append(entry)
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise ManifestError("duplicate entry names")
    return entries


def get_entry(name: str) -> CorpusEntry:
    for e in load_manifest():
        if e.name == name:
            return e
    raise KeyError(name)


def load_formula(name: str):
    return parse(get_entry(name).text())


# Explicit constructions ------------------------------------------------------------


def phi_index(k: int, l: int) -> int:
    """Element number of ``a_l`` in :func:`build_phi_model_prefix` ``(k)``."""
    return l + k


def build_phi_model_prefix(k: int, sig: Signature = PHI_SIGNATURE) -> Structure:
    """Elements ``a_-k .. a_k``: ``a_l`` in class ``l mod 5``, ``a_l < a_m``
    exactly when ``m ≥ l + 2``, so neighbours are incomparable."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n = 2 * k + 1
    U = np.zeros((n, sig.u), dtype=bool)
    for i in range(n):
        U[i, sig.unary.index(f"A{(i - k) % 5}")] = True
    B = np.zeros((n, n, sig.k), dtype=bool)
    t = sig.t_index
    for a in range(n):
        for b in range(a + 2, n):
            B[a, b, t] = True
    return Structure.from_relations(sig, U, B)


def phi_frontier(k: int) -> tuple[int, int]:
    return (phi_index(k, -k), phi_index(k, k))


def build_upsilon_model(n: int, sig: Signature = UPSILON_SIGNATURE) -> Structure:
    """``p_1 .. p_n`` (elements ``0..n-1``) and ``q_1 .. q_n`` (``n..2n-1``).

    Edges ``p_i -> p_{i+1}`` and ``q_i -> p_{i+1}``, closed transitively.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    U = np.zeros((2 * n, sig.u), dtype=bool)
    U[:n, sig.unary.index("P")] = True
    U[n:, sig.unary.index("Q")] = True
    B = np.zeros((2 * n, 2 * n, sig.k), dtype=bool)
    t = sig.t_index
    for i in range(n):
        for j in range(i + 1, n):
            B[i, j, t] = True
            B[n + i, j, t] = True
    return Structure.from_relations(sig, U, B)


def upsilon_frontier(n: int) -> tuple[int, int]:
    return (n - 1, 2 * n - 1)


def max_antichain_size(A: Structure) -> int:
    """Largest set of pairwise incomparable elements (exhaustive, small n)."""
    Tm = A.t_matrix()
    comp = Tm | Tm.T
    best = 1
    elems = list(A.elements)
    for r in range(2, A.n + 1):
        if any(all(not comp[a, b] for a, b in itertools.combinations(S, 2)) for S in itertools.combinations(elems, r)):
            best = r
        else:
            break
    return best


# Oracle agreement --------------------------------------------------------------------


@dataclass
class AgreementReport:
    bound: int
    formula_models: int = 0
    nf_models: int = 0
    only_formula: list = field(default_factory=list)
    only_nf: list = field(default_factory=list)
    unconfirmed: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.only_formula or self.only_nf or self.unconfirmed)

    def __str__(self):
        if self.ok:
            return f"agree at bound {self.bound} ({self.formula_models} model classes)"
        return (
            f"disagree at bound {self.bound}: {len(self.only_formula)} classes only by evaluation, "
            f"{len(self.only_nf)} only by the normal form, {len(self.unconfirmed)} unconfirmed expansions"
        )


def oracle_agreement(f, nf=None, n: int = 3) -> AgreementReport:
    """Compare model classes of ``f`` by direct evaluation with those of its
    normal form, on structures of size ≤ n.

    Formula side: every transitive base structure, evaluated on the syntax
    tree. Normal-form side: every model found by the search with the fresh
    symbols left open, confirmed by ``check_model``, then reduced. Each
    formula model must also have an expansion accepted by ``check_model``.
    """
    nf = nf or scottify(f)
    base = nf.base_signature
    rep = AgreementReport(n)
    F = {}
    for A in all_models_up_to(f, n, signature=base):
        F.setdefault(canonical_form(A), A)
    rep.formula_models = len(F)
    fresh = set(nf.signature.unary) - set(base.unary)
    N = {}
    for size in range(1, n + 1):
        for M in enumerate_nf_models(nf, size, selectors=fresh):
            if not check_model(M, nf).ok:
                rep.unconfirmed.append(M)
                continue
            red = M.reduct(base)
            N.setdefault(canonical_form(red), red)
    rep.nf_models = len(N)
    rep.only_formula = [F[k] for k in F.keys() - N.keys()]
    rep.only_nf = [N[k] for k in N.keys() - F.keys()]
    for A in F.values():
        exp, _ = find_expansion(A, nf)
        if exp is None or not check_model(exp, nf).ok:
            rep.unconfirmed.append(A)
    return rep


# Pipeline -------------------------------------------------------------------------


@dataclass
class StageResult:
    name: str
    status: str  # ok, fail, skip, error
    detail: str = ""
    seconds: float = 0.0


@dataclass
class PipelineReport:
    """Per-entry outcome.

    ``to_dict`` schema: ``{"entry": str, "ok": bool, "halted": str | null,
    "stages": [{"name", "status", "detail", "seconds"}], "mismatches": [str],
    "results": {"fragment", "finite", "model_size", "certificate", "antichain"}}``.
    """

    entry: str
    stages: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    halted: str | None = None

    @property
    def ok(self) -> bool:
        return self.halted is None and not self.mismatches

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "ok": self.ok,
            "halted": self.halted,
            "stages": [s.__dict__ for s in self.stages],
            "mismatches": list(self.mismatches),
            "results": dict(self.results),
        }

    def to_text(self) -> str:
        lines = [f"{self.entry}: {'ok' if self.ok else 'FAIL'}"]
        for s in self.stages:
            lines.append(f"  {s.name:<12} {s.status:<5} {s.detail} ({s.seconds:.2f}s)")
        for m in self.mismatches:
            lines.append(f"  mismatch: {m}")
        if self.halted:
            lines.append(f"  halted at stage {self.halted}")
        return "\n".join(lines)


class _Halt(Exception):
    pass


def run_pipeline(entry: CorpusEntry, equisat_bound: int = 3, node_limit: int | None = None, kernel=None) -> PipelineReport:
    """parse, classify, scottify, equisat, solve, certificate, then compare."""
    rep = PipelineReport(entry.name)
    state = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            status, detail = fn()
        except Exception as exc:  # any stage failure halts with its name
            rep.stages.append(StageResult(name, "error", f"{type(exc).__name__}: {exc}", time.perf_counter() - t0))
            rep.halted = name
            raise _Halt from exc
        rep.stages.append(StageResult(name, status, detail, time.perf_counter() - t0))
        if status == "fail":
            rep.halted = name
            raise _Halt

    def do_parse():
        state["f"] = parse(entry.text())
        return "ok", f"{len(entry.text().splitlines())} lines"

    def do_classify():
        frag = str(classify_fragment(state["f"]))
        rep.results["fragment"] = frag
        if frag != entry.fragment:
            rep.mismatches.append(f"fragment {frag}, expected {entry.fragment}")
        return "ok", frag

    def do_nf():
        state["nf"] = scottify(state["f"])
        nf = state["nf"]
        return "ok", f"{nf.m} γ, {len(nf.deltas)} δ, {len(nf.extra_gammas_free)} free, fresh {len(nf.fresh)}"

    def do_equisat():
        r = verify_equisat_small(state["f"], state["nf"], equisat_bound)
        if not r.ok:
            return "fail", str(r)
        return "ok", str(r)

    def do_solve():
        fin = entry.finite
        cfg = SearchConfig(max_size=fin["bound"], node_limit=node_limit, kernel=kernel)
        res = find_finite_model(state["nf"], cfg)
        state["model"] = res
        if isinstance(res, Structure):
            rep.results["finite"] = "model"
            rep.results["model_size"] = res.n
            rep.results["antichain"] = max_antichain_size(res)
            if fin["expect"] != "model" or fin.get("size") != res.n:
                rep.mismatches.append(f"found a model of size {res.n}, expected {_finite_text(fin)}")
            return "ok", f"model of size {res.n}"
        rep.results["finite"] = str(res)
        if isinstance(res, BudgetExhausted):
            rep.mismatches.append(f"{res}, expected {_finite_text(fin)}")
            return "ok", str(res)
        if fin["expect"] != "none":
            rep.mismatches.append(f"{res}, expected {_finite_text(fin)}")
        return "ok", str(res)

    def do_cert():
        nf = state["nf"]
        expect = entry.certificate.get("expect", "skipped")
        if not nf.is_transitive_witness_form():
            rep.results["certificate"] = "skipped"
            if expect != "skipped":
                rep.mismatches.append(f"certificate skipped, expected {expect}")
            return "skip", "free-witness conjuncts: certificates do not apply outside the transitive-witness fragment"
        b = entry.certificate.get("max_segment", 1)
        model = state.get("model")
        finite_size = model.n if isinstance(model, Structure) else entry.finite["bound"]
        cfg = SearchConfig(max_size=finite_size, node_limit=node_limit, kernel=kernel)
        res = find_certificate(nf, b, cfg, finite_first=not isinstance(model, NoModelUpTo))
        if isinstance(res, Certificate):
            verdict = check_certificate(res, nf)
            if not verdict.ok:
                return "fail", f"search returned a certificate the checker rejects: {verdict}"
            got = "finite" if res.finite else "found"
            detail = f"{got} certificate, {res.size} elements, segments {[len(s) for s in res.segments]}"
            if not res.finite:
                k = 6
                v = verify_unfolding(unfold(res, k), nf, unfold_segments(res, k)[-1])
                if not v.ok:
                    return "fail", f"unfolding fails: {v}"
                detail += f"; unfold({k}) verified"
        else:
            got = "not_found"
            detail = str(res)
            if isinstance(res, BudgetExhausted):
                got = "budget"
        rep.results["certificate"] = got
        if expect != got:
            rep.mismatches.append(f"certificate {got}, expected {expect}")
        return "ok", detail

    try:
        stage("parse", do_parse)
        stage("classify", do_classify)
        stage("scottify", do_nf)
        stage("equisat", do_equisat)
        stage("solve", do_solve)
        stage("certificate", do_cert)
    except _Halt:
        pass
    return rep


def _finite_text(fin: dict) -> str:
    if fin["expect"] == "none":
        return f"NoModelUpTo({fin['bound']})"
    return f"model of size {fin['size']}"


def run_corpus(names=None, workers: int = 1, **kw) -> list[PipelineReport]:
    entries = load_manifest()
    if names:
        wanted = set(names)
        unknown = wanted - {e.name for e in entries}
        if unknown:
            raise KeyError(f"unknown corpus entries: {sorted(unknown)}")
        entries = [e for e in entries if e.name in wanted]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, entries, itertools.repeat(kw)))
    return [run_pipeline(e, **kw) for e in entries]


def _run_one(entry, kw):
    return run_pipeline(entry, **kw)


__all__ = [
    "AgreementReport",
    "CorpusEntry",
    "ManifestError",
    "PipelineReport",
    "build_phi_model_prefix",
    "build_upsilon_model",
    "get_entry",
    "load_formula",
    "load_manifest",
    "max_antichain_size",
    "oracle_agreement",
    "phi_frontier",
    "phi_index",
    "run_corpus",
    "run_pipeline",
    "upsilon_frontier",
]

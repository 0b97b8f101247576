import pytest

from fo2t.formula import parse
from fo2t.model_finder import SearchConfig, enumerate_nf_models, find_finite_model, model_classes
from fo2t.model_finder import _kernel
from fo2t.normal_form import scottify

pytestmark = pytest.mark.skipif("compiled" not in _kernel.available(), reason="compiled kernel not built")

CASES = [
    "!x.~T(x,x)",
    "!x.(P(x) -> ?y.(T(x,y) & ~T(y,x) & ~P(y))) & ?x.P(x)",
    "!x.?y.(T(x,y) & T(y,x) & x != y & (P(x) <-> ~P(y)))",
    "!x.?y.(T(x,y) & ~T(y,x)) & !x.~T(x,x)",
    "!x.(P(x) | ?y.(~T(x,y) & T(y,x) & Q(y)))",
]


@pytest.mark.parametrize("text", CASES)
def test_same_verdict_and_node_count(text):
    nf = scottify(parse(text))
    a = find_finite_model(nf, SearchConfig(max_size=4, kernel="compiled"))
    b = find_finite_model(nf, SearchConfig(max_size=4, kernel="python"))
    assert type(a) is type(b)
    if hasattr(a, "nodes"):
        assert a.nodes == b.nodes
    else:
        assert a == b


@pytest.mark.parametrize("text", CASES)
@pytest.mark.parametrize("n", [2, 3])
def test_same_enumeration(text, n):
    nf = scottify(parse(text))
    a = enumerate_nf_models(nf, n, kernel="compiled")
    b = enumerate_nf_models(nf, n, kernel="python")
    assert a == b
    assert model_classes(a) == model_classes(b)


def test_unknown_kernel():
    with pytest.raises(ValueError):
        _kernel.get_kernel("gpu")


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_search.py"
    spec = importlib.util.spec_from_file_location("bench_search", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--only", "phi-5", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "phi-5" in out and "11411" in out

"""Compare the compiled and pure-Python search kernels.

    python benchmarks/bench_search.py [--repeat 3] [--only NAME ...]

Each workload is a complete bounded search, so both kernels visit the same
nodes; the table reports node counts, best wall time and the speedup.
"""
import argparse
import time

from fo2t.corpus import load_formula
from fo2t.formula import parse
from fo2t.model_finder import SearchConfig, enumerate_nf_models, find_finite_model
from fo2t.model_finder import _kernel
from fo2t.normal_form import scottify


def _finite(formula, size):
    nf = scottify(formula)
    return lambda kernel: find_finite_model(nf, SearchConfig(max_size=size, kernel=kernel)).nodes


def _enumerate(formula, size):
    nf = scottify(formula)
    return lambda kernel: len(enumerate_nf_models(nf, size, kernel=kernel))


WORKLOADS = {
    "strict-order-6": _finite(load_formula("strict-order-infinity"), 6),
    "phi-5": _finite(load_formula("phi"), 5),
    "alternating-chain-6": _finite(load_formula("alternating-chain"), 6),
    "two-sided-6": _finite(load_formula("two-sided-infinity"), 6),
    "posets-5": _enumerate(parse("!x.~T(x,x)"), 5),
}


def best_time(fn, kernel, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(kernel)
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", nargs="*", choices=sorted(WORKLOADS))
    args = ap.parse_args(argv)
    kernels = _kernel.available()
    if "compiled" not in kernels:
        print("compiled kernel not built; only timing the pure-Python kernel")
    names = args.only or list(WORKLOADS)
    print(f"{'workload':<22}{'result':>10}" + "".join(f"{k + ' s':>14}" for k in kernels) + f"{'speedup':>10}")
    for name in names:
        row, results = {}, set()
        for k in kernels:
            row[k], res = best_time(WORKLOADS[name], k, args.repeat)
            results.add(res)
        if len(results) != 1:
            raise SystemExit(f"{name}: kernels disagree: {results}")
        speed = f"{row['python'] / row['compiled']:>9.1f}x" if "compiled" in row else f"{'-':>10}"
        cells = "".join(f"{row[k]:>14.4f}" for k in kernels)
        print(f"{name:<22}{results.pop():>10}{cells}{speed}")


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python polynomial kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 7]

Both backends run the same random Groebner and reduction workloads; the
script checks that the answers agree and prints wall-clock times.
"""
import argparse
import random
import time

from resolvekit import _pykernel
from resolvekit.idealkit import MonomialOrder

try:
    from resolvekit import _ckernel
except ImportError:
    _ckernel = None


def random_poly(rng, nvars, nterms, deg, coeff=9):
    terms = {}
    while len(terms) < nterms:
        e = [0] * nvars
        for _ in range(rng.randint(1, deg)):
            e[rng.randrange(nvars)] += 1
        c = rng.randint(-coeff, coeff)
        if c:
            terms[tuple(e)] = c
    return terms


def workloads(seed):
    rng = random.Random(seed)
    out = []
    for nvars, ngens, nterms, deg in [(3, 3, 3, 3), (3, 3, 4, 3), (4, 3, 3, 3), (4, 4, 3, 2)]:
        for _ in range(3):
            polys = [random_poly(rng, nvars, nterms, deg) for _ in range(ngens)]
            out.append(("groebner n=%d" % nvars, nvars, polys))
    # classical benchmark: cyclic-4
    cyc = [
        {(1, 0, 0, 0): 1, (0, 1, 0, 0): 1, (0, 0, 1, 0): 1, (0, 0, 0, 1): 1},
        {(1, 1, 0, 0): 1, (0, 1, 1, 0): 1, (0, 0, 1, 1): 1, (1, 0, 0, 1): 1},
        {(1, 1, 1, 0): 1, (0, 1, 1, 1): 1, (1, 0, 1, 1): 1, (1, 1, 0, 1): 1},
        {(1, 1, 1, 1): 1, (0, 0, 0, 0): -1},
    ]
    out.append(("cyclic-4", 4, cyc))
    return out


def run(kernel, jobs, repeat):
    results, best = [], float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        results = []
        for _, n, polys in jobs:
            nkey = MonomialOrder("degrevlex", n).nkey
            try:
                results.append(kernel.buchberger_int(polys, nkey, cap=200000))
            except Exception as err:      # a cap hit counts as an answer too
                results.append(type(err).__name__)
            a, b = polys[0], polys[-1]
            for _ in range(20):
                a = kernel.mul_terms(a, b)
                a = kernel.add_terms(a, b, -1)
                if len(a) > 200:
                    a = polys[0]
        best = min(best, time.perf_counter() - t0)
    return results, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    jobs = workloads(args.seed)
    py_res, py_t = run(_pykernel, jobs, args.repeat)
    print("python  %8.3f s  (%d jobs)" % (py_t, len(jobs)))
    if _ckernel is None:
        print("cython  not built; run `pip install -e . --no-build-isolation` with Cython installed")
        return
    c_res, c_t = run(_ckernel, jobs, args.repeat)
    print("cython  %8.3f s" % c_t)
    print("speedup %8.2fx" % (py_t / c_t))
    mismatch = [jobs[i][0] for i, (a, b) in enumerate(zip(py_res, c_res)) if a != b]
    print("results agree" if not mismatch else "MISMATCH in %s" % mismatch)


if __name__ == "__main__":
    main()

"""Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Each row times one workload under both backends (best of N, after a warm-up
call so JIT compilation is excluded) and checks the two agree.
"""

import argparse
import time

import numpy as np

from bitcong import _accel
from bitcong.blast import blast_program
from bitcong.inference import infer_io
from bitcong.kernels import cnf_eval, howell, rows_hold
from bitcong.machine import parse_program


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(quick):
    rng = np.random.default_rng(1)
    sizes = [(8, 12, 4), (24, 48, 8)] if quick else [(8, 12, 4), (24, 48, 8), (64, 96, 32), (96, 160, 64)]
    for m, n, w in sizes:
        a = rng.integers(0, 1 << min(w, 62), size=(m, n), dtype=np.uint64)
        yield f"howell {m}x{n} w={w}", lambda a=a, w=w: howell(a, w)

    n, k = 64, 2000 if quick else 20000
    pts = rng.integers(0, 256, size=(k, n), dtype=np.uint64)
    coeffs = rng.integers(0, 256, size=(12, n), dtype=np.uint64)
    rhs = rng.integers(0, 256, size=12, dtype=np.uint64)
    yield f"rows_hold 12 rows x {k} points", lambda: rows_hold(coeffs, rhs, pts, 8)

    rel = blast_program(parse_program(".width 16\n.regs a, b\nadd a, b\nxor b, a\n"))
    clauses = rel.formula.clauses
    assigns = rng.integers(0, 2, size=(4000 if quick else 40000, rel.formula.num_vars + 1), dtype=np.uint8)
    yield f"cnf_eval {len(clauses)} clauses x {assigns.shape[0]}", lambda: cnf_eval(clauses, assigns)

    width = 8 if quick else 16
    dinc = blast_program(parse_program(f".width {width}\n.regs r\ninc r\ninc r\n"))
    yield f"infer_io double increment w={width}", lambda: infer_io(dinc).system


def same(x, y):
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small sizes only")
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'workload':44} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, fn in workloads(args.quick):
        timings, results = {}, {}
        for b in ("numba", "numpy"):
            prev = _accel.set_backend(b)
            try:
                results[b] = fn()
                timings[b] = best_of(fn, args.repeat)
            finally:
                _accel.set_backend(prev)
        if not same(results["numba"], results["numpy"]):
            raise SystemExit(f"backends disagree on {name}")
        ratio = timings["numpy"] / timings["numba"]
        print(f"{name:44} {timings['numba'] * 1e3:9.2f}ms {timings['numpy'] * 1e3:9.2f}ms {ratio:7.1f}x")


if __name__ == "__main__":
    main()

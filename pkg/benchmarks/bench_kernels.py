"""Compiled vs pure-Python determinant kernels.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--json] [--quick]

Times det_int and minors_int on random integer matrices of a few shapes, with
small entries (machine-word fast path) and with entries past 64 bits (object
path), then one end-to-end workload (tile inversion roundtrips) run once per
backend in a subprocess.
"""
import argparse
import json
import os
import random
import subprocess
import sys
import timeit

from amplikit import _pykernels

try:
    from amplikit import _ckernels
except ImportError:
    _ckernels = None

SHAPES = [(4, 8), (6, 10), (8, 12)]

END_TO_END = """
import time
from amplikit import cells
from amplikit.amplituhedron import TileSpec, amplituhedron_map, invert_tile
from amplikit.exact import positive_Z
t = time.perf_counter()
for i, (_, r) in enumerate(list(cells.enumerate_general_cells(8, 2).values())[:60]):
    C = cells.cell_point(r, seed=i)
    Z = positive_Z(8, 6, seed=i)
    invert_tile(amplituhedron_map(C, Z), Z, TileSpec.of(r))
print(time.perf_counter() - t)
"""


def random_rows(k, n, bits, seed):
    rng = random.Random(seed)
    hi = 1 << bits
    return [[rng.randrange(-hi, hi) for _ in range(n)] for _ in range(k)]


def time_call(fn, args, repeat):
    t = timeit.Timer(lambda: fn(*args))
    loops, _ = t.autorange()
    return min(t.repeat(repeat, loops)) / loops


def kernel_rows(repeat, shapes=SHAPES):
    out = []
    for k, n in shapes:
        for bits in (8, 80):
            rows = random_rows(k, n, bits, seed=k * n + bits)
            square = [r[:k] for r in rows]
            for name, args in (("det_int", (square,)), ("minors_int", (rows, n))):
                py = time_call(getattr(_pykernels, name), args, repeat)
                c = time_call(getattr(_ckernels, name), args, repeat) if _ckernels else None
                if _ckernels:
                    assert getattr(_ckernels, name)(*args) == getattr(_pykernels, name)(*args)
                out.append({"kernel": name, "k": k, "n": n, "bits": bits, "python_s": py, "compiled_s": c,
                            "speedup": py / c if c else None})
    return out


def end_to_end():
    res = {}
    for backend, env in (("compiled", {}), ("python", {"AMPLIKIT_PURE_PYTHON": "1"})):
        proc = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True,
                              env={**os.environ, **env}, check=True)
        res[backend] = float(proc.stdout.strip())
    return res


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true")
    p.add_argument("--skip-end-to-end", action="store_true")
    p.add_argument("--quick", action="store_true", help="smallest shape only")
    args = p.parse_args(argv)
    rows = kernel_rows(args.repeat, SHAPES[:1] if args.quick else SHAPES)
    e2e = None if args.skip_end_to_end else end_to_end()
    if args.json:
        print(json.dumps({"kernels": rows, "end_to_end_s": e2e}, indent=2))
        return 0
    if _ckernels is None:
        print("compiled kernel not built; python timings only")
    print(f"{'kernel':<11}{'k x n':>8}{'bits':>6}{'python us':>12}{'compiled us':>13}{'speedup':>9}")
    for r in rows:
        c = f"{r['compiled_s'] * 1e6:13.1f}" if r["compiled_s"] else f"{'-':>13}"
        s = f"{r['speedup']:9.1f}" if r["speedup"] else f"{'-':>9}"
        print(f"{r['kernel']:<11}{r['k']:>4} x{r['n']:>3}{r['bits']:>6}{r['python_s'] * 1e6:12.1f}{c}{s}")
    if e2e:
        print(f"end to end, 60 tile inversions at (8,2): compiled {e2e['compiled']:.2f}s, "
              f"python {e2e['python']:.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--quick] [--json PATH]

Each kernel runs on identical inputs under both backends; the table reports
the best wall time of ``--repeat`` runs, the speedup, and the largest
difference between the two results.
"""

import argparse
import json
import timeit

import numpy as np

from bosefock import kernels
from bosefock.fock import TruncatedBasis


def _cases(quick):
    rng = np.random.default_rng(0)
    perm_n = 10 if quick else 14
    eig_n = 24 if quick else 64
    a = rng.standard_normal((perm_n, perm_n)) + 1j * rng.standard_normal((perm_n, perm_n))
    h = rng.standard_normal((eig_n, eig_n)) + 1j * rng.standard_normal((eig_n, eig_n))
    h = np.ascontiguousarray((h + h.conj().T) / 2)
    cases = {
        f"permanent n={perm_n}": (lambda k: k.permanent(np.ascontiguousarray(a)), lambda r: np.array([r])),
        f"jacobi_eigh n={eig_n}": (lambda k: k.jacobi_eigh(h, 1e-14, 100), lambda r: np.sort(r[0])),
    }
    shapes = [(2, 30), (3, 10)] if quick else [(2, 80), (3, 25)]
    for n, d in shapes:
        basis = TruncatedBasis(n, d)
        v = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        v /= np.linalg.norm(v, 2)
        args = tuple(np.ascontiguousarray(x) for x in (
            basis.occupations, basis.raise_table, basis.parent, basis.parent_mode, basis.level_offsets))

        def run(k, args=args, v=v):
            return k.substitution_blocks(*args, np.ascontiguousarray(v))

        cases[f"substitution n={n} D={d}"] = (run, lambda r: r[0])
    return cases


def benchmark(repeat=3, quick=False):
    if "cython" not in kernels.BACKENDS:
        raise SystemExit("the compiled extension is not built; run `pip install -e . --no-build-isolation`")
    rows = []
    for name, (fn, key) in _cases(quick).items():
        times, results = {}, {}
        for backend in ("cython", "python"):
            impl = kernels.get_backend(backend)
            results[backend] = key(fn(impl))
            times[backend] = min(timeit.repeat(lambda: fn(impl), number=1, repeat=repeat))
        diff = float(np.abs(results["cython"] - results["python"]).max())
        rows.append({
            "kernel": name,
            "cython_s": times["cython"],
            "python_s": times["python"],
            "speedup": times["python"] / times["cython"],
            "max_abs_diff": diff,
        })
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="small inputs for a smoke run")
    parser.add_argument("--json", metavar="PATH", help="also write the rows as JSON")
    args = parser.parse_args(argv)
    rows = benchmark(args.repeat, args.quick)
    print(f"{'kernel':<28}{'cython [s]':>12}{'python [s]':>12}{'speedup':>10}{'max diff':>12}")
    for r in rows:
        print(f"{r['kernel']:<28}{r['cython_s']:>12.4g}{r['python_s']:>12.4g}"
              f"{r['speedup']:>10.1f}{r['max_abs_diff']:>12.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

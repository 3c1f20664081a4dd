"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 12] [--reps 20]

The first numba call of each kernel compiles (or loads the on-disk cache), so
one warm-up call is made before timing.
"""
import argparse
import time

import numpy as np

from merminlab import _kernels as K
from merminlab.mermin import canonical_operator
from merminlab.pauli import masks
from merminlab.statevector import GATE_MATRICES


def timeit(fn, reps):
    fn()
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=12, help="qubits for the statevector kernels")
    ap.add_argument("--lhv-n", type=int, default=6, help="qubits for the 4^n LHV scan")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba unavailable (or MERMINLAB_NO_NUMBA set); nothing to compare")

    rng = np.random.default_rng(args.seed)
    n = args.n
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    batch = np.tile(amps, (16, 1))
    h = GATE_MATRICES["h"]
    flip, sign, n_y = masks("XY" * (n // 2) + "X" * (n % 2))
    op = canonical_operator(args.lhv_n).m
    ym = np.array([masks(s)[1] for s in op.terms])
    co = np.array(list(op.terms.values()))
    outcomes = rng.integers(0, 1 << n, size=100_000)

    cases = {
        f"apply_1q (n={n})": lambda b: K.apply_1q(amps, n // 2, h, backend=b),
        f"apply_1q_batch (16 x n={n})": lambda b: K.apply_1q_batch(batch, n // 2, h, backend=b),
        f"apply_cnot (n={n})": lambda b: K.apply_cnot(amps, 0, n - 1, backend=b),
        f"pauli_expect (n={n})": lambda b: K.pauli_expect(amps, flip, sign, n_y, backend=b),
        f"lhv_max (n={args.lhv_n})": lambda b: K.lhv_max(args.lhv_n, ym, co, backend=b),
        "parity_signs (1e5 outcomes)": lambda b: K.parity_signs(outcomes, backend=b),
    }
    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases.items():
        reps = max(1, args.reps // 10) if name.startswith("lhv") else args.reps
        t_np = timeit(lambda: fn("numpy"), reps)
        t_nb = timeit(lambda: fn("numba"), reps)
        print(f"{name:32s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()

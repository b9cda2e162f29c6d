"""Time the compiled and pure-Python MLE kernels on the same count records.

    python benchmarks/bench_mle.py [--fits N] [--shots S]

Prints fits per second for each available backend and the largest
disagreement between backends in the reconstructed matrices.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from oamtransfer import _backend
from oamtransfer.qubits import depolarize, projector, random_pure_state
from oamtransfer.seeding import stream
from oamtransfer.tomography import PROJECTOR_VECTORS, simulate_counts


def _records(n: int, shots: int):
    rng = stream(1, 0)
    out = []
    for _ in range(n):
        rho = depolarize(projector(random_pure_state(rng)), 0.1)
        out.append(simulate_counts(rho, shots, True, rng).counts)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fits", type=int, default=300)
    ap.add_argument("--shots", type=int, default=10_000)
    args = ap.parse_args()

    records = _records(args.fits, args.shots)
    results, timings = {}, {}
    for name, kernel in _backend.BACKENDS.items():
        t0 = time.perf_counter()
        results[name] = [np.array(kernel(PROJECTOR_VECTORS, n, 1e-10, 10_000)[0]) for n in records]
        timings[name] = time.perf_counter() - t0

    print(f"{'backend':<8} {'seconds':>9} {'fits/s':>10}")
    for name, t in timings.items():
        print(f"{name:<8} {t:9.3f} {args.fits / t:10.1f}")
    if len(results) > 1:
        ref, other = results["python"], results["cython"]
        diff = max(float(np.abs(a - b).max()) for a, b in zip(ref, other))
        print(f"speed-up: {timings['python'] / timings['cython']:.1f}x, max |delta rho| = {diff:.2e}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()

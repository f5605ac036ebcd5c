"""Compare the compiled and pure-Python monodromy kernels.

    python3 benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]

Reports wall time per call for a single energy (the root-polishing pattern)
and for a batch (the coarse-scan pattern), plus the largest disagreement
between the two backends.
"""
import argparse
import time

import numpy as np

from lameqes.kernels import BACKENDS
from lameqes.reference_cases import HALF_CASE
from lameqes.verify import _lattice


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--batch", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    nodes, h = _lattice(HALF_CASE.params(0.5), args.steps)
    single = np.array([4.3722813232690143])
    batch = np.linspace(-1.0, 18.0, args.batch)

    print(f"steps={args.steps}  batch={args.batch}  backends={sorted(BACKENDS)}")
    results = {}
    for name, mod in sorted(BACKENDS.items()):
        t1, out1 = best_of(lambda: mod.propagate(nodes, h, single), args.repeat)
        tb, outb = best_of(lambda: mod.propagate(nodes, h, batch), args.repeat)
        results[name] = (out1, outb)
        print(f"{name:>9}: single {t1 * 1e3:9.2f} ms   batch {tb * 1e3:9.1f} ms   ({tb / len(batch) * 1e3:.3f} ms/energy)")

    if len(results) == 2:
        diff = max(np.max(np.abs(results["compiled"][i] - results["python"][i])) for i in (0, 1))
        print(f"max |compiled - python| = {diff:.2e}")


if __name__ == "__main__":
    main()

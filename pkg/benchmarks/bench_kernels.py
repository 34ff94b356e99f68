"""Compare the compiled and NumPy batch kernels.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from cqtele import _kernels_py
from cqtele.rng import trial_uniforms
from cqtele.teleport import channel_state, correction_table, haar_amplitudes

try:
    from cqtele import _kernels
except ImportError:
    _kernels = None


def workloads(n: int):
    u = trial_uniforms(0, np.arange(n), 5)
    inputs = haar_amplitudes(u[:, 0], u[:, 1])
    tele_u = np.ascontiguousarray(u[:, 2:4])
    states = np.tile(channel_state().amps, (n, 1))
    x_basis = (u[:, 4] < 0.5).astype(np.uint8)
    tri_u = np.ascontiguousarray(u[:, 4])
    table = correction_table()
    return {
        "teleport_batch": lambda m: m.teleport_batch(inputs, tele_u, table),
        "measure_triplets": lambda m: m.measure_triplets(states, x_basis, tri_u),
    }


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"numpy": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    print(f"{args.trials} rows, best of {args.repeat}")
    for name, fn in workloads(args.trials).items():
        times = {
            label: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            for label, mod in backends.items()
        }
        line = "  ".join(f"{label} {t * 1e3:8.1f} ms" for label, t in times.items())
        if "cython" in times:
            line += f"  speedup {times['numpy'] / times['cython']:.1f}x"
        print(f"{name:<18}{line}")


if __name__ == "__main__":
    main()

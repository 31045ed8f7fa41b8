"""Compare the compiled and numpy kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the three hot kernels at 1 to 4 qubits and a full preset run under
each available backend.
"""

import argparse
import timeit

import numpy as np

from hubsim import kernels
from hubsim.densmat import _trace_index_map, random_density, random_unitary
from hubsim.engine import evolve_states
from hubsim.presets import get_preset


def _cases(nq, rng):
    rho = random_density(nq, rng)
    u = random_unitary(1 << nq, rng)
    ops = np.array([random_unitary(1 << nq, rng) / 2 for _ in range(4)])
    cases = {
        "apply_unitary": lambda: kernels.apply_unitary(rho, u),
        "apply_kraus(4)": lambda: kernels.apply_kraus(rho, ops),
    }
    if nq > 1:
        imap = _trace_index_map(nq, [nq - 1])
        cases["partial_trace"] = lambda: kernels.partial_trace(rho, imap)
    return cases


def _time(fn, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000, help="calls per timing sample")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    original = kernels.BACKEND
    rng = np.random.default_rng(0)
    rows = []
    try:
        for nq in (1, 2, 3, 4):
            for name, fn in _cases(nq, rng).items():
                t = {}
                for b in backends:
                    kernels.use_backend(b)
                    t[b] = _time(fn, args.repeat)
                rows.append((f"{name} n={nq}", t))
        for preset in ("fig6_lower", "fig7_mitigation"):
            cfg = get_preset(preset)
            t = {}
            for b in backends:
                kernels.use_backend(b)
                t[b] = _time(lambda: evolve_states(cfg), max(1, args.repeat // 200))
            rows.append((f"evolve {preset}", t))
    finally:
        kernels.use_backend(original)

    header = f"{'case':28s}" + "".join(f"{b:>14s}" for b in backends)
    if "cython" in backends:
        header += f"{'speedup':>10s}"
    print(header)
    for label, t in rows:
        line = f"{label:28s}" + "".join(f"{t[b] * 1e6:12.2f}us" for b in backends)
        if "cython" in backends:
            line += f"{t['python'] / t['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()

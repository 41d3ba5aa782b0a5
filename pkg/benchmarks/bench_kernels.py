"""Compare the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the backend flag is read at
import time. Timings are the best of ``--repeat`` runs after one warm-up call,
so JIT compilation is not counted.

    python benchmarks/bench_kernels.py --repeat 5
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from qsl import _accel, _kernels, scenarios
from qsl.bounds import build_report
from qsl.dynamics import evolve

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
qubit = scenarios.amplitude_damping(1.0)
rho_q = np.diag([0.75, 0.25]).astype(complex)
big = scenarios.random_lindblad(4, rng)
rho_b = scenarios.random_initial_state(4, rng, pure=False)
traj = evolve(big, rho_b, 1.0, 1e-4)
derivs = np.ascontiguousarray(traj.derivs)
states = np.ascontiguousarray(traj.states)

cases = {
    "evolve qubit, 1e3 steps": lambda: evolve(qubit, rho_q, 1.0, 1e-3),
    "evolve d=4, 1e4 steps": lambda: evolve(big, rho_b, 1.0, 1e-4),
    "schatten_norms (10001, 4, 4)": lambda: _kernels.schatten_norms(derivs),
    "trace_pairs (10001, 4, 4)": lambda: _kernels.trace_pairs(states, derivs),
    "min_eigvals (10001, 4, 4)": lambda: _kernels.min_eigvals(states),
    "build_report d=4, 1e4 steps": lambda: build_report(traj),
}
out = {"backend": _accel.BACKEND}
for name, fn in cases.items():
    fn()  # warm-up / JIT
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def run_backend(flag: str, repeat: int) -> dict:
    env = dict(os.environ, QSL_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    numpy_t = run_backend("0", args.repeat)
    numba_t = run_backend("1", args.repeat)
    if numba_t.pop("backend") != "numba":
        print("numba is not installed; only the numpy timings are meaningful", file=sys.stderr)
    numpy_t.pop("backend")
    width = max(map(len, numpy_t))
    print(f"{'kernel':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'speed-up':>8}")
    for name, t_np in numpy_t.items():
        t_nb = numba_t[name]
        print(f"{name:<{width}}  {1e3 * t_np:11.2f}  {1e3 * t_nb:11.2f}  {t_np / t_nb:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""The numba and numpy forms of every kernel must agree to round-off."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from qsl import _accel, _kernels, scenarios
from qsl.dynamics import evolve
from qsl.states import random_density


@pytest.fixture
def stack(rng):
    G = rng.standard_normal((7, 4, 4)) + 1j * rng.standard_normal((7, 4, 4))
    return np.ascontiguousarray(G)


@pytest.fixture
def states():
    return np.ascontiguousarray(np.stack([random_density(3, seed=s).mat for s in range(6)]))


def test_schatten_norms(stack):
    want = [[np.linalg.norm(m, 2), np.linalg.norm(m, "nuc"), np.linalg.norm(m, "fro")] for m in stack]
    np.testing.assert_allclose(_kernels.schatten_norms(stack), want, rtol=1e-13)


def test_trace_pairs(stack):
    b = np.ascontiguousarray(stack[::-1])
    np.testing.assert_allclose(_kernels._trace_pairs_nb(stack, b), _kernels._trace_pairs_np(stack, b), rtol=1e-13)


def test_trace_with(stack):
    a = np.ascontiguousarray(stack[0])
    np.testing.assert_allclose(_kernels._trace_with_nb(a, stack), _kernels._trace_with_np(a, stack), rtol=1e-13)


def test_min_eigvals(states):
    want = [np.linalg.eigvalsh(m)[0] for m in states]
    np.testing.assert_allclose(_kernels.min_eigvals(states), want, atol=1e-14)


def test_rk4_compiled_matches_interpreted():
    spec = scenarios.rabi_drive(2.0, 0.7)
    A, Ad, AdA, rates = spec._jump_arrays()
    n = 50
    hams = np.ascontiguousarray(np.broadcast_to(spec.hamiltonian_at(0.0), (2 * n + 1, 2, 2)))
    rho0 = np.ascontiguousarray(random_density(2, seed=2).mat)
    fast = _kernels.rk4_evolve(hams, A, Ad, AdA, rates, rho0, 0.02, n, 1.0)
    slow = _kernels._rk4_evolve(hams, A, Ad, AdA, rates, rho0, 0.02, n, 1.0)
    for x, y in zip(fast, slow):
        np.testing.assert_allclose(x, y, atol=1e-14)


def test_public_names_follow_flag():
    suffix = "_nb" if _accel.ENABLED else "_np"
    assert _kernels.trace_pairs is getattr(_kernels, "_trace_pairs" + suffix)
    assert _kernels.trace_with is getattr(_kernels, "_trace_with" + suffix)
    assert _accel.BACKEND == ("numba" if _accel.ENABLED else "numpy")


_PROBE = """
import json, numpy as np
from qsl import _accel, scenarios
from qsl.bounds import build_report
from qsl.dynamics import evolve
traj = evolve(scenarios.amplitude_damping(1.0), np.diag([0.75, 0.25]).astype(complex), 1.0, 1e-2)
rep = build_report(traj)
print(json.dumps({"backend": _accel.BACKEND, "final": [traj.states[-1].real.tolist(), traj.states[-1].imag.tolist()],
                  "tau": {k.value: e.tau_qsl for k, e in rep.entries.items()}}))
"""


def _probe(flag):
    env = dict(os.environ, QSL_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.slow
def test_backends_agree_end_to_end():
    off = _probe("0")
    on = _probe("1")
    assert off["backend"] == "numpy"
    np.testing.assert_allclose(np.array(on["final"]), np.array(off["final"]), atol=1e-14)
    for k, v in off["tau"].items():
        assert on["tau"][k] == pytest.approx(v, rel=1e-12)


def test_evolve_uses_contiguous_inputs():
    # a Fortran-ordered initial state must still work with the compiled kernels
    rho0 = np.asfortranarray(random_density(2, seed=4).mat)
    traj = evolve(scenarios.dephasing(1.0), rho0, 0.1, 0.01)
    assert traj.states.flags.c_contiguous

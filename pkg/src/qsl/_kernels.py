"""Hot inner loops: master-equation stepping and per-grid-point reductions.

The stepping loop and the trace reductions have a numba form and a numpy
form; the numba form is picked when :data:`qsl._accel.ENABLED` is true and
both must agree to round-off (see ``tests/test_kernels.py``). The SVD and
eigenvalue reductions stay on numpy's batched LAPACK calls in both modes,
which beat a compiled per-matrix loop (``benchmarks/bench_kernels.py``). Inputs are expected as contiguous complex128 /
float64 arrays; the public modules take care of that.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

# ----------------------------------------------------------------------
# Generator and RK4 stepping. One source, compiled or interpreted.
# ----------------------------------------------------------------------


def _lindblad_rhs(H, jumps, jumps_dag, jdj, rates, rho, hbar):
    out = (-1j / hbar) * (H @ rho - rho @ H)
    for k in range(rates.shape[0]):
        if rates[k] == 0.0:
            continue
        a_rho = jumps[k] @ rho
        out += rates[k] * (
            a_rho @ jumps_dag[k] - 0.5 * (jdj[k] @ rho + rho @ jdj[k])
        )
    return out


def _rk4_evolve(hams, jumps, jumps_dag, jdj, rates, rho0, dt, nsteps, hbar):
    d = rho0.shape[0]
    states = np.empty((nsteps + 1, d, d), dtype=np.complex128)
    derivs = np.empty((nsteps + 1, d, d), dtype=np.complex128)
    rho = rho0.copy()
    states[0] = rho
    k1 = lindblad_rhs(hams[0], jumps, jumps_dag, jdj, rates, rho, hbar)
    derivs[0] = k1
    half = 0.5 * dt
    for i in range(nsteps):
        h_mid = hams[2 * i + 1]
        k2 = lindblad_rhs(h_mid, jumps, jumps_dag, jdj, rates, rho + half * k1, hbar)
        k3 = lindblad_rhs(h_mid, jumps, jumps_dag, jdj, rates, rho + half * k2, hbar)
        k4 = lindblad_rhs(hams[2 * i + 2], jumps, jumps_dag, jdj, rates, rho + dt * k3, hbar)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[i + 1] = rho
        k1 = lindblad_rhs(hams[2 * i + 2], jumps, jumps_dag, jdj, rates, rho, hbar)
        derivs[i + 1] = k1
    return states, derivs


lindblad_rhs = njit(_lindblad_rhs)
rk4_evolve = njit(_rk4_evolve)

# ----------------------------------------------------------------------
# Reductions over a stack of matrices, shape (n, d, d).
# ----------------------------------------------------------------------


def schatten_norms(mats):
    s = np.linalg.svd(mats, compute_uv=False)
    return np.stack([s[:, 0], s.sum(axis=1), np.sqrt((s * s).sum(axis=1))], axis=1)


@njit
def _trace_pairs_nb(a, b):
    n, d = a.shape[0], a.shape[1]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(d):
            for k in range(d):
                acc += a[i, j, k] * b[i, k, j]
        out[i] = acc
    return out


def _trace_pairs_np(a, b):
    return np.einsum("ijk,ikj->i", a, b)


@njit
def _trace_with_nb(a, mats):
    n, d = mats.shape[0], mats.shape[1]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(d):
            for k in range(d):
                acc += a[j, k] * mats[i, k, j]
        out[i] = acc
    return out


def _trace_with_np(a, mats):
    return np.einsum("jk,ikj->i", a, mats)


def min_eigvals(mats):
    herm = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    return np.linalg.eigvalsh(herm)[:, 0]


if _accel.ENABLED:
    trace_pairs = _trace_pairs_nb
    trace_with = _trace_with_nb
else:
    trace_pairs = _trace_pairs_np
    trace_with = _trace_with_np

"""Numba-jitted gate kernels (default backend).

Same surface and little-endian convention as ``_kernels_numpy``. Single-
qubit gates walk amplitude pairs with a stride of ``1 << q``; two-qubit
gates scan the full register with bit masks (registers here are small,
the rotations dominate). ``run_shifted_batch`` is the training hot path:
it checkpoints the state before every op so each shifted run replays
only its suffix. The kernels are deliberately sequential - at these
register sizes a thread team costs more than it saves - so results are
bit-identical however many cores the host has.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit

from ._codes import (
    KIND_CNOT,
    KIND_CRZ,
    KIND_CZ,
    KIND_H,
    KIND_RX,
    KIND_RZ,
    KIND_X,
    KIND_Y,
    KIND_Z,
)

_SQRT2_INV = 1.0 / math.sqrt(2.0)


@njit(cache=True, fastmath=True)
def _apply_op(amps, kind, q0, q1, angle):
    dim = amps.shape[0]
    if kind == KIND_RX:
        c = math.cos(0.5 * angle)
        nis = -1j * math.sin(0.5 * angle)
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                a = amps[off]
                b = amps[off + step]
                amps[off] = c * a + nis * b
                amps[off + step] = nis * a + c * b
    elif kind == KIND_RZ:
        em = cmath.exp(-0.5j * angle)
        ep = em.conjugate()
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                amps[off] = em * amps[off]
                amps[off + step] = ep * amps[off + step]
    elif kind == KIND_CNOT:
        cbit = 1 << q0
        tbit = 1 << q1
        for i in range(dim):
            if (i & cbit) != 0 and (i & tbit) == 0:
                j = i | tbit
                a = amps[i]
                amps[i] = amps[j]
                amps[j] = a
    elif kind == KIND_CRZ:
        em = cmath.exp(-0.5j * angle)
        ep = em.conjugate()
        cbit = 1 << q0
        tbit = 1 << q1
        for i in range(dim):
            if (i & cbit) != 0:
                if (i & tbit) == 0:
                    amps[i] = em * amps[i]
                else:
                    amps[i] = ep * amps[i]
    elif kind == KIND_H:
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                a = amps[off]
                b = amps[off + step]
                amps[off] = (a + b) * _SQRT2_INV
                amps[off + step] = (a - b) * _SQRT2_INV
    elif kind == KIND_X:
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                a = amps[off]
                amps[off] = amps[off + step]
                amps[off + step] = a
    elif kind == KIND_Y:
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                a = amps[off]
                amps[off] = -1j * amps[off + step]
                amps[off + step] = 1j * a
    elif kind == KIND_Z:
        step = 1 << q0
        for base in range(0, dim, step << 1):
            for off in range(base, base + step):
                amps[off + step] = -amps[off + step]
    elif kind == KIND_CZ:
        both = (1 << q0) | (1 << q1)
        for i in range(dim):
            if (i & both) == both:
                amps[i] = -amps[i]


@njit(cache=True, fastmath=True)
def _probs_one_into(amps, out):
    m = out.shape[0]
    for q in range(m):
        out[q] = 0.0
    for i in range(amps.shape[0]):
        a = amps[i]
        p = a.real * a.real + a.imag * a.imag
        for q in range(m):
            if (i >> q) & 1:
                out[q] += p


@njit(cache=True, fastmath=True)
def _run_ops(amps, kinds, q0s, q1s, angles):
    for j in range(kinds.shape[0]):
        _apply_op(amps, kinds[j], q0s[j], q1s[j], angles[j])


@njit(cache=True, fastmath=True)
def _run_shifted_batch(base, kinds, q0s, q1s, angles, eval_ops, eval_angles, num_qubits):
    n_ops = kinds.shape[0]
    dim = base.shape[0]
    ckpt = np.empty((n_ops + 1, dim), dtype=np.complex128)
    state = base.copy()
    for j in range(n_ops):
        ckpt[j, :] = state
        _apply_op(state, kinds[j], q0s[j], q1s[j], angles[j])
    ckpt[n_ops, :] = state

    n_evals = eval_ops.shape[0]
    out = np.empty((n_evals, num_qubits))
    local = np.empty(dim, dtype=np.complex128)
    for e in range(n_evals):
        j = eval_ops[e]
        if j < 0:
            local[:] = ckpt[n_ops]
        else:
            local[:] = ckpt[j]
            _apply_op(local, kinds[j], q0s[j], q1s[j], eval_angles[e])
            for k in range(j + 1, n_ops):
                _apply_op(local, kinds[k], q0s[k], q1s[k], angles[k])
        _probs_one_into(local, out[e])
    return out


@njit(cache=True, fastmath=True)
def _expectation_z(amps, q):
    s = 0.0
    for i in range(amps.shape[0]):
        a = amps[i]
        p = a.real * a.real + a.imag * a.imag
        if (i >> q) & 1:
            s -= p
        else:
            s += p
    return s


def apply_gate_inplace(amps: np.ndarray, kind: int, q0: int, q1: int, angle: float) -> None:
    _apply_op(amps, kind, q0, q1, angle)


def run_ops_inplace(amps, kinds, q0s, q1s, angles) -> None:
    _run_ops(amps, kinds, q0s, q1s, angles)


def probs_one(amps: np.ndarray, num_qubits: int) -> np.ndarray:
    out = np.empty(num_qubits)
    _probs_one_into(amps, out)
    return out


def expectation_z(amps: np.ndarray, q: int) -> float:
    return float(_expectation_z(amps, q))


def run_shifted_batch(base, kinds, q0s, q1s, angles, eval_ops, eval_angles, num_qubits):
    return _run_shifted_batch(base, kinds, q0s, q1s, angles, eval_ops, eval_angles, num_qubits)

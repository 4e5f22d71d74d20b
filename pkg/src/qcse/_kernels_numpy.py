"""Pure-numpy gate kernels.

Fallback backend with the same surface as ``_kernels_numba``: amplitudes
are complex128 arrays indexed little-endian (qubit 0 = least significant
bit of the basis index). Selected via ``QCSE_BACKEND=numpy``.
"""

from __future__ import annotations

import math

import numpy as np

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


def _pairs(amps: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """View amplitudes as (blocks, 2, stride) split on the bit of qubit q."""
    view = amps.reshape(-1, 2, 1 << q)
    return view[:, 0, :], view[:, 1, :]


def apply_gate_inplace(amps: np.ndarray, kind: int, q0: int, q1: int, angle: float) -> None:
    if kind == KIND_H:
        a0, a1 = _pairs(amps, q0)
        t = a0.copy()
        a0 += a1
        a0 *= _SQRT2_INV
        a1 *= -1.0
        a1 += t
        a1 *= _SQRT2_INV
    elif kind == KIND_X:
        a0, a1 = _pairs(amps, q0)
        t = a0.copy()
        a0[:] = a1
        a1[:] = t
    elif kind == KIND_Y:
        a0, a1 = _pairs(amps, q0)
        t = a0.copy()
        a0[:] = -1j * a1
        a1[:] = 1j * t
    elif kind == KIND_Z:
        _, a1 = _pairs(amps, q0)
        a1 *= -1.0
    elif kind == KIND_RX:
        c = math.cos(0.5 * angle)
        nis = -1j * math.sin(0.5 * angle)
        a0, a1 = _pairs(amps, q0)
        t = a0.copy()
        a0 *= c
        a0 += nis * a1
        a1 *= c
        a1 += nis * t
    elif kind == KIND_RZ:
        a0, a1 = _pairs(amps, q0)
        a0 *= np.exp(-0.5j * angle)
        a1 *= np.exp(0.5j * angle)
    elif kind == KIND_CNOT:
        idx = np.arange(amps.size)
        sel = ((idx >> q0) & 1 == 1) & ((idx >> q1) & 1 == 0)
        lo = idx[sel]
        hi = lo | (1 << q1)
        t = amps[lo].copy()
        amps[lo] = amps[hi]
        amps[hi] = t
    elif kind == KIND_CZ:
        idx = np.arange(amps.size)
        both = (1 << q0) | (1 << q1)
        amps[idx & both == both] *= -1.0
    elif kind == KIND_CRZ:
        idx = np.arange(amps.size)
        on = (idx >> q0) & 1 == 1
        tbit = (idx >> q1) & 1 == 1
        amps[on & ~tbit] *= np.exp(-0.5j * angle)
        amps[on & tbit] *= np.exp(0.5j * angle)
    else:
        raise ValueError(f"unknown gate code {kind}")


def run_ops_inplace(
    amps: np.ndarray,
    kinds: np.ndarray,
    q0s: np.ndarray,
    q1s: np.ndarray,
    angles: np.ndarray,
) -> None:
    for j in range(kinds.shape[0]):
        apply_gate_inplace(amps, int(kinds[j]), int(q0s[j]), int(q1s[j]), float(angles[j]))


def probs_one(amps: np.ndarray, num_qubits: int) -> np.ndarray:
    """P(|1>_q) for every qubit, from the squared amplitudes."""
    p = np.abs(amps) ** 2
    out = np.empty(num_qubits)
    for q in range(num_qubits):
        out[q] = p.reshape(-1, 2, 1 << q)[:, 1, :].sum()
    return out


def expectation_z(amps: np.ndarray, q: int) -> float:
    p = np.abs(amps) ** 2
    view = p.reshape(-1, 2, 1 << q)
    return float(view[:, 0, :].sum() - view[:, 1, :].sum())


def run_shifted_batch(
    base: np.ndarray,
    kinds: np.ndarray,
    q0s: np.ndarray,
    q1s: np.ndarray,
    angles: np.ndarray,
    eval_ops: np.ndarray,
    eval_angles: np.ndarray,
    num_qubits: int,
) -> np.ndarray:
    """Per-qubit P(|1>) for a batch of single-angle-override circuit runs.

    Run ``e`` replays ops on ``base`` with the angle of op ``eval_ops[e]``
    replaced by ``eval_angles[e]`` (op index -1 means no override). States
    are checkpointed before every op so each run replays only its suffix.
    """
    n_ops = kinds.shape[0]
    ckpt = np.empty((n_ops + 1, base.shape[0]), dtype=np.complex128)
    state = base.copy()
    for j in range(n_ops):
        ckpt[j] = state
        apply_gate_inplace(state, int(kinds[j]), int(q0s[j]), int(q1s[j]), float(angles[j]))
    ckpt[n_ops] = state

    out = np.empty((eval_ops.shape[0], num_qubits))
    for e in range(eval_ops.shape[0]):
        j = int(eval_ops[e])
        if j < 0:
            out[e] = probs_one(ckpt[n_ops], num_qubits)
            continue
        local = ckpt[j].copy()
        apply_gate_inplace(local, int(kinds[j]), int(q0s[j]), int(q1s[j]), float(eval_angles[e]))
        for k in range(j + 1, n_ops):
            apply_gate_inplace(local, int(kinds[k]), int(q0s[k]), int(q1s[k]), float(angles[k]))
        out[e] = probs_one(local, num_qubits)
    return out

"""Dense statevector simulator.

An ``m``-qubit register is a complex128 array of ``2**m`` amplitudes in
little-endian convention: qubit 0 is the least significant bit of the
basis-state index, so ``|q1 q0> = |01>`` (qubit 0 set) lives at index 1.
Gate application updates amplitudes with strided kernels; no dense
``2**m x 2**m`` matrix is ever built here. Global phase is not
normalised away - every observable exposed (Pauli-Z expectations,
per-qubit probabilities) is phase-invariant.

Supported gates: H, X, Y, Z, RX, RZ, CNOT, CZ, CRZ. Rotations follow
``exp(-i*theta/2 * P)``; CRZ applies RZ(theta) on the target within the
control-is-one subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import backend
from ._codes import CODE_OF_KIND, ROTATION_KINDS, TWO_QUBIT_KINDS

MAX_QUBITS = 20


@dataclass(frozen=True)
class GateOp:
    """One gate: a kind, its target qubit(s), and an angle for rotations.

    Two-qubit targets are ordered ``(control, target)``.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in CODE_OF_KIND:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} takes {want} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.kind}: {self.targets}")
        if any(q < 0 for q in self.targets):
            raise IndexError(f"negative qubit index in {self.targets}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


@dataclass
class StateVector:
    """An ``m``-qubit pure state: ``2**m`` complex amplitudes, unit norm."""

    num_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def new_zero_state(num_qubits: int) -> StateVector:
    """|0...0> on ``num_qubits`` qubits (1..20 supported)."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _check_targets(op: GateOp, num_qubits: int) -> None:
    for q in op.targets:
        if q >= num_qubits:
            raise IndexError(f"qubit {q} out of range for {num_qubits}-qubit state")


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Return a new state with ``op`` applied; the input is not mutated."""
    _check_targets(op, state.num_qubits)
    amps = state.amplitudes.copy()
    q0 = op.targets[0]
    q1 = op.targets[1] if len(op.targets) == 2 else 0
    angle = op.angle if op.angle is not None else 0.0
    backend.kernels().apply_gate_inplace(amps, CODE_OF_KIND[op.kind], q0, q1, angle)
    return StateVector(state.num_qubits, amps)


def apply_ops(state: StateVector, ops: Iterable[GateOp]) -> StateVector:
    """Apply a gate sequence, returning the final state."""
    ops = list(ops)
    for op in ops:
        _check_targets(op, state.num_qubits)
    amps = state.amplitudes.copy()
    backend.kernels().run_ops_inplace(amps, *ops_to_arrays(ops))
    return StateVector(state.num_qubits, amps)


def expectation_z(state: StateVector, q: int) -> float:
    """<Z_q> = sum_i |a_i|^2 * (+1 if bit q of i is 0 else -1)."""
    if not 0 <= q < state.num_qubits:
        raise IndexError(f"qubit {q} out of range for {state.num_qubits}-qubit state")
    return backend.kernels().expectation_z(state.amplitudes, q)


def qubit_probabilities(state: StateVector) -> np.ndarray:
    """P(|1>_q) = (1 - <Z_q>)/2 for every qubit, as a length-m array."""
    z = np.array([expectation_z(state, q) for q in range(state.num_qubits)])
    return (1.0 - z) / 2.0


def ops_to_arrays(ops: Sequence[GateOp]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a gate sequence into (kinds, q0s, q1s, angles) kernel arrays."""
    n = len(ops)
    kinds = np.empty(n, dtype=np.int64)
    q0s = np.empty(n, dtype=np.int64)
    q1s = np.empty(n, dtype=np.int64)
    angles = np.zeros(n, dtype=np.float64)
    for j, op in enumerate(ops):
        kinds[j] = CODE_OF_KIND[op.kind]
        q0s[j] = op.targets[0]
        q1s[j] = op.targets[1] if len(op.targets) == 2 else 0
        if op.angle is not None:
            angles[j] = op.angle
    return kinds, q0s, q1s, angles

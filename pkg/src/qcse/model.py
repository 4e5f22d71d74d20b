"""Full embedding circuit: encoding block, trainable ansatz, readout.

The circuit runs on ``m = ceil(log2(vocab_size))`` qubits. A forward
pass is: |0...0>, Hadamard on every qubit (once), then per encoding
layer RX/RZ rotations fed by the context schedule followed by a CNOT
cascade down the register, then ``M`` ansatz layers of trainable RX/RZ
rotations followed by a CRZ chain, and finally P(|1>_q) per qubit.

Within every layer the RX of a qubit precedes its RZ, and the entangling
cascade follows all single-qubit rotations; the cascade never wraps from
the last qubit back to the first. Qubit indices are 0-based throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import CapacityError, qsim
from .context import (
    ContextWindow,
    EncodingHyperparams,
    EncodingSchedule,
    CONTEXT_METHODS,
    encode_window,
)
from .qsim import GateOp, StateVector

PARAMS_FORMAT_VERSION = 1


def min_qubits(vocab_size: int) -> int:
    """Smallest register that gives every word its own basis state."""
    if vocab_size < 1:
        raise ValueError("vocab_size must be positive")
    return max(1, math.ceil(math.log2(vocab_size)))


def params_per_layer(num_qubits: int) -> int:
    """2m rotation angles plus m-1 CRZ angles."""
    return 3 * num_qubits - 1


@dataclass(frozen=True)
class ModelConfig:
    """Circuit shape plus the vocabulary it is bound to.

    ``vocab_size`` both normalises word indices to angles and fixes the
    capacity requirement: every word needs its own basis state.
    """

    num_qubits: int
    num_layers: int
    vocab_size: int
    method: str = "exp-decay-sin"
    hyperparams: EncodingHyperparams = field(default_factory=EncodingHyperparams)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if self.method not in CONTEXT_METHODS:
            raise ValueError(
                f"unknown context method {self.method!r}; expected one of {sorted(CONTEXT_METHODS)}"
            )
        if self.vocab_size > 1 << self.num_qubits:
            raise CapacityError(
                f"vocabulary of {self.vocab_size} words does not fit in "
                f"{self.num_qubits} qubits (need {min_qubits(self.vocab_size)})"
            )

    def window(self, word_indices: tuple[int, ...]) -> ContextWindow:
        return ContextWindow(word_indices, self.vocab_size)


@dataclass
class AnsatzParams:
    """Trainable angles: layers[a] = [rx_0, rz_0, ..., rx_{m-1}, rz_{m-1}, crz_0..crz_{m-2}]."""

    num_qubits: int
    layers: np.ndarray

    def __post_init__(self):
        self.layers = np.asarray(self.layers, dtype=np.float64)
        if self.layers.ndim != 2 or self.layers.shape[1] != params_per_layer(self.num_qubits):
            raise ValueError(
                f"layers must have shape (M, {params_per_layer(self.num_qubits)}), "
                f"got {self.layers.shape}"
            )

    @property
    def num_layers(self) -> int:
        return self.layers.shape[0]

    @property
    def count(self) -> int:
        return self.layers.size

    def rot(self, layer: int) -> np.ndarray:
        return self.layers[layer, : 2 * self.num_qubits]

    def crz(self, layer: int) -> np.ndarray:
        return self.layers[layer, 2 * self.num_qubits :]

    def copy(self) -> "AnsatzParams":
        return AnsatzParams(self.num_qubits, self.layers.copy())

    @classmethod
    def zeros(cls, num_qubits: int, num_layers: int) -> "AnsatzParams":
        return cls(num_qubits, np.zeros((num_layers, params_per_layer(num_qubits))))

    @classmethod
    def random(
        cls, num_qubits: int, num_layers: int, rng: np.random.Generator, scale: float = 0.1
    ) -> "AnsatzParams":
        shape = (num_layers, params_per_layer(num_qubits))
        return cls(num_qubits, scale * rng.standard_normal(shape))


def build_encoding_ops(schedule: EncodingSchedule, num_qubits: int) -> list[GateOp]:
    """Hadamards once, then per layer: RX/RZ per qubit and a CNOT cascade."""
    if schedule.num_layers and schedule.width != 2 * num_qubits:
        raise ValueError(
            f"schedule width {schedule.width} does not match 2*{num_qubits} qubits"
        )
    ops = [GateOp("H", (q,)) for q in range(num_qubits)]
    for layer in schedule.layers:
        for q in range(num_qubits):
            ops.append(GateOp("RX", (q,), angle=float(layer[2 * q])))
            ops.append(GateOp("RZ", (q,), angle=float(layer[2 * q + 1])))
        for q in range(num_qubits - 1):
            ops.append(GateOp("CNOT", (q, q + 1)))
    return ops


def build_ansatz_ops(params: AnsatzParams) -> list[GateOp]:
    """Per layer: trainable RX/RZ per qubit, then a CRZ chain."""
    m = params.num_qubits
    ops = []
    for a in range(params.num_layers):
        rot = params.rot(a)
        crz = params.crz(a)
        for q in range(m):
            ops.append(GateOp("RX", (q,), angle=float(rot[2 * q])))
            ops.append(GateOp("RZ", (q,), angle=float(rot[2 * q + 1])))
        for q in range(m - 1):
            ops.append(GateOp("CRZ", (q, q + 1), angle=float(crz[q])))
    return ops


def forward_state(
    window: ContextWindow, params: AnsatzParams, config: ModelConfig
) -> StateVector:
    """Run the full circuit for one context window and return the state."""
    if params.num_qubits != config.num_qubits:
        raise ValueError("ansatz parameters and model config disagree on qubit count")
    if window.vocab_size != config.vocab_size:
        raise ValueError("context window and model config disagree on vocabulary size")
    schedule = encode_window(window, config.method, config.hyperparams, config.num_qubits)
    ops = build_encoding_ops(schedule, config.num_qubits) + build_ansatz_ops(params)
    return qsim.apply_ops(qsim.new_zero_state(config.num_qubits), ops)


def forward(window: ContextWindow, params: AnsatzParams, config: ModelConfig) -> np.ndarray:
    """Per-qubit P(|1>) predicted for the encoded context."""
    return qsim.qubit_probabilities(forward_state(window, params, config))


def count_gates(
    num_qubits: int, ansatz_layers: int, encoding_layers: int
) -> tuple[int, int, int]:
    """(encoding gates, ansatz gates, total incl. the m Hadamards)."""
    per_layer = params_per_layer(num_qubits)
    g_context = per_layer * encoding_layers
    g_ansatz = per_layer * ansatz_layers
    return g_context, g_ansatz, g_context + g_ansatz + num_qubits


def params_to_dict(params: AnsatzParams, config: ModelConfig) -> dict:
    return {
        "version": PARAMS_FORMAT_VERSION,
        "m": config.num_qubits,
        "M": params.num_layers,
        "vocab_size": config.vocab_size,
        "method": config.method,
        "hyperparams": {
            "alpha": config.hyperparams.alpha,
            "omega": config.hyperparams.omega,
            "delta": config.hyperparams.delta,
            "prime_p": config.hyperparams.prime_p,
            "hash_space_n": config.hyperparams.hash_space_n,
        },
        "layers": [
            {"rot": params.rot(a).tolist(), "crz": params.crz(a).tolist()}
            for a in range(params.num_layers)
        ],
    }


def params_from_dict(doc: dict) -> tuple[AnsatzParams, ModelConfig]:
    if doc.get("version") != PARAMS_FORMAT_VERSION:
        raise ValueError(f"unsupported params document version {doc.get('version')!r}")
    config = ModelConfig(
        num_qubits=doc["m"],
        num_layers=doc["M"],
        vocab_size=doc["vocab_size"],
        method=doc["method"],
        hyperparams=EncodingHyperparams(**doc["hyperparams"]),
    )
    layers = np.array(
        [layer["rot"] + layer["crz"] for layer in doc["layers"]], dtype=np.float64
    )
    return AnsatzParams(config.num_qubits, layers), config


def save_params(params: AnsatzParams, config: ModelConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params, config), indent=2) + "\n")


def load_params(path: str | Path) -> tuple[AnsatzParams, ModelConfig]:
    return params_from_dict(json.loads(Path(path).read_text()))

"""Training: per-qubit cross-entropy, gradients, Adam loop, Hamming accuracy.

The loss for one pair is the summed binary cross-entropy between the
predicted P(|1>_q) and the bits of the center word's index (probabilities
clamped to [1e-9, 1 - 1e-9] before the logs). Updates are per-sample
Adam in a seed-shuffled order, which keeps epoch-mean losses smooth and
the whole trajectory reproducible.

Two gradient modes:

* ``parameter_shift`` - exact two-term +-pi/2 shifts for the RX/RZ
  angles. A CRZ(phi) is rewritten as CNOT, RZ(-phi/2), CNOT, RZ(+phi/2)
  on the target, and each half is shifted on its own; the chain rule
  weights the halves by -1/2 and +1/2.
* ``finite_difference`` - central differences with ``fd_epsilon`` on
  every scalar, run on the un-decomposed circuit.

Both modes reuse the encoded context state as a fixed prefix and batch
all shifted circuit evaluations through one kernel call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import CapacityError, backend, qsim
from ._codes import CODE_OF_KIND
from .corpus import (
    CorpusConfig,
    TrainPair,
    Vocabulary,
    build_vocabulary,
    extract_pairs,
    load_sentences,
    target_bits,
)
from .model import AnsatzParams, ModelConfig, build_encoding_ops, params_per_layer
from .context import encode_window

CLAMP_EPS = 1e-9

GRAD_MODES = ("parameter_shift", "finite_difference")


@dataclass(frozen=True)
class TrainSettings:
    epochs: int = 50
    learning_rate: float = 0.02
    seed: int = 0
    grad_mode: str = "parameter_shift"
    fd_epsilon: float = 1e-4
    accuracy_hamming_max: int = 1
    train_test_split: float = 0.8
    window_radius: int = 2

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.grad_mode not in GRAD_MODES:
            raise ValueError(f"grad_mode must be one of {GRAD_MODES}")
        if not 0 < self.fd_epsilon < 1e-1:
            raise ValueError("fd_epsilon must be in (0, 0.1)")
        if self.accuracy_hamming_max < 0:
            raise ValueError("accuracy_hamming_max must be >= 0")
        if not 0 < self.train_test_split < 1:
            raise ValueError("train_test_split must be in (0, 1)")
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")


@dataclass(frozen=True)
class TrainRecord:
    epoch: int
    mean_loss: float
    accuracy: float


def loss(probs_one: np.ndarray, bits: np.ndarray) -> float:
    """Summed per-qubit binary cross-entropy against the target bits."""
    probs_one = np.asarray(probs_one, dtype=np.float64)
    bits = np.asarray(bits)
    if probs_one.shape != bits.shape:
        raise ValueError(f"prediction shape {probs_one.shape} != target shape {bits.shape}")
    return float(_loss_rows(probs_one[None, :], bits)[0])


def _loss_rows(probs: np.ndarray, bits: np.ndarray) -> np.ndarray:
    p = np.clip(probs, CLAMP_EPS, 1.0 - CLAMP_EPS)
    b = bits.astype(np.float64)
    return -(b * np.log(p) + (1.0 - b) * np.log1p(-p)).sum(axis=1)


def _loss_grad_wrt_probs(probs: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """dL/dp at the unshifted prediction; zero outside the clamp window."""
    inside = (probs >= CLAMP_EPS) & (probs <= 1.0 - CLAMP_EPS)
    p = np.clip(probs, CLAMP_EPS, 1.0 - CLAMP_EPS)
    b = bits.astype(np.float64)
    return (-b / p + (1.0 - b) / (1.0 - p)) * inside


# -- compiled circuit layouts --------------------------------------------------


@dataclass(frozen=True)
class _Layout:
    """Kernel arrays for an ansatz plus the op <-> parameter wiring."""

    kinds: np.ndarray
    q0s: np.ndarray
    q1s: np.ndarray
    map_op: np.ndarray      # ops whose angle shifts
    map_param: np.ndarray   # flat parameter owning each shiftable op
    map_coeff: np.ndarray   # d(op angle)/d(parameter)

    @property
    def num_ops(self) -> int:
        return self.kinds.shape[0]


@lru_cache(maxsize=None)
def _plain_layout(num_qubits: int, num_layers: int) -> _Layout:
    """Native ansatz ops; op order matches the flat parameter order 1:1."""
    kinds, q0s, q1s = [], [], []
    for _ in range(num_layers):
        for q in range(num_qubits):
            kinds += [CODE_OF_KIND["RX"], CODE_OF_KIND["RZ"]]
            q0s += [q, q]
            q1s += [0, 0]
        for q in range(num_qubits - 1):
            kinds.append(CODE_OF_KIND["CRZ"])
            q0s.append(q)
            q1s.append(q + 1)
    n = len(kinds)
    ops = np.arange(n, dtype=np.int64)
    return _Layout(
        np.array(kinds, dtype=np.int64),
        np.array(q0s, dtype=np.int64),
        np.array(q1s, dtype=np.int64),
        map_op=ops,
        map_param=ops.copy(),
        map_coeff=np.ones(n),
    )


@lru_cache(maxsize=None)
def _decomposed_layout(num_qubits: int, num_layers: int) -> _Layout:
    """Ansatz with every CRZ expanded to CNOT, RZ(-phi/2), CNOT, RZ(+phi/2)."""
    per_layer = params_per_layer(num_qubits)
    kinds, q0s, q1s = [], [], []
    map_op, map_param, map_coeff = [], [], []
    for a in range(num_layers):
        pbase = a * per_layer
        for q in range(num_qubits):
            for offset, code in ((2 * q, CODE_OF_KIND["RX"]), (2 * q + 1, CODE_OF_KIND["RZ"])):
                map_op.append(len(kinds))
                map_param.append(pbase + offset)
                map_coeff.append(1.0)
                kinds.append(code)
                q0s.append(q)
                q1s.append(0)
        for q in range(num_qubits - 1):
            param = pbase + 2 * num_qubits + q
            for half_coeff in (-0.5, 0.5):
                kinds.append(CODE_OF_KIND["CNOT"])
                q0s.append(q)
                q1s.append(q + 1)
                map_op.append(len(kinds))
                map_param.append(param)
                map_coeff.append(half_coeff)
                kinds.append(CODE_OF_KIND["RZ"])
                q0s.append(q + 1)
                q1s.append(0)
    return _Layout(
        np.array(kinds, dtype=np.int64),
        np.array(q0s, dtype=np.int64),
        np.array(q1s, dtype=np.int64),
        np.array(map_op, dtype=np.int64),
        np.array(map_param, dtype=np.int64),
        np.array(map_coeff),
    )


def _fill_angles(layout: _Layout, flat: np.ndarray) -> np.ndarray:
    angles = np.zeros(layout.num_ops)
    angles[layout.map_op] = layout.map_coeff * flat[layout.map_param]
    return angles


def encoded_state(window_indices: tuple[int, ...], config: ModelConfig) -> np.ndarray:
    """Amplitudes after the encoding block - the fixed prefix of a pair."""
    schedule = encode_window(
        config.window(window_indices), config.method, config.hyperparams, config.num_qubits
    )
    ops = build_encoding_ops(schedule, config.num_qubits)
    amps = np.zeros(1 << config.num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    backend.kernels().run_ops_inplace(amps, *qsim.ops_to_arrays(ops))
    return amps


def _predict(base: np.ndarray, layout: _Layout, angles: np.ndarray, num_qubits: int) -> np.ndarray:
    amps = base.copy()
    backend.kernels().run_ops_inplace(amps, layout.kinds, layout.q0s, layout.q1s, angles)
    return backend.kernels().probs_one(amps, num_qubits)


def _loss_and_gradient(
    base: np.ndarray,
    bits: np.ndarray,
    params: AnsatzParams,
    settings: TrainSettings,
) -> tuple[float, np.ndarray]:
    m = params.num_qubits
    flat = params.layers.reshape(-1)
    if settings.grad_mode == "parameter_shift":
        layout = _decomposed_layout(m, params.num_layers)
        shift = math.pi / 2
    else:
        layout = _plain_layout(m, params.num_layers)
        shift = settings.fd_epsilon
    angles = _fill_angles(layout, flat)

    n_map = layout.map_op.shape[0]
    eval_ops = np.empty(1 + 2 * n_map, dtype=np.int64)
    eval_angles = np.zeros(1 + 2 * n_map)
    eval_ops[0] = -1
    eval_ops[1::2] = layout.map_op
    eval_ops[2::2] = layout.map_op
    mapped = angles[layout.map_op]
    eval_angles[1::2] = mapped + shift
    eval_angles[2::2] = mapped - shift

    probs = backend.kernels().run_shifted_batch(
        base, layout.kinds, layout.q0s, layout.q1s, angles, eval_ops, eval_angles, m
    )
    base_loss = float(_loss_rows(probs[:1], bits)[0])

    grad_flat = np.zeros(flat.shape[0])
    if settings.grad_mode == "parameter_shift":
        gbar = _loss_grad_wrt_probs(probs[0], bits)
        d_angle = 0.5 * (probs[1::2] - probs[2::2]) @ gbar
        np.add.at(grad_flat, layout.map_param, layout.map_coeff * d_angle)
    else:
        losses = _loss_rows(probs[1:], bits)
        np.add.at(
            grad_flat,
            layout.map_param,
            (losses[0::2] - losses[1::2]) / (2.0 * settings.fd_epsilon),
        )
    return base_loss, grad_flat.reshape(params.layers.shape)


def gradient(
    pair: TrainPair, params: AnsatzParams, config: ModelConfig, settings: TrainSettings
) -> np.ndarray:
    """Loss gradient for one pair, shaped like ``params.layers``."""
    if not pair.context:
        raise ValueError("cannot take a gradient for a pair with an empty context")
    base = encoded_state(pair.context, config)
    bits = target_bits(pair.center, config.num_qubits)
    _, grad = _loss_and_gradient(base, bits, params, settings)
    return grad


class Adam:
    """Adam with bias correction; operates in place on the parameter array."""

    def __init__(self, shape, learning_rate: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)

    def step(self, values: np.ndarray, grad: np.ndarray) -> None:
        self.step_count += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1**self.step_count)
        v_hat = self.v / (1 - self.beta2**self.step_count)
        values -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def usable_pairs(pairs: Sequence[TrainPair]) -> list[TrainPair]:
    """Pairs with a nonempty context; only those can drive the circuit."""
    return [p for p in pairs if p.context]


def train_epoch(
    pairs: Sequence[TrainPair],
    params: AnsatzParams,
    config: ModelConfig,
    settings: TrainSettings,
    optimizer: Adam | None = None,
    rng: np.random.Generator | None = None,
    encoded: dict[tuple[int, ...], np.ndarray] | None = None,
) -> tuple[AnsatzParams, float]:
    """One seed-shuffled pass of per-sample updates; returns new params and mean loss.

    Passing the same ``optimizer``/``rng`` across epochs continues one
    training run; omitting them makes this call self-contained.
    """
    pairs = usable_pairs(pairs)
    if not pairs:
        raise ValueError("no trainable pairs (every context is empty)")
    if rng is None:
        rng = np.random.default_rng(settings.seed)
    if encoded is None:
        encoded = {}
    params = params.copy()
    if optimizer is None:
        optimizer = Adam(params.layers.shape, settings.learning_rate)

    total = 0.0
    for i in rng.permutation(len(pairs)):
        pair = pairs[i]
        base = encoded.get(pair.context)
        if base is None:
            base = encoded_state(pair.context, config)
            encoded[pair.context] = base
        bits = target_bits(pair.center, config.num_qubits)
        pair_loss, grad = _loss_and_gradient(base, bits, params, settings)
        optimizer.step(params.layers, grad)
        total += pair_loss
    return params, total / len(pairs)


def accuracy(
    pairs: Sequence[TrainPair],
    params: AnsatzParams,
    config: ModelConfig,
    settings: TrainSettings,
    encoded: dict[tuple[int, ...], np.ndarray] | None = None,
) -> float:
    """Fraction of pairs whose thresholded prediction (p >= 0.5 -> 1) is
    within ``accuracy_hamming_max`` bit flips of the target."""
    pairs = usable_pairs(pairs)
    if not pairs:
        raise ValueError("no evaluable pairs (every context is empty)")
    if encoded is None:
        encoded = {}
    layout = _plain_layout(config.num_qubits, params.num_layers)
    angles = params.layers.reshape(-1)
    correct = 0
    for pair in pairs:
        base = encoded.get(pair.context)
        if base is None:
            base = encoded_state(pair.context, config)
            encoded[pair.context] = base
        probs = _predict(base, layout, angles, config.num_qubits)
        bits = target_bits(pair.center, config.num_qubits)
        hamming = int(np.sum((probs >= 0.5).astype(np.int8) != bits))
        if hamming <= settings.accuracy_hamming_max:
            correct += 1
    return correct / len(pairs)


@dataclass
class ExperimentResult:
    records: list[TrainRecord]
    params: AnsatzParams
    config: ModelConfig
    settings: TrainSettings
    vocab: Vocabulary
    num_pairs: int
    num_train: int
    num_test: int


def split_pairs(
    pairs: Sequence[TrainPair], split: float, rng: np.random.Generator
) -> tuple[list[TrainPair], list[TrainPair]]:
    """Shuffled train/test partition; the train side is never empty."""
    order = rng.permutation(len(pairs))
    n_train = max(1, round(split * len(pairs)))
    train = [pairs[i] for i in order[:n_train]]
    test = [pairs[i] for i in order[n_train:]]
    return train, test


def run_experiment(
    corpus_config: CorpusConfig, config: ModelConfig, settings: TrainSettings
) -> ExperimentResult:
    """Full protocol: corpus -> pairs -> split -> epochs of train + eval.

    Deterministic for a fixed seed. Accuracy is measured on the held-out
    pairs (on the training pairs if the corpus is too small to hold any
    out).
    """
    sentences = load_sentences(corpus_config)
    vocab = build_vocabulary(sentences)
    if vocab.size != config.vocab_size:
        raise ValueError(
            f"model config expects a vocabulary of {config.vocab_size} words, "
            f"corpus has {vocab.size}"
        )
    if vocab.size > 1 << config.num_qubits:
        raise CapacityError(
            f"vocabulary of {vocab.size} words does not fit in {config.num_qubits} qubits"
        )
    pairs = usable_pairs(extract_pairs(sentences, vocab, settings.window_radius))
    if not pairs:
        raise ValueError("corpus produced no trainable pairs")

    rng = np.random.default_rng(settings.seed)
    train_pairs, test_pairs = split_pairs(pairs, settings.train_test_split, rng)
    eval_pairs = test_pairs if test_pairs else train_pairs

    params = AnsatzParams.random(config.num_qubits, config.num_layers, rng)
    optimizer = Adam(params.layers.shape, settings.learning_rate)
    encoded: dict[tuple[int, ...], np.ndarray] = {}
    records = []
    for epoch in range(1, settings.epochs + 1):
        params, mean_loss = train_epoch(
            train_pairs, params, config, settings, optimizer, rng, encoded
        )
        acc = accuracy(eval_pairs, params, config, settings, encoded)
        records.append(TrainRecord(epoch, mean_loss, acc))
    return ExperimentResult(
        records,
        params,
        config,
        settings,
        vocab,
        num_pairs=len(pairs),
        num_train=len(train_pairs),
        num_test=len(test_pairs),
    )


def records_to_csv(records: Sequence[TrainRecord]) -> str:
    lines = ["epoch,mean_loss,accuracy"]
    lines += [f"{r.epoch},{r.mean_loss!r},{r.accuracy!r}" for r in records]
    return "\n".join(lines) + "\n"

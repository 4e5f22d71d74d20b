"""Context encodings: turn a window of word indices into rotation angles.

Five encodings are provided. Four produce an ``n x n`` matrix over the
window, one a length-``n`` vector; all are built from the normalised
angle ``theta_i = idx_i * 2*pi / vocab_size`` of the word at window
position ``i`` plus positional decay/phase terms. ``reshape_to_schedule``
then flattens the result row-major into layers of ``2m`` angles (zero
padded at the tail) that drive the encoding circuit.

Positions are 0-based within the window. Hash values feed the sine as
plain radians; no reduction modulo 2*pi is applied since the sine is
periodic anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class EncodingHyperparams:
    """Knobs shared by the encodings.

    Defaults: decay alpha=0.5 (meaningful falloff across a 4-word span),
    frequency omega=1, phase scale delta=1, hash prime 31 with a 2^16
    hash space (collision-free for desk-sized vocabularies).
    """

    alpha: float = 0.5
    omega: float = 1.0
    delta: float = 1.0
    prime_p: int = 31
    hash_space_n: int = 65536

    def __post_init__(self):
        if self.alpha <= 0 or self.omega <= 0 or self.delta <= 0:
            raise ValueError("alpha, omega and delta must be strictly positive")
        if not _is_prime(self.prime_p):
            raise ValueError(f"prime_p must be prime, got {self.prime_p}")
        if self.hash_space_n < 2:
            raise ValueError(f"hash_space_n must be >= 2, got {self.hash_space_n}")


@dataclass(frozen=True)
class ContextWindow:
    """The vocabulary indices surrounding one center word."""

    word_indices: tuple[int, ...]
    vocab_size: int

    def __post_init__(self):
        if len(self.word_indices) < 1:
            raise ValueError("context window must hold at least one word")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        for idx in self.word_indices:
            if not 0 <= idx < self.vocab_size:
                raise ValueError(f"word index {idx} outside vocabulary of size {self.vocab_size}")

    def __len__(self) -> int:
        return len(self.word_indices)

    def thetas(self) -> np.ndarray:
        """theta_i = idx_i * 2*pi / vocab_size."""
        return np.asarray(self.word_indices, dtype=np.float64) * (2 * math.pi / self.vocab_size)


def _distance_decay(n: int, alpha: float) -> np.ndarray:
    pos = np.arange(n, dtype=np.float64)
    return np.exp(-alpha * np.abs(pos[:, None] - pos[None, :]))


def exp_decay_sinusoidal(window: ContextWindow, hyper: EncodingHyperparams) -> np.ndarray:
    """c_ij = exp(-alpha*|i-j|) * sin(omega*theta_i) * cos(omega*theta_j) + theta_i."""
    th = window.thetas()
    decay = _distance_decay(len(window), hyper.alpha)
    return decay * np.outer(np.sin(hyper.omega * th), np.cos(hyper.omega * th)) + th[:, None]


def index_diagonal(window: ContextWindow, hyper: EncodingHyperparams) -> np.ndarray:
    """c_ii = ln(1 + idx_i); off-diagonal exp(-alpha*|i-j|) * sin(omega*theta_i) + theta_i."""
    th = window.thetas()
    decay = _distance_decay(len(window), hyper.alpha)
    out = decay * np.sin(hyper.omega * th)[:, None] + th[:, None]
    np.fill_diagonal(out, np.log1p(np.asarray(window.word_indices, dtype=np.float64)))
    return out


def positional_phase_shift(window: ContextWindow, hyper: EncodingHyperparams) -> np.ndarray:
    """c_ij = exp(-alpha*|i-j|) * sin(omega*i + delta*theta_i) + theta_i.

    The sinusoid depends on j only through the decay factor.
    """
    th = window.thetas()
    pos = np.arange(len(window), dtype=np.float64)
    decay = _distance_decay(len(window), hyper.alpha)
    return decay * np.sin(hyper.omega * pos + hyper.delta * th)[:, None] + th[:, None]


def hash_modulation(window: ContextWindow, hyper: EncodingHyperparams) -> np.ndarray:
    """c_ij = exp(-alpha*|i-j|) * sin(omega*i + h_i) + theta_i with h_i = (idx_i*p) mod N."""
    th = window.thetas()
    idx = np.asarray(window.word_indices, dtype=np.int64)
    h = (idx * hyper.prime_p) % hyper.hash_space_n
    pos = np.arange(len(window), dtype=np.float64)
    decay = _distance_decay(len(window), hyper.alpha)
    return decay * np.sin(hyper.omega * pos + h.astype(np.float64))[:, None] + th[:, None]


def angular_shift_vector(window: ContextWindow, hyper: EncodingHyperparams) -> np.ndarray:
    """v_i = omega * theta_i."""
    return hyper.omega * window.thetas()


# Canonical sweep order mirrors the matrix methods first, vector last.
CONTEXT_METHODS = {
    "exp-decay-sin": exp_decay_sinusoidal,
    "index-diag": index_diagonal,
    "phase-shift": positional_phase_shift,
    "hash-mod": hash_modulation,
    "angular-shift": angular_shift_vector,
}


@dataclass(frozen=True)
class EncodingSchedule:
    """L layers of 2m rotation angles; trailing pad entries are zero."""

    layers: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.layers.ndim != 2:
            raise ValueError("schedule layers must be a 2-d array")
        if self.layers.shape[1] % 2 != 0:
            raise ValueError("schedule width must be even (two angles per qubit)")

    @property
    def num_layers(self) -> int:
        return self.layers.shape[0]

    @property
    def width(self) -> int:
        return self.layers.shape[1]


def reshape_to_schedule(values: np.ndarray, num_qubits: int) -> EncodingSchedule:
    """Flatten row-major, cut into chunks of 2m, zero-pad the last chunk.

    Layer l supplies the RX angle of qubit q from chunk[2q] and the RZ
    angle from chunk[2q+1].
    """
    if num_qubits < 2:
        raise ValueError(f"need at least 2 qubits to schedule, got {num_qubits}")
    flat = np.asarray(values, dtype=np.float64).reshape(-1)
    if flat.size == 0:
        raise ValueError("cannot build a schedule from an empty context")
    width = 2 * num_qubits
    num_layers = -(-flat.size // width)
    padded = np.zeros(num_layers * width, dtype=np.float64)
    padded[: flat.size] = flat
    return EncodingSchedule(padded.reshape(num_layers, width))


def encode_window(
    window: ContextWindow, method: str, hyper: EncodingHyperparams, num_qubits: int
) -> EncodingSchedule:
    """Apply one named encoding and reshape it for the circuit."""
    try:
        fn = CONTEXT_METHODS[method]
    except KeyError:
        raise ValueError(
            f"unknown context method {method!r}; expected one of {sorted(CONTEXT_METHODS)}"
        ) from None
    return reshape_to_schedule(fn(window, hyper), num_qubits)

"""Corpus handling: tokens, vocabulary, center/context pairs, bit targets.

Tokenization is deliberately plain: lowercase, strip punctuation, split
on whitespace. Training targets are the big-endian binary expansion of
the center word's vocabulary index - the register predicts that basis
state bit-by-bit, so bit 0 of the target (the most significant bit)
lines up with qubit 0 of the prediction.

The synthetic generator stands in for unpublished corpora. Each sentence
is drawn from one seeded "topic" (a small slice of the vocabulary) with
Zipf-like weights inside and across topics, plus a small leak to the
global marginal. Frequencies stay heavy-tailed while words of a topic
genuinely co-occur - without that structure a context window would carry
no signal about its center and training depth would be meaningless.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import CapacityError

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def tokenize(text: str) -> list[str]:
    """Lowercase, drop punctuation, split on whitespace."""
    return text.lower().translate(_PUNCT_TABLE).split()


def read_corpus(path: str | Path) -> list[list[str]]:
    """One sentence per line; blank lines are skipped."""
    sentences = []
    for line in Path(path).read_text().splitlines():
        tokens = tokenize(line)
        if tokens:
            sentences.append(tokens)
    return sentences


def write_corpus(sentences: Iterable[Sequence[str]], path: str | Path) -> None:
    Path(path).write_text("".join(" ".join(s) + "\n" for s in sentences))


@dataclass
class Vocabulary:
    word_to_index: dict[str, int]
    index_to_word: list[str]

    @property
    def size(self) -> int:
        return len(self.index_to_word)

    def index_of(self, token: str) -> int:
        try:
            return self.word_to_index[token]
        except KeyError:
            raise ValueError(f"token {token!r} not in vocabulary") from None


def build_vocabulary(sentences: Sequence[Sequence[str]]) -> Vocabulary:
    """Assign indices in first-appearance order."""
    word_to_index: dict[str, int] = {}
    index_to_word: list[str] = []
    for sentence in sentences:
        for token in sentence:
            if token not in word_to_index:
                word_to_index[token] = len(index_to_word)
                index_to_word.append(token)
    if not index_to_word:
        raise ValueError("corpus contains no tokens")
    return Vocabulary(word_to_index, index_to_word)


@dataclass(frozen=True)
class TrainPair:
    """A center word index and its ordered context indices."""

    center: int
    context: tuple[int, ...]


def extract_pairs(
    sentences: Sequence[Sequence[str]], vocab: Vocabulary, window_radius: int = 2
) -> list[TrainPair]:
    """One pair per token position; contexts shrink at sentence edges."""
    if window_radius < 1:
        raise ValueError("window radius must be >= 1")
    pairs = []
    for sentence in sentences:
        ids = [vocab.index_of(t) for t in sentence]
        for i, center in enumerate(ids):
            left = ids[max(0, i - window_radius) : i]
            right = ids[i + 1 : i + 1 + window_radius]
            pairs.append(TrainPair(center, tuple(left + right)))
    return pairs


def target_bits(center: int, num_qubits: int) -> np.ndarray:
    """Big-endian binary expansion of the center index, one bit per qubit."""
    if center >= 1 << num_qubits:
        raise CapacityError(
            f"center index {center} does not fit in {num_qubits} qubits"
        )
    return np.array([(center >> (num_qubits - 1 - k)) & 1 for k in range(num_qubits)], dtype=np.int8)


def dump_pairs(pairs: Iterable[TrainPair], path: str | Path) -> None:
    """Line-delimited JSON records for inspection."""
    with open(path, "w") as fh:
        for p in pairs:
            fh.write(json.dumps({"center": p.center, "context": list(p.context)}) + "\n")


def generate_synthetic_corpus(
    seed: int, num_sentences: int, vocab_size: int, sentence_len: int
) -> list[list[str]]:
    """Deterministic synthetic sentences using exactly ``vocab_size`` tokens."""
    if vocab_size < 2:
        raise ValueError("vocab_size must be >= 2")
    if num_sentences < 1 or sentence_len < 1:
        raise ValueError("corpus dimensions must be positive")
    if num_sentences * sentence_len < vocab_size:
        raise ValueError("corpus too small to use every vocabulary token")

    rng = np.random.default_rng(seed)
    zipf = 1.0 / (np.arange(vocab_size) + 1.0) ** 1.1
    marginal = zipf / zipf.sum()

    # Words partition into topics of ~6; a sentence draws from one topic
    # with a 5% leak to the whole vocabulary.
    num_topics = max(2, round(vocab_size / 6))
    membership = rng.permuted(np.arange(vocab_size) % num_topics)
    topic_dists = np.zeros((num_topics, vocab_size))
    for t in range(num_topics):
        weights = np.where(membership == t, zipf, 0.0)
        topic_dists[t] = 0.95 * weights / weights.sum() + 0.05 * marginal
    topic_weights = 1.0 / (np.arange(num_topics) + 1.0)
    topic_weights /= topic_weights.sum()

    ids = np.empty((num_sentences, sentence_len), dtype=np.int64)
    for s in range(num_sentences):
        topic = rng.choice(num_topics, p=topic_weights)
        ids[s] = rng.choice(vocab_size, size=sentence_len, p=topic_dists[topic])

    # Replace duplicates of common tokens until every token occurs.
    counts = np.bincount(ids.reshape(-1), minlength=vocab_size)
    for missing in np.flatnonzero(counts == 0):
        flat = ids.reshape(-1)
        replaceable = np.flatnonzero(counts[flat] >= 2)
        pos = replaceable[rng.integers(replaceable.size)]
        counts[flat[pos]] -= 1
        counts[missing] += 1
        flat[pos] = missing

    return [[f"w{v}" for v in row] for row in ids]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for the synthetic corpus generator."""

    seed: int = 42
    num_sentences: int = 300
    vocab_size: int = 34
    sentence_len: int = 4


@dataclass(frozen=True)
class CorpusConfig:
    """Where training text comes from: a file or the generator."""

    path: str | None = None
    synthetic: SyntheticSpec | None = None

    def __post_init__(self):
        if (self.path is None) == (self.synthetic is None):
            raise ValueError("corpus config needs exactly one of path or synthetic")


def load_sentences(config: CorpusConfig) -> list[list[str]]:
    if config.path is not None:
        return read_corpus(config.path)
    spec = config.synthetic
    return generate_synthetic_corpus(
        spec.seed, spec.num_sentences, spec.vocab_size, spec.sentence_len
    )

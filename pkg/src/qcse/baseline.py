"""Classical CBOW baseline trained on the same center/context pairs.

One shared ``|V| x d`` embedding matrix plays both roles: context rows
are averaged into a query vector that is scored against every row by
dot product and softmax-normalised. Tying the matrices keeps the
trainable parameter count at exactly ``|V| * d``. Training minimises
categorical cross-entropy on the center word with the same per-sample
Adam loop, seed discipline and record format as the quantum path.

The reported accuracy is top-1 center-word retrieval; it lives on a
different scale than the quantum Hamming rule and the two numbers are
written side by side, not equated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import TrainPair
from .train import Adam, TrainRecord, TrainSettings, split_pairs, usable_pairs


@dataclass
class CbowModel:
    """Tied-weights bag-of-words model; ``embedding`` is |V| x d."""

    embedding: np.ndarray

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def dim(self) -> int:
        return self.embedding.shape[1]

    @property
    def count(self) -> int:
        return self.embedding.size


def cbow_forward(context: Sequence[int], model: CbowModel) -> np.ndarray:
    """Softmax distribution over the vocabulary for one context."""
    if len(context) == 0:
        raise ValueError("context must not be empty")
    query = model.embedding[list(context)].mean(axis=0)
    scores = model.embedding @ query
    scores -= scores.max()  # stabilised softmax
    weights = np.exp(scores)
    return weights / weights.sum()


def _loss_and_gradient(pair: TrainPair, model: CbowModel) -> tuple[float, np.ndarray]:
    context = list(pair.context)
    query = model.embedding[context].mean(axis=0)
    scores = model.embedding @ query
    scores -= scores.max()
    weights = np.exp(scores)
    probs = weights / weights.sum()
    loss = float(-np.log(max(probs[pair.center], 1e-300)))

    # d(loss)/d(scores) = probs - onehot(center); tied weights collect both
    # the output-row term and the averaged context-row term.
    err = probs.copy()
    err[pair.center] -= 1.0
    grad = np.outer(err, query)
    context_grad = (model.embedding.T @ err) / len(context)
    for idx in context:
        grad[idx] += context_grad
    return loss, grad


def cbow_accuracy(pairs: Sequence[TrainPair], model: CbowModel) -> float:
    """Top-1: the true center word gets the highest score."""
    pairs = usable_pairs(pairs)
    if not pairs:
        raise ValueError("no evaluable pairs (every context is empty)")
    hits = sum(int(np.argmax(cbow_forward(p.context, model)) == p.center) for p in pairs)
    return hits / len(pairs)


def cbow_train(
    pairs: Sequence[TrainPair],
    vocab_size: int,
    dim: int,
    settings: TrainSettings,
    eval_pairs: Sequence[TrainPair] | None = None,
) -> tuple[CbowModel, list[TrainRecord]]:
    """Train on ``pairs``; accuracy per epoch is measured on ``eval_pairs``
    (on the training pairs when no held-out set is given)."""
    if dim < 1:
        raise ValueError("embedding dimension must be >= 1")
    pairs = usable_pairs(pairs)
    if not pairs:
        raise ValueError("no trainable pairs (every context is empty)")
    rng = np.random.default_rng(settings.seed)
    model = CbowModel(0.1 * rng.standard_normal((vocab_size, dim)))
    optimizer = Adam(model.embedding.shape, settings.learning_rate)
    eval_set = list(eval_pairs) if eval_pairs else list(pairs)

    records = []
    for epoch in range(1, settings.epochs + 1):
        total = 0.0
        for i in rng.permutation(len(pairs)):
            loss, grad = _loss_and_gradient(pairs[i], model)
            optimizer.step(model.embedding, grad)
            total += loss
        records.append(TrainRecord(epoch, total / len(pairs), cbow_accuracy(eval_set, model)))
    return model, records


def run_cbow_experiment(
    pairs: Sequence[TrainPair], vocab_size: int, dim: int, settings: TrainSettings
) -> tuple[CbowModel, list[TrainRecord]]:
    """Split pairs with the same seed discipline as the quantum runner."""
    pairs = usable_pairs(pairs)
    rng = np.random.default_rng(settings.seed)
    train_pairs, test_pairs = split_pairs(pairs, settings.train_test_split, rng)
    return cbow_train(train_pairs, vocab_size, dim, settings, test_pairs or train_pairs)

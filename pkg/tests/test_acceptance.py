"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s`. The two training
criteria dominate the runtime (several minutes each; budgets are
asserted inside the tests). Timed sections exclude the one-off numba
compilation, which is warmed up explicitly first.
"""

import time

import numpy as np
import pytest

from qcse import qsim
from qcse.context import CONTEXT_METHODS
from qcse.corpus import CorpusConfig, SyntheticSpec, TrainPair, generate_synthetic_corpus
from qcse.model import (
    AnsatzParams,
    ModelConfig,
    build_ansatz_ops,
    build_encoding_ops,
    count_gates,
    min_qubits,
)
from qcse.qsim import GateOp, StateVector
from qcse.train import Adam, TrainSettings, gradient, run_experiment, train_epoch

import dense_oracle as oracle


def ok(criterion: str) -> None:
    print(f"\nacceptance: {criterion}: PASS", flush=True)


def test_criterion_01_simulator_matches_dense_oracle():
    """Every gate vs the Kronecker oracle, 1000 random circuits, < 1e-12."""
    rng = np.random.default_rng(2024)
    all_kinds = ["H", "X", "Y", "Z", "RX", "RZ", "CNOT", "CZ", "CRZ"]

    # warm the JIT path before the timed region
    warm = qsim.new_zero_state(2)
    for kind in all_kinds:
        targets = (0, 1) if kind in ("CNOT", "CZ", "CRZ") else (0,)
        angle = 0.5 if kind in ("RX", "RZ", "CRZ") else None
        warm = qsim.apply_gate(warm, GateOp(kind, targets, angle))

    seen_kinds = set()
    worst = 0.0
    start = time.perf_counter()
    for i in range(1000):
        m = 1 + i % 4
        amps = oracle.random_state(m, rng)
        state = StateVector(m, amps.copy())
        for _ in range(8):
            kind, targets, angle = oracle.random_op(m, rng)
            seen_kinds.add(kind)
            state = qsim.apply_gate(state, GateOp(kind, targets, angle))
            amps = oracle.apply_dense(amps, kind, targets, angle, m)
        worst = max(worst, float(np.max(np.abs(state.amplitudes - amps))))
    elapsed = time.perf_counter() - start

    assert seen_kinds == set(all_kinds)
    assert worst < 1e-12, f"max amplitude deviation {worst}"
    assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f}s"
    ok(f"1. simulator oracle equivalence (max dev {worst:.2e}, {elapsed:.1f}s)")


def test_criterion_02_trainable_parameter_counts():
    """Depth table: 6 qubits give 17..136 params for 1..8 layers; 5/3 gives 42."""
    expected = [17, 34, 51, 68, 85, 102, 119, 136]
    actual = [AnsatzParams.zeros(6, layers).count for layers in range(1, 9)]
    assert actual == expected
    assert AnsatzParams.zeros(5, 3).count == 42
    ok("2. trainable parameter counts (17..136 and 42)")


def test_criterion_03_gate_count_formula():
    """Constructed op counts equal (3m-1)(M+L)+m on {2..8}x{1..8}x{1..4}."""
    rng = np.random.default_rng(7)
    for m in range(2, 9):
        for layers_m in range(1, 9):
            ansatz_ops = build_ansatz_ops(AnsatzParams.random(m, layers_m, rng))
            for layers_l in range(1, 5):
                from qcse.context import EncodingSchedule

                schedule = EncodingSchedule(rng.standard_normal((layers_l, 2 * m)))
                encoding_ops = build_encoding_ops(schedule, m)
                total = len(encoding_ops) + len(ansatz_ops)
                assert total == (3 * m - 1) * (layers_m + layers_l) + m
                assert count_gates(m, layers_m, layers_l)[2] == total
    ok("3. gate-count formula on {2..8}x{1..8}x{1..4}")


def test_criterion_04_qubit_count_rule():
    """m = ceil(log2 |V|): 31 -> 5, 27 -> 5, 34 -> 6."""
    assert min_qubits(31) == 5
    assert min_qubits(27) == 5
    assert min_qubits(34) == 6
    ok("4. qubit-count rule (31->5, 27->5, 34->6)")


def test_criterion_05_parameter_shift_vs_finite_difference():
    """20 random configs (m<=4, M<=3): elementwise agreement within 1e-4."""
    rng = np.random.default_rng(99)
    # warm both gradient paths before timing
    warm_cfg = ModelConfig(num_qubits=2, num_layers=1, vocab_size=4)
    warm_params = AnsatzParams.random(2, 1, rng)
    for mode in ("parameter_shift", "finite_difference"):
        gradient(TrainPair(0, (1,)), warm_params, warm_cfg, TrainSettings(grad_mode=mode))

    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(2, 5))
        layers = int(rng.integers(1, 4))
        vocab = 1 << m
        config = ModelConfig(num_qubits=m, num_layers=layers, vocab_size=vocab)
        params = AnsatzParams.random(m, layers, rng, scale=0.8)
        n_ctx = int(rng.integers(1, 5))
        pair = TrainPair(
            int(rng.integers(vocab)), tuple(int(v) for v in rng.integers(0, vocab, n_ctx))
        )
        ps = gradient(pair, params, config, TrainSettings(grad_mode="parameter_shift"))
        fd = gradient(pair, params, config, TrainSettings(grad_mode="finite_difference"))
        worst = max(worst, float(np.max(np.abs(ps - fd))))
    elapsed = time.perf_counter() - start

    assert worst < 1e-4, f"gradient modes disagree by {worst}"
    assert elapsed < 60.0, f"gradient sweep took {elapsed:.1f}s"
    ok(f"5. parameter-shift vs finite differences (max delta {worst:.2e}, {elapsed:.1f}s)")


TABLE_CORPUS = CorpusConfig(
    synthetic=SyntheticSpec(seed=42, num_sentences=300, vocab_size=34, sentence_len=4)
)


def test_criterion_06_training_loss_trend():
    """Seed-42 corpus, m=6, M=6, 50 epochs: >=5% drop and e50 <= e10."""
    config = ModelConfig(num_qubits=6, num_layers=6, vocab_size=34, method="exp-decay-sin")
    start = time.perf_counter()
    result = run_experiment(TABLE_CORPUS, config, TrainSettings(epochs=50, seed=42))
    elapsed = time.perf_counter() - start

    losses = [r.mean_loss for r in result.records]
    assert len(losses) == 50
    drop = 1.0 - losses[49] / losses[0]
    assert drop >= 0.05, f"loss fell only {drop * 100:.1f}% over 50 epochs"
    assert losses[49] <= losses[9], f"epoch-50 loss {losses[49]:.4f} > epoch-10 {losses[9]:.4f}"
    assert elapsed < 15 * 60, f"training took {elapsed / 60:.1f} min"
    ok(
        f"6. training trend (drop {drop * 100:.1f}%, e50 {losses[49]:.3f} <= e10 "
        f"{losses[9]:.3f}, {elapsed / 60:.1f} min)"
    )


def test_criterion_07_depth_improves_accuracy():
    """Mean final accuracy over 5 seeds: 6 layers beats 1 layer."""
    start = time.perf_counter()
    means = {}
    for layers in (1, 6):
        config = ModelConfig(num_qubits=6, num_layers=layers, vocab_size=34)
        finals = []
        for seed in range(5):
            result = run_experiment(TABLE_CORPUS, config, TrainSettings(epochs=50, seed=seed))
            finals.append(result.records[-1].accuracy)
        means[layers] = float(np.mean(finals))
    elapsed = time.perf_counter() - start

    assert means[6] > means[1], f"depth trend violated: {means}"
    assert elapsed < 90 * 60, f"depth sweep took {elapsed / 60:.1f} min"
    ok(
        f"7. depth trend (mean final acc M=6 {means[6]:.3f} > M=1 {means[1]:.3f}, "
        f"{elapsed / 60:.1f} min)"
    )


def test_criterion_08_method_sweep_completes():
    """All five encodings train on 128- and 1200-pair corpora; curves sane."""
    small = CorpusConfig(
        synthetic=SyntheticSpec(seed=11, num_sentences=32, vocab_size=27, sentence_len=4)
    )
    for corpus, vocab, qubits, epochs in ((small, 27, 5, 20), (TABLE_CORPUS, 34, 6, 12)):
        monotone_methods = 0
        for method in CONTEXT_METHODS:
            config = ModelConfig(
                num_qubits=qubits, num_layers=2, vocab_size=vocab, method=method
            )
            result = run_experiment(corpus, config, TrainSettings(epochs=epochs, seed=5))
            losses = np.array([r.mean_loss for r in result.records])
            assert losses.shape == (epochs,)
            assert np.all(np.isfinite(losses)), f"{method} produced non-finite losses"
            moving = np.convolve(losses, np.ones(5) / 5, mode="valid")
            if np.all(np.diff(moving) <= 1e-9):
                monotone_methods += 1
        assert monotone_methods >= 1, "no method has a non-increasing smoothed curve"
    ok("8. method sweep on 128- and 1200-pair corpora (all finite, >=1 smooth-monotone)")


def test_criterion_09_single_pair_overfits():
    """One pair, m=2, M=2, 200 epochs: final loss < 0.2."""
    config = ModelConfig(num_qubits=2, num_layers=2, vocab_size=4)
    rng = np.random.default_rng(0)
    params = AnsatzParams.random(2, 2, rng)
    pair = TrainPair(2, (0, 1, 3))
    settings = TrainSettings(learning_rate=0.05, seed=0)
    optimizer = Adam(params.layers.shape, settings.learning_rate)
    final_loss = None
    for _ in range(200):
        params, final_loss = train_epoch([pair], params, config, settings, optimizer, rng)
    assert final_loss < 0.2, f"single-pair loss stuck at {final_loss:.3f}"
    ok(f"9. single-pair overfit (final loss {final_loss:.4f} < 0.2)")


def test_criterion_10_deterministic_loss_csv(tmp_path, monkeypatch):
    """QCSE_DETERMINISTIC=1: same seed -> byte-identical loss.csv."""
    from qcse.cli import main

    monkeypatch.setenv("QCSE_DETERMINISTIC", "1")
    args = [
        "train",
        "--synthetic", "vocab=34,sentences=300,len=4,seed=42",
        "--qubits", "6",
        "--layers", "2",
        "--epochs", "2",
        "--seed", "42",
    ]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a/loss.csv").read_bytes()
    second = (tmp_path / "b/loss.csv").read_bytes()
    assert first == second
    ok("10. deterministic loss.csv under QCSE_DETERMINISTIC=1")

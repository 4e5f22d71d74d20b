"""Benchmark the numba kernels against the pure-numpy fallback.

Times the pieces training actually spends its life in: a full forward
pass, one parameter-shift gradient step, and one finite-difference
gradient step, for the two protocol-sized circuits (5 qubits / 3 layers
and 6 qubits / 6 layers).

Run:
    python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from qcse import backend
from qcse.corpus import target_bits
from qcse.model import AnsatzParams, ModelConfig, forward
from qcse.train import TrainSettings, _loss_and_gradient, encoded_state


def time_call(fn, repeats):
    fn()  # warm-up (JIT compile on the numba path)
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def build_cases():
    cases = []
    for m, layers, vocab in ((5, 3, 31), (6, 6, 34)):
        config = ModelConfig(num_qubits=m, num_layers=layers, vocab_size=vocab)
        rng = np.random.default_rng(0)
        params = AnsatzParams.random(m, layers, rng)
        context = tuple(int(v) for v in rng.integers(0, vocab, size=4))
        window = config.window(context)
        base = encoded_state(context, config)
        bits = target_bits(int(rng.integers(vocab)), m)
        ps = TrainSettings(grad_mode="parameter_shift")
        fd = TrainSettings(grad_mode="finite_difference")
        cases.append(
            (
                f"m={m} M={layers}",
                {
                    "forward": lambda w=window, p=params, c=config: forward(w, p, c),
                    "grad/param-shift": lambda b=base, t=bits, p=params, s=ps: _loss_and_gradient(b, t, p, s),
                    "grad/finite-diff": lambda b=base, t=bits, p=params, s=fd: _loss_and_gradient(b, t, p, s),
                },
            )
        )
    return cases


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    cases = build_cases()
    results = {}
    for name in ("numba", "numpy"):
        backend.set_backend(name)
        for case, fns in cases:
            for label, fn in fns.items():
                results[(case, label, name)] = time_call(fn, args.repeats)

    print(f"{'circuit':<10} {'operation':<18} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for case, fns in cases:
        for label in fns:
            fast = results[(case, label, "numba")]
            slow = results[(case, label, "numpy")]
            print(
                f"{case:<10} {label:<18} {fast * 1e3:>8.3f}ms {slow * 1e3:>8.3f}ms "
                f"{slow / fast:>7.1f}x"
            )


if __name__ == "__main__":
    main()

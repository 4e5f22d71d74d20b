"""Experiment runner CLI.

Subcommands: ``train``, ``depth-sweep``, ``method-sweep``,
``compare-baseline``, ``gen-corpus``. A run is driven by a single JSON
config document (``--config``) with command-line flags overriding file
values; every run directory receives a ``manifest.json`` from which the
run can be reproduced exactly.

Artifacts per run: ``loss.csv`` (epoch,mean_loss,accuracy),
``accuracy.csv`` (epoch,accuracy), ``params.json`` (trained angles),
``manifest.json``. Sweeps place each member in its own subdirectory and
aggregate a ``table.csv``.

Sweep members may run as parallel worker processes: ``QCSE_THREADS``
caps the worker count and ``QCSE_DETERMINISTIC=1`` forces sequential
execution. Results are byte-identical either way; the flags only govern
scheduling.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, backend
from .baseline import run_cbow_experiment
from .context import CONTEXT_METHODS, EncodingHyperparams
from .corpus import (
    CorpusConfig,
    SyntheticSpec,
    build_vocabulary,
    extract_pairs,
    load_sentences,
    write_corpus,
)
from .model import ModelConfig, min_qubits, save_params
from .train import (
    ExperimentResult,
    TrainRecord,
    TrainSettings,
    records_to_csv,
    run_experiment,
)

_SYNTH_KEYS = {
    "seed": "seed",
    "vocab": "vocab_size",
    "vocab_size": "vocab_size",
    "sentences": "num_sentences",
    "num_sentences": "num_sentences",
    "len": "sentence_len",
    "sentence_len": "sentence_len",
}


def parse_synthetic_spec(text: str) -> SyntheticSpec:
    """Parse 'vocab=34,sentences=300,len=4,seed=42' (all keys optional)."""
    kwargs = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or _SYNTH_KEYS.get(key.strip()) is None:
            raise ValueError(
                f"bad synthetic spec item {item!r}; keys: vocab, sentences, len, seed"
            )
        kwargs[_SYNTH_KEYS[key.strip()]] = int(value)
    return SyntheticSpec(**kwargs)


def parse_layer_range(text: str) -> list[int]:
    """'1-8', '1..8', '4', or '1,3,5'."""
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text and not text.startswith("-"):
            lo, hi = text.split(sep, 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty layer range {text!r}")
            return list(range(lo, hi + 1))
    return [int(v) for v in text.split(",")]


def parse_baseline_dims(text: str) -> list[int]:
    """'d=20,50' or '20,50'."""
    text = text.strip()
    if text.startswith("d="):
        text = text[2:]
    dims = [int(v) for v in text.split(",") if v.strip()]
    if not dims:
        raise ValueError("baseline flag needs at least one dimension")
    return dims


def _add_run_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON run config; flags override file values")
    sp.add_argument("--corpus", help="plain-text corpus, one sentence per line")
    sp.add_argument(
        "--synthetic",
        help="synthetic corpus spec, e.g. vocab=34,sentences=300,len=4,seed=42",
    )
    sp.add_argument("--qubits", type=int, help="register size (default: fit vocabulary)")
    sp.add_argument("--layers", help="ansatz depth; sweeps accept a range like 1-8")
    sp.add_argument("--method", choices=sorted(CONTEXT_METHODS), help="context encoding")
    sp.add_argument("--epochs", type=int)
    sp.add_argument("--lr", type=float, help="learning rate")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--grad-mode", choices=("parameter_shift", "finite_difference"))
    sp.add_argument("--out", help="output directory", default=None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcse",
        description="Train and compare quantum context-sensitive word embeddings.",
    )
    p.add_argument("--version", action="version", version=f"qcse {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("train", help="one training run")
    _add_run_flags(sp)

    sp = sub.add_parser("depth-sweep", help="train across a range of ansatz depths")
    _add_run_flags(sp)
    sp.add_argument("--baseline", help="add CBOW rows, e.g. d=20,50")

    sp = sub.add_parser("method-sweep", help="train every context encoding")
    _add_run_flags(sp)

    sp = sub.add_parser("compare-baseline", help="train the model and CBOW side by side")
    _add_run_flags(sp)
    sp.add_argument("--baseline", help="CBOW dimensions, e.g. d=20,50 (default 20)")

    sp = sub.add_parser("gen-corpus", help="write a synthetic corpus file")
    sp.add_argument(
        "--synthetic", default="", help="spec, e.g. vocab=34,sentences=300,len=4,seed=42"
    )
    sp.add_argument("--seed", type=int, help="overrides seed in --synthetic")
    sp.add_argument("--out", required=True, help="output text file")
    return p


# -- config resolution -----------------------------------------------------------


@dataclasses.dataclass
class RunPlan:
    """Everything a run needs, after merging config file and flags."""

    corpus: CorpusConfig
    qubits: int | None
    layers: list[int]
    method: str
    hyperparams: EncodingHyperparams
    settings: TrainSettings
    out_dir: Path
    baseline_dims: list[int]


def _merge_config(args: argparse.Namespace) -> RunPlan:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())

    corpus_doc = doc.get("corpus", {})
    corpus_path = args.corpus or corpus_doc.get("path")
    synthetic = None
    if args.synthetic is not None:
        synthetic = parse_synthetic_spec(args.synthetic)
    elif "synthetic" in corpus_doc:
        synthetic = SyntheticSpec(**corpus_doc["synthetic"])
    if corpus_path and synthetic:
        raise ValueError("give either --corpus or --synthetic, not both")
    if not corpus_path and not synthetic:
        raise ValueError("no corpus source: use --corpus FILE or --synthetic SPEC")
    corpus = CorpusConfig(path=corpus_path, synthetic=None if corpus_path else synthetic)

    model_doc = doc.get("model", {})
    qubits = args.qubits if args.qubits is not None else model_doc.get("qubits")
    layers_text = args.layers if args.layers is not None else str(model_doc.get("layers", 3))
    layers = parse_layer_range(str(layers_text))
    method = args.method or model_doc.get("method", "exp-decay-sin")
    hyperparams = EncodingHyperparams(**model_doc.get("hyperparams", {}))

    settings_doc = dict(doc.get("settings", {}))
    if args.epochs is not None:
        settings_doc["epochs"] = args.epochs
    if args.lr is not None:
        settings_doc["learning_rate"] = args.lr
    if args.seed is not None:
        settings_doc["seed"] = args.seed
    if args.grad_mode is not None:
        settings_doc["grad_mode"] = args.grad_mode
    settings = TrainSettings(**settings_doc)

    out_dir = Path(args.out or doc.get("out", "runs/latest"))

    baseline_dims = []
    baseline_text = getattr(args, "baseline", None) or doc.get("baseline")
    if baseline_text:
        baseline_dims = parse_baseline_dims(str(baseline_text))
    return RunPlan(corpus, qubits, layers, method, hyperparams, settings, out_dir, baseline_dims)


def _resolve_model(plan: RunPlan, layers: int) -> ModelConfig:
    vocab = build_vocabulary(load_sentences(plan.corpus))
    qubits = plan.qubits if plan.qubits is not None else min_qubits(vocab.size)
    return ModelConfig(
        num_qubits=qubits,
        num_layers=layers,
        vocab_size=vocab.size,
        method=plan.method,
        hyperparams=plan.hyperparams,
    )


# -- artifacts ---------------------------------------------------------------------


def _manifest(plan: RunPlan, config: ModelConfig, command: str, extra: dict) -> dict:
    corpus = (
        {"path": plan.corpus.path}
        if plan.corpus.path
        else {"synthetic": dataclasses.asdict(plan.corpus.synthetic)}
    )
    return {
        "version": 1,
        "tool": f"qcse {__version__}",
        "command": command,
        "backend": backend.backend_name(),
        "corpus": corpus,
        "model": {
            "qubits": config.num_qubits,
            "layers": config.num_layers,
            "vocab_size": config.vocab_size,
            "method": config.method,
            "hyperparams": dataclasses.asdict(config.hyperparams),
        },
        "settings": dataclasses.asdict(plan.settings),
        **extra,
    }


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _write_run_artifacts(
    out_dir: Path, plan: RunPlan, result: ExperimentResult, command: str
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "loss.csv").write_text(records_to_csv(result.records))
    (out_dir / "accuracy.csv").write_text(
        "epoch,accuracy\n"
        + "".join(f"{r.epoch},{r.accuracy!r}\n" for r in result.records)
    )
    save_params(result.params, result.config, out_dir / "params.json")
    final = result.records[-1]
    _write_json(
        out_dir / "manifest.json",
        _manifest(
            plan,
            result.config,
            command,
            {
                "results": {
                    "num_pairs": result.num_pairs,
                    "num_train": result.num_train,
                    "num_test": result.num_test,
                    "trainable_params": result.params.count,
                    "final_loss": final.mean_loss,
                    "final_accuracy": final.accuracy,
                }
            },
        ),
    )


# -- sweep workers ------------------------------------------------------------------


def _worker_count(members: int) -> int:
    if os.environ.get("QCSE_DETERMINISTIC") == "1":
        return 1
    workers = min(members, os.cpu_count() or 1)
    cap = os.environ.get("QCSE_THREADS")
    if cap:
        workers = max(1, min(workers, int(cap)))
    return workers


def _run_member(payload: tuple[RunPlan, int, str, Path, str]) -> dict:
    plan, layers, method, out_dir, command = payload
    plan = dataclasses.replace(plan, method=method)
    config = _resolve_model(plan, layers)
    result = run_experiment(plan.corpus, config, plan.settings)
    _write_run_artifacts(out_dir, plan, result, command)
    final = result.records[-1]
    return {
        "layers": layers,
        "method": method,
        "qubits": config.num_qubits,
        "params": result.params.count,
        "final_accuracy": final.accuracy,
        "final_loss": final.mean_loss,
    }


def _run_members(payloads: list) -> list[dict]:
    workers = _worker_count(len(payloads))
    if workers <= 1:
        return [_run_member(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_member, payloads))


# -- subcommands ----------------------------------------------------------------------


def cmd_train(args: argparse.Namespace) -> int:
    plan = _merge_config(args)
    if len(plan.layers) != 1:
        raise ValueError("train takes a single --layers value; use depth-sweep for ranges")
    config = _resolve_model(plan, plan.layers[0])
    result = run_experiment(plan.corpus, config, plan.settings)
    _write_run_artifacts(plan.out_dir, plan, result, "train")
    final = result.records[-1]
    print(
        f"trained {config.num_layers} layers on {config.num_qubits} qubits "
        f"({result.params.count} params): loss {final.mean_loss:.4f}, "
        f"accuracy {final.accuracy:.4f} -> {plan.out_dir}"
    )
    return 0


_TABLE_HEADER = ("model", "layers", "qubits_or_dim", "params", "final_accuracy", "final_loss")


def _render_table(rows: list[tuple]) -> str:
    cells = [tuple(str(c) for c in row) for row in [_TABLE_HEADER, *rows]]
    widths = [max(len(r[i]) for r in cells) for i in range(len(_TABLE_HEADER))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells)


def cmd_depth_sweep(args: argparse.Namespace) -> int:
    plan = _merge_config(args)
    payloads = [
        (plan, layers, plan.method, plan.out_dir / f"layers-{layers}", "depth-sweep")
        for layers in plan.layers
    ]
    summaries = _run_members(payloads)

    rows = [
        (
            "qcse",
            s["layers"],
            s["qubits"],
            s["params"],
            f"{s['final_accuracy']:.4f}",
            f"{s['final_loss']:.4f}",
        )
        for s in summaries
    ]
    if plan.baseline_dims:
        sentences = load_sentences(plan.corpus)
        vocab = build_vocabulary(sentences)
        pairs = extract_pairs(sentences, vocab, plan.settings.window_radius)
    for dim in plan.baseline_dims:
        model, records = run_cbow_experiment(pairs, vocab.size, dim, plan.settings)
        rows.append(
            (
                "cbow",
                "-",
                dim,
                model.count,
                f"{records[-1].accuracy:.4f}",
                f"{records[-1].mean_loss:.4f}",
            )
        )

    plan.out_dir.mkdir(parents=True, exist_ok=True)
    csv_lines = [",".join(_TABLE_HEADER)] + [",".join(str(c) for c in row) for row in rows]
    (plan.out_dir / "table.csv").write_text("\n".join(csv_lines) + "\n")
    print(_render_table(rows))
    return 0


def cmd_method_sweep(args: argparse.Namespace) -> int:
    plan = _merge_config(args)
    if len(plan.layers) != 1:
        raise ValueError("method-sweep takes a single --layers value")
    payloads = [
        (plan, plan.layers[0], method, plan.out_dir / f"method-{method}", "method-sweep")
        for method in CONTEXT_METHODS
    ]
    summaries = _run_members(payloads)
    plan.out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["method,params,final_accuracy,final_loss"]
    lines += [
        f"{s['method']},{s['params']},{s['final_accuracy']!r},{s['final_loss']!r}"
        for s in summaries
    ]
    (plan.out_dir / "table.csv").write_text("\n".join(lines) + "\n")
    for s in summaries:
        print(
            f"{s['method']}: loss {s['final_loss']:.4f}, accuracy {s['final_accuracy']:.4f}"
        )
    return 0


def cmd_compare_baseline(args: argparse.Namespace) -> int:
    plan = _merge_config(args)
    if len(plan.layers) != 1:
        raise ValueError("compare-baseline takes a single --layers value")
    dims = plan.baseline_dims or [20]

    config = _resolve_model(plan, plan.layers[0])
    result = run_experiment(plan.corpus, config, plan.settings)
    _write_run_artifacts(plan.out_dir, plan, result, "compare-baseline")

    sentences = load_sentences(plan.corpus)
    vocab = build_vocabulary(sentences)
    pairs = extract_pairs(sentences, vocab, plan.settings.window_radius)
    cbow_runs: list[tuple[int, list[TrainRecord]]] = []
    for dim in dims:
        _, records = run_cbow_experiment(pairs, vocab.size, dim, plan.settings)
        cbow_runs.append((dim, records))

    header = ["epoch", "qcse_mean_loss", "qcse_accuracy"]
    for dim, _ in cbow_runs:
        header += [f"cbow{dim}_mean_loss", f"cbow{dim}_accuracy"]
    lines = [",".join(header)]
    for i, record in enumerate(result.records):
        row = [str(record.epoch), repr(record.mean_loss), repr(record.accuracy)]
        for _, records in cbow_runs:
            row += [repr(records[i].mean_loss), repr(records[i].accuracy)]
        lines.append(",".join(row))
    (plan.out_dir / "compare.csv").write_text("\n".join(lines) + "\n")

    final = result.records[-1]
    print(f"qcse: loss {final.mean_loss:.4f}, accuracy {final.accuracy:.4f}")
    for dim, records in cbow_runs:
        print(f"cbow d={dim}: loss {records[-1].mean_loss:.4f}, accuracy {records[-1].accuracy:.4f}")
    return 0


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    spec = parse_synthetic_spec(args.synthetic)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    sentences = load_sentences(CorpusConfig(synthetic=spec))
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(sentences, out)
    print(f"wrote {len(sentences)} sentences ({dataclasses.asdict(spec)}) -> {out}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "depth-sweep": cmd_depth_sweep,
    "method-sweep": cmd_method_sweep,
    "compare-baseline": cmd_compare_baseline,
    "gen-corpus": cmd_gen_corpus,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

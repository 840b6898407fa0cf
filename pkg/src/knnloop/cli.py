"""Command-line harness: batch simulation with oracle feedback, lambda
sweeps, corpus generation, snapshot inspection and the HTTP service.

Exit codes: 0 success, 1 usage error, 2 data/config error.
"""

from __future__ import annotations

import argparse
import json
import platform
import statistics
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .base_model import DEFAULT_DIM, DEFAULT_SMOOTHING, LexiconStubModel, load_lexicon
from .core import Vocabulary
from .errors import EngineError, InputError
from .metrics import (
    bleu_breakdown,
    corpus_bleu,
    lambda_bucket_report,
    merge_occurrence_recall,
    occurrence_recall,
    ter_noshift,
)
from .nn_index import kernel_name
from .session import PolicyMode, Session, SessionConfig
from .storage import load_corpus, load_snapshot, save_snapshot, snapshot_info, corpus_surfaces
from .synthetic import generate_repeat_term_corpus
from .token_knn import DEFAULT_K, DEFAULT_TEMPERATURE

REPORT_SCHEMA_VERSION = 1
MODES = ("adaptive", "constant", "base")


@dataclass
class SimulationConfig:
    """Everything one simulation run needs; mirrors the CLI flags."""

    corpus: Path
    lexicon: Path
    vocab: Path | None = None
    mode: str = "adaptive"
    lam: float = 0.2
    k: int = DEFAULT_K
    temperature: float = DEFAULT_TEMPERATURE
    policy_temperature: float = DEFAULT_TEMPERATURE
    fallback_lambda: float = 0.0
    seed: int = 0
    dim: int = DEFAULT_DIM
    smoothing: float = DEFAULT_SMOOTHING
    clear_between_documents: bool = False
    snapshot_in: Path | None = None
    snapshot_out: Path | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        if not 0.0 <= self.lam <= 1.0:
            raise InputError("lam must lie in [0, 1]")
        if self.k < 1:
            raise InputError("k must be >= 1")
        if self.temperature <= 0 or self.policy_temperature <= 0:
            raise InputError("temperatures must be positive")
        if not 0.0 <= self.fallback_lambda <= 1.0:
            raise InputError("fallback lambda must lie in [0, 1]")

    def policy_mode(self) -> PolicyMode:
        if self.mode == "adaptive":
            return PolicyMode.adaptive()
        if self.mode == "constant":
            return PolicyMode.constant(self.lam)
        return PolicyMode.base_only()

    def session_config(self) -> SessionConfig:
        return SessionConfig(
            k=self.k,
            temperature=self.temperature,
            policy_temperature=self.policy_temperature,
            fallback_lambda=self.fallback_lambda,
        )


def build_engine(config: SimulationConfig) -> tuple[LexiconStubModel, Session]:
    """Vocabulary, stub model and a fresh session for one simulation."""
    if config.vocab is not None:
        vocabulary = Vocabulary.from_file(config.vocab)
    else:
        vocabulary = Vocabulary()
    lexicon = load_lexicon(config.lexicon, vocabulary)
    if config.vocab is None:
        for word in corpus_surfaces(config.corpus):
            vocabulary.add(word)
    model = LexiconStubModel(
        vocabulary,
        lexicon,
        dim=config.dim,
        smoothing=config.smoothing,
        seed=config.seed,
    )
    session = Session(model, config.session_config(), config.policy_mode())
    if config.snapshot_in is not None:
        token = load_snapshot(
            Path(f"{config.snapshot_in}.token.knns"),
            expect_kind="token",
            expect_dim=model.dimension,
        )
        policy = load_snapshot(
            Path(f"{config.snapshot_in}.policy.knns"),
            expect_kind="policy",
            expect_dim=2 * config.k,
        )
        policy.fallback_lambda = config.fallback_lambda
        session.token_store = token
        session.policy_store = policy
    return model, session


def _latency_summary(latencies: list[float]) -> dict:
    if not latencies:
        return {"mean_ms": None, "median_ms": None}
    return {
        "mean_ms": statistics.fmean(latencies),
        "median_ms": statistics.median(latencies),
    }


def _recall_dict(report) -> dict:
    return {
        bucket.label: {
            "numerator": bucket.numerator,
            "denominator": bucket.denominator,
            "recall": bucket.recall,
        }
        for bucket in report.buckets
    }


def _lambda_dict(report) -> dict:
    return {
        "total": report.total,
        "buckets": [
            {
                "low": bucket.low,
                "high": bucket.high,
                "count": bucket.count,
                "mean_lambda": bucket.mean_lambda,
            }
            for bucket in report.buckets
        ],
    }


def simulate(config: SimulationConfig) -> dict:
    """Run the oracle-feedback protocol over a corpus and build the report."""
    model, session = build_engine(config)
    documents = load_corpus(config.corpus, model.vocabulary)

    doc_reports = []
    recall_reports = []
    all_hyps = []
    all_refs = []
    all_latencies: list[float] = []
    for position, document in enumerate(documents):
        if config.clear_between_documents and position > 0:
            session.clear_datastores()
        result = session.run_document(document.pairs)
        refs = [ref for _, ref in document.pairs]
        recall = occurrence_recall(result.hypotheses, refs)
        recall_reports.append(recall)
        all_hyps.extend(result.hypotheses)
        all_refs.extend(refs)
        all_latencies.extend(result.latencies_ms)
        doc_reports.append(
            {
                "id": document.id,
                "sentences": len(document.pairs),
                "bleu": corpus_bleu(result.hypotheses, refs),
                "ter_noshift": ter_noshift(result.hypotheses, refs),
                "occurrence_recall": _recall_dict(recall),
                "oov": dict(sorted(document.oov_counts.items())),
                "latency": _latency_summary(result.latencies_ms),
            }
        )

    aggregate_breakdown = bleu_breakdown(all_hyps, all_refs)
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": {
            "corpus": str(config.corpus),
            "lexicon": str(config.lexicon),
            "vocab": str(config.vocab) if config.vocab else None,
            "mode": config.mode,
            "lam": config.lam if config.mode == "constant" else None,
            "k": config.k,
            "temperature": config.temperature,
            "policy_temperature": config.policy_temperature,
            "fallback_lambda": config.fallback_lambda,
            "seed": config.seed,
            "dim": config.dim,
            "smoothing": config.smoothing,
            "clear_between_documents": config.clear_between_documents,
        },
        "documents": doc_reports,
        "aggregate": {
            "sentences": len(all_hyps),
            "bleu": aggregate_breakdown.score,
            "bleu_precisions": list(aggregate_breakdown.precisions),
            "brevity_penalty": aggregate_breakdown.brevity_penalty,
            "ter_noshift": ter_noshift(all_hyps, all_refs),
            "occurrence_recall": _recall_dict(merge_occurrence_recall(recall_reports)),
            "lambda_buckets": _lambda_dict(lambda_bucket_report(session.adaptation_log)),
            "latency": _latency_summary(all_latencies),
        },
        "datastore": {
            "token_entries": session.token_store.count,
            "policy_entries": session.policy_store.count,
        },
        "environment": {
            "python": platform.python_version(),
            "platform": platform.platform(),
            "kernel": kernel_name(),
        },
    }
    if config.snapshot_out is not None:
        save_snapshot(session.token_store, Path(f"{config.snapshot_out}.token.knns"))
        save_snapshot(session.policy_store, Path(f"{config.snapshot_out}.policy.knns"))
    return report


def sweep_lambda(config: SimulationConfig, lambdas: list[float]) -> list[tuple[float, float]]:
    """One constant-weight simulation per lambda over a shared corpus."""
    for lam in lambdas:
        if not 0.0 <= lam < 1.0:
            raise InputError(f"sweep lambda {lam!r} outside [0, 1)")
    points = []
    for lam in lambdas:
        run = SimulationConfig(
            corpus=config.corpus,
            lexicon=config.lexicon,
            vocab=config.vocab,
            mode="constant",
            lam=lam,
            k=config.k,
            temperature=config.temperature,
            policy_temperature=config.policy_temperature,
            fallback_lambda=config.fallback_lambda,
            seed=config.seed,
            dim=config.dim,
            smoothing=config.smoothing,
            clear_between_documents=config.clear_between_documents,
        )
        points.append((lam, simulate(run)["aggregate"]["bleu"]))
    return points


def _dump_report(report: dict, path: Path | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- argument parsing -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this harness reserves 2 for
    data errors, so remap usage errors to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", type=Path, required=True, help="TSV corpus: doc_id, source, reference")
    p.add_argument("--lexicon", type=Path, required=True, help="TSV lexicon: source, target, weight")
    p.add_argument("--vocab", type=Path, default=None, help="optional vocabulary file (one surface per line)")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--temperature", type=float, default=DEFAULT_TEMPERATURE)
    p.add_argument("--policy-temperature", type=float, default=DEFAULT_TEMPERATURE)
    p.add_argument("--fallback-lambda", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--smoothing", type=float, default=DEFAULT_SMOOTHING)
    p.add_argument("--clear-between-documents", action="store_true")
    p.add_argument("--report", type=Path, default=None, help="write the JSON report here instead of stdout")


def _config_from_args(args, mode=None, lam=None) -> SimulationConfig:
    return SimulationConfig(
        corpus=args.corpus,
        lexicon=args.lexicon,
        vocab=args.vocab,
        mode=mode if mode is not None else args.mode,
        lam=lam if lam is not None else getattr(args, "lam", 0.2),
        k=args.k,
        temperature=args.temperature,
        policy_temperature=args.policy_temperature,
        fallback_lambda=args.fallback_lambda,
        seed=args.seed,
        dim=args.dim,
        smoothing=args.smoothing,
        clear_between_documents=args.clear_between_documents,
        snapshot_in=getattr(args, "snapshot_in", None),
        snapshot_out=getattr(args, "snapshot_out", None),
    )


def _cmd_simulate(args) -> int:
    config = _config_from_args(args)
    report = simulate(config)
    _dump_report(report, args.report)
    if args.report is not None:
        agg = report["aggregate"]
        print(
            f"mode={config.mode} sentences={agg['sentences']} "
            f"bleu={agg['bleu']:.2f} ter_noshift={agg['ter_noshift']:.4f} "
            f"mean_latency_ms={agg['latency']['mean_ms']:.2f}"
        )
    return 0


def _cmd_sweep(args) -> int:
    try:
        lambdas = [float(v) for v in args.lambdas.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise InputError(f"bad --lambdas list: {exc}") from exc
    config = _config_from_args(args, mode="constant", lam=0.0)
    points = sweep_lambda(config, lambdas)
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "sweep": [{"lam": lam, "bleu": bleu} for lam, bleu in points],
    }
    _dump_report(report, args.report)
    return 0


def _cmd_gen_corpus(args) -> int:
    corpus = generate_repeat_term_corpus(
        seed=args.seed,
        rounds=args.rounds,
        noise_per_round=args.noise_per_round,
        documents=args.documents,
    )
    paths = corpus.write(args.out)
    print(
        f"wrote {len(corpus.corpus_rows)} sentence pairs, "
        f"{len(corpus.vocabulary_words)} vocabulary words"
    )
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_snapshot_info(args) -> int:
    infos = [snapshot_info(path) for path in args.paths]
    sys.stdout.write(json.dumps(infos, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_serve(args) -> int:
    from . import service  # deferred: pulls in fastapi/uvicorn

    return service.serve(
        lexicon=args.lexicon,
        vocab=args.vocab,
        dim=args.dim,
        smoothing=args.smoothing,
        seed=args.seed,
        host=args.host,
        port=args.port,
        cors_origin=args.cors_origin,
        ui_dir=args.ui_dir,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="knnloop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run the oracle-feedback simulation")
    _add_engine_flags(p)
    p.add_argument("--mode", choices=MODES, default="adaptive")
    p.add_argument("--lam", type=float, default=0.2, help="interpolation weight for constant mode")
    p.add_argument("--snapshot-in", type=Path, default=None, help="load datastores from PREFIX.{token,policy}.knns")
    p.add_argument("--snapshot-out", type=Path, default=None, help="save datastores to PREFIX.{token,policy}.knns")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep-lambda", help="constant-mode simulations over a lambda grid")
    _add_engine_flags(p)
    p.add_argument("--lambdas", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("gen-corpus", help="generate the synthetic repeat-term corpus")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=16)
    p.add_argument("--noise-per-round", type=int, default=2)
    p.add_argument("--documents", type=int, default=1)
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("snapshot", help="snapshot tools")
    snap_sub = p.add_subparsers(dest="snapshot_command", required=True, parser_class=_Parser)
    info = snap_sub.add_parser("info", help="print snapshot headers")
    info.add_argument("paths", nargs="+", type=Path)
    info.set_defaults(func=_cmd_snapshot_info)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--vocab", type=Path, default=None)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--smoothing", type=float, default=DEFAULT_SMOOTHING)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8711)
    p.add_argument("--cors-origin", default="*")
    p.add_argument("--ui-dir", type=Path, default=None, help="serve this directory at /ui")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (EngineError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

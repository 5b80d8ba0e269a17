"""Command-line pipeline: annotate, train, iterate, eval, inspect.

Every subcommand is a thin composition of library calls; configuration
comes from flags, falling back to an optional key=value config file
(--config), then to the SENSEFORGE_WORDNET environment variable for the
WordNet directory. Errors exit nonzero with a stable code prefix on
stderr: E_USAGE, E_IO, E_FORMAT, or E_CONFIG.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import annotate as annotate_mod
from . import evaluate as evaluate_mod
from .annotate import AnnotationStats, annotate_corpus, read_annotated
from .cbow import ConfigError, TrainConfig, train
from .evaluate import BENCHMARK_SCALES, BenchmarkParseError, EvalReport
from .metrics import CONTEXT_METRICS, METRIC_NAMES, build_sense_index
from .preprocess import load_stopwords
from .vectors import FormatError, SenseToken, VectorModel, cosine, load_model, save_model
from .wordnet import LoadError, ParseError, WordNetDb, load_wordnet

WORDNET_ENV = "SENSEFORGE_WORDNET"


class UsageError(Exception):
    pass


@dataclass(slots=True)
class PipelineConfig:
    """Resolved settings shared by the subcommands."""

    wordnet: str | None = None
    corpus: str | None = None
    model: str | None = None
    out: str | None = None
    stopwords: str | None = None
    algorithm: str = "mssa"
    workers: int = 1
    train: TrainConfig = TrainConfig()

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) in (None, ""):
                raise UsageError(f"--{name} is required for this command")


def _model_format(path: str) -> str:
    return "text" if path.endswith((".txt", ".text")) else "binary"


def _load_model_auto(path: str) -> VectorModel:
    if not os.path.isfile(path):
        raise LoadError(f"missing model file: {path}")
    return load_model(path, format=_model_format(path))


def _load_db(config: PipelineConfig) -> WordNetDb:
    config.require("wordnet")
    return load_wordnet(config.wordnet)


def _load_stopword_file(config: PipelineConfig):
    return load_stopwords(config.stopwords) if config.stopwords else None


def cmd_annotate(config: PipelineConfig) -> AnnotationStats:
    """Annotate a corpus file; prints and returns the per-POS stats."""
    config.require("corpus", "model", "out")
    db = _load_db(config)
    model = _load_model_auto(config.model)
    stats = annotate_corpus(
        config.corpus,
        config.algorithm,
        db,
        model,
        config.out,
        workers=config.workers,
        stopwords=_load_stopword_file(config),
    )
    print(stats.render_table())
    return stats


def cmd_train(config: PipelineConfig) -> str:
    """Train vectors on a (plain or annotated) corpus; returns the model path."""
    config.require("corpus", "out")
    model = train(config.corpus, config.train, workers=config.workers)
    save_model(model, config.out, format=_model_format(config.out))
    return config.out


def _change_fraction(path_a: str, path_b: str) -> float:
    total = changed = 0
    for doc_a, doc_b in zip(read_annotated(path_a), read_annotated(path_b)):
        for tok_a, tok_b in zip(doc_a.tokens, doc_b.tokens):
            total += 1
            changed += tok_a.key != tok_b.key
    return changed / total if total else 0.0


def cmd_iterate(config: PipelineConfig, n_passes: int = 1) -> list[dict]:
    """Annotate, then run N train+refine passes, reporting per-pass change.

    Writes <out>.ann0 (initial annotation), then <out>.modelK.bin and
    <out>.annK for each refinement pass K.
    """
    config.require("corpus", "model", "out")
    if n_passes < 1:
        raise UsageError("--passes must be >= 1")
    db = _load_db(config)
    word_model = _load_model_auto(config.model)
    stopwords = _load_stopword_file(config)
    records: list[dict] = []
    ann_path = f"{config.out}.ann0"
    stats = annotate_corpus(
        config.corpus,
        config.algorithm if config.algorithm != "mssa-nr" else "mssa",
        db,
        word_model,
        ann_path,
        workers=config.workers,
        stopwords=stopwords,
    )
    records.append(
        {"pass": 0, "annotation": ann_path, "distinct_synsets": stats.distinct_synsets}
    )
    for k in range(1, n_passes + 1):
        model_path = f"{config.out}.model{k}.bin"
        sense_model = train(ann_path, config.train, workers=config.workers)
        save_model(sense_model, model_path, format="binary")
        next_ann = f"{config.out}.ann{k}"
        stats = annotate_corpus(
            ann_path, "mssa-nr", db, sense_model, next_ann, workers=config.workers
        )
        fraction = _change_fraction(ann_path, next_ann)
        records.append(
            {
                "pass": k,
                "model": model_path,
                "annotation": next_ann,
                "distinct_synsets": stats.distinct_synsets,
                "changed_fraction": fraction,
            }
        )
        print(f"pass {k}: changed {fraction:.4%} of annotations")
        ann_path = next_ann
    return records


def _parse_benchmark_arg(spec: str) -> tuple[str, str]:
    kind, sep, path = spec.partition("=")
    if not sep or kind not in BENCHMARK_SCALES:
        raise UsageError(
            f"--benchmark must be kind=path with kind in "
            f"{sorted(BENCHMARK_SCALES)}; got {spec!r}"
        )
    return kind, path


def cmd_eval(
    config: PipelineConfig,
    benchmarks: list[tuple[str, str]],
    metrics: list[str] | None = None,
) -> list[EvalReport]:
    """Evaluate a sense model on benchmark files; returns all reports."""
    config.require("model")
    if not benchmarks:
        raise UsageError("at least one --benchmark kind=path is required")
    model = _load_model_auto(config.model)
    reports: list[EvalReport] = []
    for kind, path in benchmarks:
        if not os.path.isfile(path):
            raise LoadError(f"missing benchmark file: {path}")
        pairs = evaluate_mod.load_benchmark(path, kind)
        pairs = evaluate_mod.normalize_gold(pairs, BENCHMARK_SCALES[kind])
        if metrics is None:
            chosen = [
                m for m in METRIC_NAMES if kind == "scws" or m not in CONTEXT_METRICS
            ]
        else:
            chosen = metrics
        for metric in chosen:
            reports.append(evaluate_mod.evaluate(model, pairs, metric, benchmark=kind))
    print(evaluate_mod.render_reports(reports))
    if config.out:
        with open(config.out, "w", encoding="utf-8") as sink:
            for report in reports:
                sink.write(json.dumps(report.as_dict()) + "\n")
    return reports


def cmd_inspect(config: PipelineConfig, query: str) -> str:
    """Describe a word's senses, or one sense token plus model neighbors."""
    lines: list[str] = []
    if "#" in query:
        try:
            token = SenseToken.parse(query)
        except ValueError as exc:
            raise UsageError(str(exc))
        if config.wordnet or os.environ.get(WORDNET_ENV):
            db = _load_db(config)
            synset = db.synsets.get(token.key)
            if synset is None:
                lines.append(f"{query}: not in this WordNet")
            else:
                lines.append(f"{query}  lemmas: {', '.join(synset.lemmas)}")
                lines.append(f"  gloss: {synset.gloss}")
        if config.model:
            model = _load_model_auto(config.model)
            probe = model.get(query)
            if probe is None:
                lines.append(f"{query}: not in model")
            else:
                scored = []
                for other, vec in model.entries.items():
                    if other == query:
                        continue
                    sim = cosine(probe, vec)
                    if sim is not None:
                        scored.append((sim, other))
                scored.sort(key=lambda item: (-item[0], item[1]))
                lines.append("nearest neighbors:")
                for sim, other in scored[:10]:
                    lines.append(f"  {other}  {sim:.4f}")
        if not lines:
            raise UsageError("inspect needs --wordnet and/or --model")
    else:
        db = _load_db(config)
        senses = db.synsets_for(query.lower())
        if not senses:
            lines.append(f"{query}: no senses found")
        for synset in senses:
            token = SenseToken(query.lower(), synset.key)
            lines.append(f"{token.render()}  lemmas: {', '.join(synset.lemmas)}")
            lines.append(f"  gloss: {synset.gloss}")
    text = "\n".join(lines)
    print(text)
    return text


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep error format/exit codes uniform
        raise UsageError(message)


def _parse_config_file(path: str) -> dict[str, str]:
    if not os.path.isfile(path):
        raise LoadError(f"missing config file: {path}")
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            key, sep, value = body.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "wordnet": str,
    "corpus": str,
    "model": str,
    "out": str,
    "stopwords": str,
    "algorithm": str,
    "workers": int,
    "seed": int,
    "dim": int,
    "window": int,
    "min_count": int,
    "epochs": int,
}


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge flags over config-file values over environment/defaults."""
    from_file: dict[str, object] = {}
    if getattr(args, "config", None):
        for key, raw in _parse_config_file(args.config).items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key: {key!r}")
            try:
                from_file[key] = _CONFIG_KEYS[key](raw)
            except ValueError:
                raise ConfigError(f"bad value for config key {key!r}: {raw!r}")

    def pick(name: str, default):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return from_file.get(name, default)

    wordnet = pick("wordnet", None) or os.environ.get(WORDNET_ENV) or None
    train_config = TrainConfig(
        dim=pick("dim", 300),
        window=pick("window", 15),
        min_count=pick("min_count", 10),
        epochs=pick("epochs", 5),
        seed=pick("seed", 1),
    )
    return PipelineConfig(
        wordnet=wordnet,
        corpus=pick("corpus", None),
        model=pick("model", None),
        out=pick("out", None),
        stopwords=pick("stopwords", None),
        algorithm=pick("algorithm", "mssa"),
        workers=pick("workers", 1),
        train=train_config,
    )


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--wordnet", help=f"WordNet dir (or ${WORDNET_ENV})")
    parser.add_argument("--corpus", help="corpus file, one document per line")
    parser.add_argument("--model", help="input model file (.txt/.text = text format)")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--stopwords", help="stopword file overriding the bundled list")
    parser.add_argument(
        "--algorithm", choices=list(annotate_mod.ALGORITHMS), default=None
    )
    parser.add_argument("--dim", type=int, help="vector size (300 or 1000 typical)")
    parser.add_argument("--window", type=int, help="training context window")
    parser.add_argument("--min-count", dest="min_count", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--seed", type=int)


def _build_parser() -> _Parser:
    parser = _Parser(prog="senseforge", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("annotate", "sense-annotate a corpus"),
        ("train", "train CBOW vectors on a corpus"),
        ("iterate", "annotate then run N train+refine passes"),
        ("eval", "score a sense model on similarity benchmarks"),
        ("inspect", "show senses/glosses for a word or sense token"),
    ):
        sub = commands.add_parser(name, help=help_text)
        _add_common_flags(sub)
        if name == "iterate":
            sub.add_argument("--passes", type=int, default=1)
        if name == "eval":
            sub.add_argument(
                "--benchmark",
                action="append",
                default=[],
                metavar="KIND=PATH",
                help="repeatable; KIND in " + ",".join(sorted(BENCHMARK_SCALES)),
            )
            sub.add_argument(
                "--metrics",
                help="comma-separated subset of " + ",".join(METRIC_NAMES),
            )
        if name == "inspect":
            sub.add_argument("query", help="a word or a word#offset#pos token")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = build_config(args)
        if args.command == "annotate":
            cmd_annotate(config)
        elif args.command == "train":
            cmd_train(config)
        elif args.command == "iterate":
            cmd_iterate(config, n_passes=args.passes)
        elif args.command == "eval":
            benchmarks = [_parse_benchmark_arg(spec) for spec in args.benchmark]
            metrics = None
            if args.metrics:
                metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
                unknown = [m for m in metrics if m not in METRIC_NAMES]
                if unknown:
                    raise UsageError(f"unknown metrics: {', '.join(unknown)}")
            cmd_eval(config, benchmarks, metrics)
        elif args.command == "inspect":
            cmd_inspect(config, args.query)
        return 0
    except UsageError as exc:
        print(f"senseforge: [E_USAGE] {exc}", file=sys.stderr)
    except (ParseError, FormatError, BenchmarkParseError) as exc:
        print(f"senseforge: [E_FORMAT] {exc}", file=sys.stderr)
    except ConfigError as exc:
        print(f"senseforge: [E_CONFIG] {exc}", file=sys.stderr)
    except (LoadError, OSError) as exc:
        print(f"senseforge: [E_IO] {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"senseforge: [E_USAGE] {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())

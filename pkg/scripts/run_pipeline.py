#!/usr/bin/env python3
"""Run the full pipeline end to end on a small gloss-sampled corpus.

Steps: extract the vendored WordNet, generate a corpus, train a word
model, annotate with the chosen algorithm, run one refinement pass, and
(optionally) evaluate the refined sense model on a benchmark file.

Usage:
    python3 scripts/run_pipeline.py --workdir /tmp/demo \
        [--corpus-bytes 2000000] [--algorithm mssa] \
        [--benchmark rg65=path/to/rg65.csv]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))
sys.path.insert(0, str(REPO_ROOT / "scripts"))

from fetch_wordnet import extract_wordnet  # noqa: E402
from make_corpus import build_corpus  # noqa: E402

from senseforge.cbow import TrainConfig, train  # noqa: E402
from senseforge.cli import PipelineConfig, cmd_eval, cmd_iterate  # noqa: E402
from senseforge.vectors import save_model  # noqa: E402
from senseforge.wordnet import load_wordnet  # noqa: E402


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--corpus-bytes", type=int, default=2_000_000)
    parser.add_argument("--algorithm", default="mssa", choices=("mssa", "mssa-d"))
    parser.add_argument("--passes", type=int, default=1)
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument(
        "--benchmark", action="append", default=[],
        help="kind=path, e.g. rg65=data/rg65.csv (repeatable)",
    )
    args = parser.parse_args(argv)

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    wn_dir = extract_wordnet(work / "wordnet")
    db = load_wordnet(wn_dir)
    print(f"[{time.monotonic() - t0:6.1f}s] wordnet loaded: {len(db.synsets)} synsets")

    corpus = work / "corpus.txt"
    docs = build_corpus(db, corpus, target_bytes=args.corpus_bytes, seed=args.seed)
    print(f"[{time.monotonic() - t0:6.1f}s] corpus: {docs} documents")

    word_cfg = TrainConfig(
        dim=64, window=8, min_count=5, epochs=2, seed=args.seed
    )
    word_model_path = work / "words.bin"
    save_model(train(corpus, word_cfg), word_model_path, format="binary")
    print(f"[{time.monotonic() - t0:6.1f}s] word model trained")

    sense_cfg = TrainConfig(
        dim=args.dim, window=8, min_count=5, epochs=2, seed=args.seed
    )
    config = PipelineConfig(
        wordnet=str(wn_dir),
        corpus=str(corpus),
        model=str(word_model_path),
        out=str(work / "pipeline"),
        algorithm=args.algorithm,
        train=sense_cfg,
    )
    records = cmd_iterate(config, n_passes=args.passes)
    for record in records:
        print(f"[{time.monotonic() - t0:6.1f}s] {record}")

    if args.benchmark:
        from senseforge.cli import _parse_benchmark_arg

        benchmarks = [_parse_benchmark_arg(spec) for spec in args.benchmark]
        final_model = records[-1]["model"]
        eval_config = PipelineConfig(
            model=final_model, out=str(work / "reports.jsonl")
        )
        cmd_eval(eval_config, benchmarks)
        print(f"[{time.monotonic() - t0:6.1f}s] reports in {eval_config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

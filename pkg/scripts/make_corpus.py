#!/usr/bin/env python3
"""Generate a plain-text corpus by sampling WordNet glosses.

Produces one pseudo-document per line, each the concatenation of a few
randomly chosen synset glosses. The output is ordinary English prose
drawn from the lexicon itself, so every pipeline stage (cleaning,
annotation, training, evaluation) has realistic input without shipping
a third-party text dump. Generation is fully seeded.

Usage:
    python3 scripts/make_corpus.py --wordnet DIR --out corpus.txt \
        [--bytes 5000000] [--seed 13] [--glosses-per-doc 4]
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from senseforge.wordnet import WordNetDb, load_wordnet  # noqa: E402


def build_corpus(
    db: WordNetDb,
    out_path: str | Path,
    target_bytes: int = 5_000_000,
    seed: int = 13,
    glosses_per_doc: int = 4,
) -> int:
    """Write gloss-sampled documents until the file reaches target_bytes.

    Returns the number of documents written.
    """
    glosses = [s.gloss for s in db.synsets.values() if s.gloss]
    glosses.sort()  # iteration order of synsets is load order; fix it
    rng = random.Random(seed)
    written = 0
    docs = 0
    with open(out_path, "w", encoding="utf-8") as sink:
        while written < target_bytes:
            parts = [glosses[rng.randrange(len(glosses))] for _ in range(glosses_per_doc)]
            line = " ".join(parts) + "\n"
            sink.write(line)
            written += len(line.encode("utf-8"))
            docs += 1
    return docs


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--wordnet", required=True, help="WordNet database directory")
    parser.add_argument("--out", required=True, help="output corpus file")
    parser.add_argument("--bytes", type=int, default=5_000_000)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--glosses-per-doc", type=int, default=4)
    args = parser.parse_args(argv)
    db = load_wordnet(args.wordnet)
    docs = build_corpus(
        db, args.out, target_bytes=args.bytes, seed=args.seed,
        glosses_per_doc=args.glosses_per_doc,
    )
    size = Path(args.out).stat().st_size
    print(f"wrote {docs} documents ({size} bytes) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Unpack the vendored WordNet 3.0 database into a working directory.

The repository ships the Princeton WNdb-3.0 tarball plus the four
morphology exception files under data/wordnet/. This script extracts
the dict/ payload (data.*, index.*, index.sense) into the target
directory and copies the exception files alongside, producing the flat
layout senseforge.wordnet.load_wordnet expects.

Usage:
    python3 scripts/fetch_wordnet.py [--dest DIR]
"""

from __future__ import annotations

import argparse
import shutil
import sys
import tarfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
VENDOR_DIR = REPO_ROOT / "data" / "wordnet"
TARBALL = VENDOR_DIR / "WNdb-3.0.tar.gz"


def extract_wordnet(dest: Path) -> Path:
    """Extract the vendored database into dest; returns dest."""
    if not TARBALL.is_file():
        raise FileNotFoundError(f"vendored tarball not found: {TARBALL}")
    wanted = {
        f"{kind}.{suffix}"
        for kind in ("data", "index")
        for suffix in ("noun", "verb", "adj", "adv")
    }
    dest.mkdir(parents=True, exist_ok=True)
    with tarfile.open(TARBALL, "r:gz") as tar:
        for member in tar.getmembers():
            if not member.isfile():
                continue
            # Flatten dict/<name> -> <name>; skip anything unexpected.
            name = Path(member.name).name
            if name not in wanted:
                continue
            source = tar.extractfile(member)
            assert source is not None
            with open(dest / name, "wb") as sink:
                shutil.copyfileobj(source, sink)
    for exc in sorted(VENDOR_DIR.glob("*.exc")):
        shutil.copy(exc, dest / exc.name)
    return dest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dest",
        default=str(REPO_ROOT / "data" / "wordnet" / "dict"),
        help="directory to extract into (default: data/wordnet/dict)",
    )
    args = parser.parse_args(argv)
    dest = extract_wordnet(Path(args.dest))
    names = sorted(p.name for p in dest.iterdir())
    print(f"extracted {len(names)} files into {dest}")
    for name in names:
        print(f"  {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

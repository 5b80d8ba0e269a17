"""Deterministic corpus cleaning.

One tokenizer governs the whole system: the same cleaning is applied to
corpus documents, WordNet glosses, and benchmark context sentences.
Documents are one line of the corpus file; context windows never cross
document boundaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .wordnet import WordNetDb

_TAG_RE = re.compile(r"<[^>]*>")
_NON_TOKEN_RE = re.compile(r"[^a-z0-9\s]+")
_DIGIT_RE = re.compile(r"[0-9]")


@dataclass(slots=True)
class CleanDocument:
    """A cleaned document: lowercase [a-z]+ tokens plus an identifier."""

    tokens: list[str] = field(default_factory=list)
    doc_id: str = ""


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled common-English function-word list (179 entries)."""
    text = resources.files(__package__).joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(_parse_stopword_lines(text.splitlines()))


def load_stopwords(path: str) -> frozenset[str]:
    """Read a stopword file: one token per line, `#` comments allowed."""
    with open(path, encoding="utf-8") as handle:
        return frozenset(_parse_stopword_lines(handle))


def _parse_stopword_lines(lines) -> list[str]:
    words = []
    for line in lines:
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.append(word)
    return words


def clean_tokenize(raw: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Clean raw text into lowercase word tokens.

    Lowercases, strips HTML tags, splits punctuation away, drops any
    token containing a digit, and removes stopwords. Every surviving
    token matches [a-z]+.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    text = _TAG_RE.sub(" ", raw.lower())
    text = _NON_TOKEN_RE.sub(" ", text)
    return [
        token
        for token in text.split()
        if token not in stopwords and not _DIGIT_RE.search(token)
    ]


def filter_to_lexicon(
    tokens: list[str], db: WordNetDb, doc_id: str = ""
) -> CleanDocument:
    """Keep only tokens that resolve to at least one synset; order preserved."""
    kept = [token for token in tokens if db.synsets_for(token)]
    return CleanDocument(tokens=kept, doc_id=doc_id)

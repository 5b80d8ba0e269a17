"""WordNet 3.0 database parser and lemma lookup.

Reads the standard database layout (data.{noun,verb,adj,adv},
index.{noun,verb,adj,adv}, {noun,verb,adj,adv}.exc) into an immutable
in-memory lexicon. Lookup goes through morphological normalization
(exception lists plus suffix detachment) so inflected surface forms
resolve to their lemmas.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

# Synset POS tags as stored in the data files. Satellite adjectives ('s')
# live in data.adj but keep their own tag.
POS_TAGS = ("n", "v", "a", "s", "r")

# POS tags that have their own index/data/exception files.
INDEX_POS = ("n", "v", "a", "r")

_FILE_SUFFIX = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}

# Suffix detachment rules (old ending, replacement), per index POS.
_DETACHMENT_RULES = {
    "n": [
        ("s", ""), ("ses", "s"), ("ves", "f"), ("xes", "x"), ("zes", "z"),
        ("ches", "ch"), ("shes", "sh"), ("men", "man"), ("ies", "y"),
    ],
    "v": [
        ("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"),
        ("ed", ""), ("ing", "e"), ("ing", ""),
    ],
    "a": [("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
    "r": [],
}


class LoadError(Exception):
    """A required database file is missing or unreadable."""


class ParseError(Exception):
    """A database line does not match the expected record layout."""

    def __init__(self, path: str, lineno: int, reason: str):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno


class SynsetKey(NamedTuple):
    """Unique synset identifier: data-file byte offset plus POS tag."""

    offset: int
    pos: str

    def render(self) -> str:
        return f"{self.offset:08d}{self.pos}"


@dataclass(frozen=True, slots=True)
class Synset:
    key: SynsetKey
    lemmas: tuple[str, ...]
    gloss: str


@dataclass(slots=True)
class WordNetDb:
    """Parsed database: synsets by key, (lemma, pos) index, exception lists.

    Index sense order is preserved exactly as stored in the index files
    (most frequent sense first); it defines the first-sense fallback used
    by the annotators.
    """

    synsets: dict[SynsetKey, Synset] = field(default_factory=dict)
    index: dict[tuple[str, str], tuple[SynsetKey, ...]] = field(default_factory=dict)
    exceptions: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)

    def morphy(self, surface: str, pos: str) -> list[str]:
        """Candidate lemmas for a surface form under one POS.

        Returns exception-list matches, then suffix-detachment results,
        then the surface itself, deduplicated and restricted to lemmas
        actually present in the index. Empty when nothing resolves.
        """
        ipos = _index_pos(pos)
        candidates = list(self.exceptions.get((surface, ipos), ()))
        candidates.extend(self._detach(surface, ipos))
        candidates.append(surface)
        out: list[str] = []
        seen: set[str] = set()
        for lemma in candidates:
            if lemma not in seen and (lemma, ipos) in self.index:
                seen.add(lemma)
                out.append(lemma)
        return out

    def _detach(self, surface: str, ipos: str) -> list[str]:
        # Apply the suffix rules repeatedly; the first round that produces
        # any indexed lemma wins. Order within a round follows rule order.
        rules = _DETACHMENT_RULES[ipos]
        forms = [surface]
        while forms:
            forms = [
                form[: -len(old)] + new
                for form in forms
                for old, new in rules
                if form.endswith(old)
            ]
            hits = [form for form in forms if (form, ipos) in self.index]
            if hits:
                return hits
        return []

    def synsets_for(
        self,
        surface: str,
        pos_filter: Iterable[str] | None = None,
        normalize: bool = True,
    ) -> list[Synset]:
        """All synsets a surface form can denote, in index (frequency) order.

        POS blocks come in the order n, v, a, r; satellite synsets appear
        inside the adjective block. `pos_filter` restricts results by the
        synset's own POS tag; `normalize` turns morphology on or off.
        """
        word = surface.lower()
        wanted = set(pos_filter) if pos_filter is not None else None
        out: list[Synset] = []
        seen: set[SynsetKey] = set()
        for ipos in INDEX_POS:
            if wanted is not None and not (
                ipos in wanted or (ipos == "a" and "s" in wanted)
            ):
                continue
            if normalize:
                lemmas = self.morphy(word, ipos)
            else:
                lemmas = [word] if (word, ipos) in self.index else []
            for lemma in lemmas:
                for key in self.index.get((lemma, ipos), ()):
                    if key in seen:
                        continue
                    if wanted is not None and key.pos not in wanted:
                        continue
                    seen.add(key)
                    out.append(self.synsets[key])
        return out

    def first_sense(self, surface: str, normalize: bool = True) -> Synset | None:
        """Most frequent sense across all POS, or None for unknown words."""
        found = self.synsets_for(surface, normalize=normalize)
        return found[0] if found else None


def _index_pos(pos: str) -> str:
    if pos not in POS_TAGS:
        raise ValueError(f"unknown POS tag: {pos!r}")
    return "a" if pos == "s" else pos


def _strip_marker(word: str) -> str:
    # Adjective lemmas may carry a syntactic-position marker, e.g. "galore(ip)".
    if word.endswith(")"):
        cut = word.rfind("(")
        if cut > 0:
            return word[:cut]
    return word


def _parse_data_file(path: str, synsets: dict[SynsetKey, Synset]) -> dict[int, str]:
    """Parse one data file; returns offset-to-POS map for index resolution."""
    pos_of_offset: dict[int, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.startswith(" "):  # license header block
                continue
            body, sep, gloss = line.partition("|")
            if not sep:
                raise ParseError(path, lineno, "missing '|' gloss delimiter")
            fields = body.split()
            try:
                offset = int(fields[0])
                ss_type = fields[2]
                w_cnt = int(fields[3], 16)
                raw_words = fields[4 : 4 + 2 * w_cnt : 2]
            except (IndexError, ValueError) as exc:
                raise ParseError(path, lineno, f"bad synset record: {exc}") from exc
            if ss_type not in POS_TAGS or not raw_words:
                raise ParseError(path, lineno, f"bad synset record: {body[:40]!r}")
            key = SynsetKey(offset, ss_type)
            lemmas = tuple(_strip_marker(word).lower() for word in raw_words)
            synsets[key] = Synset(key=key, lemmas=lemmas, gloss=gloss.strip())
            pos_of_offset[offset] = ss_type
    return pos_of_offset


def _parse_index_file(
    path: str,
    ipos: str,
    pos_of_offset: dict[int, str],
    index: dict[tuple[str, str], tuple[SynsetKey, ...]],
) -> None:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.startswith(" "):
                continue
            fields = line.split()
            try:
                lemma = fields[0]
                synset_cnt = int(fields[2])
                offsets = [int(raw) for raw in fields[-synset_cnt:]]
            except (IndexError, ValueError) as exc:
                raise ParseError(path, lineno, f"bad index record: {exc}") from exc
            if synset_cnt <= 0 or len(offsets) != synset_cnt:
                raise ParseError(path, lineno, "synset count mismatch")
            try:
                keys = tuple(SynsetKey(off, pos_of_offset[off]) for off in offsets)
            except KeyError as exc:
                raise ParseError(path, lineno, f"dangling offset {exc}") from exc
            index[(lemma, ipos)] = keys


def _parse_exception_file(
    path: str, ipos: str, exceptions: dict[tuple[str, str], tuple[str, ...]]
) -> None:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) < 2:
                raise ParseError(path, lineno, "expected surface plus lemmas")
            exceptions[(fields[0], ipos)] = tuple(fields[1:])


def load_wordnet(directory: str | os.PathLike) -> WordNetDb:
    """Load a WordNet 3.0 database directory.

    The directory must hold data.*, index.* and *.exc for all four of
    noun/verb/adj/adv. Raises LoadError when a file is missing and
    ParseError (with file and line) when a record is malformed.
    """
    directory = os.fspath(directory)
    db = WordNetDb()
    pos_maps: dict[str, dict[int, str]] = {}
    for ipos in INDEX_POS:
        path = os.path.join(directory, f"data.{_FILE_SUFFIX[ipos]}")
        if not os.path.isfile(path):
            raise LoadError(f"missing WordNet file: {path}")
        pos_maps[ipos] = _parse_data_file(path, db.synsets)
    for ipos in INDEX_POS:
        path = os.path.join(directory, f"index.{_FILE_SUFFIX[ipos]}")
        if not os.path.isfile(path):
            raise LoadError(f"missing WordNet file: {path}")
        _parse_index_file(path, ipos, pos_maps[ipos], db.index)
    for ipos in INDEX_POS:
        path = os.path.join(directory, f"{_FILE_SUFFIX[ipos]}.exc")
        if not os.path.isfile(path):
            raise LoadError(f"missing WordNet file: {path}")
        _parse_exception_file(path, ipos, db.exceptions)
    return db


def average_polysemy(db: WordNetDb, include_monosemous: bool = False) -> float:
    """Mean senses per indexed word, macro-averaged over the four index POS.

    By convention this figure is quoted over polysemous words only;
    include_monosemous=True averages over every index entry instead.
    """
    per_pos: dict[str, list[int]] = {ipos: [] for ipos in INDEX_POS}
    for (_, ipos), keys in db.index.items():
        if include_monosemous or len(keys) > 1:
            per_pos[ipos].append(len(keys))
    means = [sum(counts) / len(counts) for counts in per_pos.values() if counts]
    if not means:
        raise ValueError("empty index")
    return sum(means) / len(means)

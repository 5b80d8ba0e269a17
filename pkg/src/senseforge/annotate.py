"""Sense annotation: turn cleaned documents into sense-token sequences.

Three algorithms share one sliding-window rule set:

* mssa: each word's candidate senses are represented by the mean vector
  of their gloss tokens; the sense agreeing best (max cosine) with a
  neighbor's candidate wins.
* mssa-nr: identical control flow, but candidate vectors come straight
  from a previously trained sense model, skipping gloss averaging.
* mssa-d: global instead of local; picks the sense sequence minimizing
  total cosine distance (1 - cosine) across the whole document, found by
  dynamic programming over the layered candidate graph.

Ties are resolved deterministically: the former (left) side beats the
latter side at equal scores, and lower (offset, pos) wins within a side.
Candidates whose vector is absent are excluded from comparisons; a word
left without any comparable pair falls back to its most frequent sense
(mssa-nr first consults the previous pass's annotation).
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .preprocess import CleanDocument, clean_tokenize, default_stopwords
from .vectors import (
    FormatError,
    SenseToken,
    VectorModel,
    cosine_given_norms,
    mean_vectors,
    vector_norm,
)
from .wordnet import Synset, SynsetKey, WordNetDb

# A usable candidate: sense key, float64 vector, precomputed norm.
Candidate = tuple[SynsetKey, np.ndarray, float]

ALGORITHMS = ("mssa", "mssa-d", "mssa-nr")


@dataclass(slots=True)
class AnnotatedDocument:
    tokens: list[SenseToken] = field(default_factory=list)
    doc_id: str = ""


def gloss_average_vector(
    synset: Synset, tm: VectorModel, stopwords: frozenset[str] | None = None
) -> np.ndarray | None:
    """Mean vector of the gloss tokens found in the model; None if none are."""
    vecs = [tm.entries[tok] for tok in clean_tokenize(synset.gloss, stopwords) if tok in tm.entries]
    return mean_vectors(vecs) if vecs else None


class GlossVectorCache:
    """Memoized gloss-average vectors and per-word candidate lists.

    Content is a pure function of (db, tm, stopword list), so one cache
    can be shared read-only by any number of annotation workers.
    """

    def __init__(
        self,
        db: WordNetDb,
        tm: VectorModel,
        stopwords: frozenset[str] | None = None,
    ):
        self.db = db
        self.tm = tm
        self.stopwords = default_stopwords() if stopwords is None else frozenset(stopwords)
        self._vectors: dict[SynsetKey, tuple[np.ndarray, float] | None] = {}
        self._senses: dict[str, list[SynsetKey]] = {}
        self._candidates: dict[str, list[Candidate]] = {}

    def vector(self, key: SynsetKey) -> tuple[np.ndarray, float] | None:
        """Gloss-average vector and norm for one synset, or None if absent."""
        try:
            return self._vectors[key]
        except KeyError:
            pass
        vec = gloss_average_vector(self.db.synsets[key], self.tm, self.stopwords)
        entry = None if vec is None else (vec, vector_norm(vec))
        self._vectors[key] = entry
        return entry

    def senses(self, word: str) -> list[SynsetKey]:
        """Sense keys of a word in frequency order (first = most frequent)."""
        try:
            return self._senses[word]
        except KeyError:
            keys = [s.key for s in self.db.synsets_for(word)]
            self._senses[word] = keys
            return keys

    def candidates(self, word: str) -> list[Candidate]:
        """Senses of a word with usable vectors, sorted by (offset, pos)."""
        try:
            return self._candidates[word]
        except KeyError:
            pass
        cands: list[Candidate] = []
        for key in self.senses(word):
            entry = self.vector(key)
            if entry is not None:
                cands.append((key, entry[0], entry[1]))
        cands.sort(key=lambda c: c[0])
        self._candidates[word] = cands
        return cands


class SenseModelCandidates:
    """Candidate lists for mssa-nr: vectors looked up in a sense model.

    A sense with no vector in the model is dropped from consideration.
    """

    def __init__(self, db: WordNetDb, tsm: VectorModel):
        self.db = db
        self.tsm = tsm
        self._senses: dict[str, list[SynsetKey]] = {}
        self._candidates: dict[str, list[Candidate]] = {}

    def senses(self, word: str) -> list[SynsetKey]:
        try:
            return self._senses[word]
        except KeyError:
            keys = [s.key for s in self.db.synsets_for(word)]
            self._senses[word] = keys
            return keys

    def candidates(self, word: str) -> list[Candidate]:
        try:
            return self._candidates[word]
        except KeyError:
            pass
        cands: list[Candidate] = []
        for key in self.senses(word):
            vec = self.tsm.entries.get(SenseToken(word, key).render())
            if vec is not None:
                v64 = np.asarray(vec, dtype=np.float64)
                cands.append((key, v64, vector_norm(v64)))
        cands.sort(key=lambda c: c[0])
        self._candidates[word] = cands
        return cands


def _side_best(
    cur: list[Candidate], side: list[Candidate]
) -> tuple[float | None, SynsetKey | None]:
    """Best (score, current-sense) over all current x side pairs.

    Candidates are iterated in key order, and only strict improvements
    replace the incumbent, so equal scores keep the lowest key.
    """
    best: float | None = None
    best_key: SynsetKey | None = None
    for ckey, cvec, cnorm in cur:
        for _, nvec, nnorm in side:
            score = cosine_given_norms(cvec, cnorm, nvec, nnorm)
            if score is None:
                continue
            if best is None or score > best:
                best, best_key = score, ckey
    return best, best_key


def _annotate_window(
    doc: CleanDocument,
    senses_of: Callable[[str], list[SynsetKey]],
    candidates_of: Callable[[str], list[Candidate]],
    prev: AnnotatedDocument | None = None,
) -> AnnotatedDocument:
    """Shared +-1 window pass used by mssa and mssa-nr."""
    words = doc.tokens
    n = len(words)
    out: list[SenseToken] = []
    prev_at = 0
    for i, word in enumerate(words):
        sense_keys = senses_of(word)
        if not sense_keys:
            continue  # not in the lexicon: nothing to annotate
        prev_key: SynsetKey | None = None
        if prev is not None and prev_at < len(prev.tokens):
            prev_token = prev.tokens[prev_at]
            prev_at += 1
            if prev_token.word == word:
                prev_key = prev_token.key
        if len(sense_keys) == 1:
            out.append(SenseToken(word, sense_keys[0]))
            continue
        cur = candidates_of(word)
        former = candidates_of(words[i - 1]) if i > 0 else []
        latter = candidates_of(words[i + 1]) if i + 1 < n else []
        best: float | None = None
        chosen: SynsetKey | None = None
        for side in (former, latter):  # former first: it wins score ties
            score, key = _side_best(cur, side)
            if score is not None and (best is None or score > best):
                best, chosen = score, key
        if chosen is None:
            chosen = prev_key if prev_key is not None else sense_keys[0]
        out.append(SenseToken(word, chosen))
    return AnnotatedDocument(tokens=out, doc_id=doc.doc_id)


def _annotate_path(
    doc: CleanDocument,
    senses_of: Callable[[str], list[SynsetKey]],
    candidates_of: Callable[[str], list[Candidate]],
) -> AnnotatedDocument:
    """Minimum-total-distance sense path over the layered candidate graph.

    Layer i holds the usable candidates of word i; consecutive layers are
    fully connected with weight 1 - cosine; virtual zero-weight source and
    sink make the path well defined. Words contributing no layer (or a
    document with fewer than two layers) fall back to the first sense.
    """
    words = doc.tokens
    layers: list[tuple[int, list[Candidate]]] = []
    for i, word in enumerate(words):
        cands = candidates_of(word)
        if cands:
            layers.append((i, cands))
    chosen: dict[int, SynsetKey] = {}
    if len(layers) >= 2:
        costs = [0.0] * len(layers[0][1])
        backs: list[list[int]] = []
        for li in range(1, len(layers)):
            prev_cands = layers[li - 1][1]
            cur_cands = layers[li][1]
            new_costs: list[float] = []
            back: list[int] = []
            for _, cvec, cnorm in cur_cands:
                best = math.inf
                best_j = 0
                for j, (_, pvec, pnorm) in enumerate(prev_cands):
                    sim = cosine_given_norms(pvec, pnorm, cvec, cnorm)
                    weight = math.inf if sim is None else 1.0 - sim
                    total = costs[j] + weight
                    if total < best:
                        best, best_j = total, j
                new_costs.append(best)
                back.append(best_j)
            costs = new_costs
            backs.append(back)
        end = min(range(len(costs)), key=lambda j: (costs[j], j))
        trail = [end]
        for back in reversed(backs):
            trail.append(back[trail[-1]])
        trail.reverse()
        for (i, cands), pick in zip(layers, trail):
            chosen[i] = cands[pick][0]
    out: list[SenseToken] = []
    for i, word in enumerate(words):
        sense_keys = senses_of(word)
        if not sense_keys:
            continue
        key = chosen.get(i, sense_keys[0])
        out.append(SenseToken(word, key))
    return AnnotatedDocument(tokens=out, doc_id=doc.doc_id)


def mssa_annotate(
    doc: CleanDocument,
    db: WordNetDb,
    tm: VectorModel,
    stopwords: frozenset[str] | None = None,
    cache: GlossVectorCache | None = None,
) -> AnnotatedDocument:
    """Annotate one document by local window agreement over gloss vectors."""
    if cache is None:
        cache = GlossVectorCache(db, tm, stopwords)
    return _annotate_window(doc, cache.senses, cache.candidates)


def mssa_nr_annotate(
    doc: CleanDocument,
    db: WordNetDb,
    tsm: VectorModel,
    prev: AnnotatedDocument | None = None,
    lookup: SenseModelCandidates | None = None,
) -> AnnotatedDocument:
    """Refine an annotation using trained sense vectors as candidates.

    A word whose every sense lacks a vector keeps its annotation from
    `prev` when given, falling back to the first sense otherwise.
    """
    if lookup is None:
        lookup = SenseModelCandidates(db, tsm)
    return _annotate_window(doc, lookup.senses, lookup.candidates, prev=prev)


def mssa_d_annotate(
    doc: CleanDocument,
    db: WordNetDb,
    tm: VectorModel,
    stopwords: frozenset[str] | None = None,
    cache: GlossVectorCache | None = None,
) -> AnnotatedDocument:
    """Annotate one document by the minimum-total-cosine-distance path."""
    if cache is None:
        cache = GlossVectorCache(db, tm, stopwords)
    return _annotate_path(doc, cache.senses, cache.candidates)


@dataclass(slots=True)
class AnnotationStats:
    """Corpus annotation summary: per-POS token and distinct-sense counts."""

    documents: int = 0
    tokens_seen: int = 0
    tokens_annotated: int = 0
    tokens_unresolved: int = 0
    pos_tokens: dict[str, int] = field(default_factory=dict)
    pos_distinct_synsets: dict[str, int] = field(default_factory=dict)
    distinct_synsets: int = 0

    def as_dict(self) -> dict:
        return {
            "documents": self.documents,
            "tokens_seen": self.tokens_seen,
            "tokens_annotated": self.tokens_annotated,
            "tokens_unresolved": self.tokens_unresolved,
            "pos_tokens": dict(self.pos_tokens),
            "pos_distinct_synsets": dict(self.pos_distinct_synsets),
            "distinct_synsets": self.distinct_synsets,
        }

    def render_table(self) -> str:
        rows = [
            ("Nouns", ("n",)),
            ("Verbs", ("v",)),
            ("Adverbs", ("r",)),
            ("Adjectives", ("a", "s")),
        ]
        lines = [f"{'POS':<12}{'Tokens':>12}{'Distinct synsets':>20}"]
        for label, tags in rows:
            tok = sum(self.pos_tokens.get(t, 0) for t in tags)
            syn = sum(self.pos_distinct_synsets.get(t, 0) for t in tags)
            lines.append(f"{label:<12}{tok:>12}{syn:>20}")
        lines.append(
            f"{'Total':<12}{self.tokens_annotated:>12}{self.distinct_synsets:>20}"
        )
        return "\n".join(lines)


def read_annotated(path: str | os.PathLike) -> Iterator[AnnotatedDocument]:
    """Read an annotated corpus file (one document of sense tokens per line)."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            tokens = []
            for raw in line.split():
                try:
                    tokens.append(SenseToken.parse(raw))
                except ValueError as exc:
                    raise FormatError(f"{path}:{lineno}: {exc}") from exc
            yield AnnotatedDocument(tokens=tokens, doc_id=str(lineno))


# Worker state for forked annotation pools: (annotate_one_line callable).
_POOL_TASK: Callable[[tuple[int, str]], tuple[str, dict, set]] | None = None


def _pool_run(item: tuple[int, str]) -> tuple[str, dict, set]:
    assert _POOL_TASK is not None
    return _POOL_TASK(item)


def _count(annotated: AnnotatedDocument) -> tuple[dict[str, int], set[SynsetKey]]:
    pos_tokens: dict[str, int] = {}
    keys: set[SynsetKey] = set()
    for token in annotated.tokens:
        pos_tokens[token.key.pos] = pos_tokens.get(token.key.pos, 0) + 1
        keys.add(token.key)
    return pos_tokens, keys


def annotate_corpus(
    corpus_path: str | os.PathLike,
    algorithm: str,
    db: WordNetDb,
    model: VectorModel,
    out_path: str | os.PathLike,
    workers: int = 1,
    stopwords: frozenset[str] | None = None,
) -> AnnotationStats:
    """Annotate a whole corpus file, one document per line.

    For mssa and mssa-d the corpus is raw text (cleaned here). For
    mssa-nr it must be a previously annotated corpus; its sense tokens
    provide both the word sequence and the previous-pass fallback, and
    `model` must be the sense model trained on it. Output order matches
    input order for any worker count.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm: {algorithm!r}")
    corpus_path = os.fspath(corpus_path)
    out_path = os.fspath(out_path)

    if algorithm == "mssa-nr":
        lookup = SenseModelCandidates(db, model)

        def run_line(item: tuple[int, str]) -> tuple[str, dict, set]:
            lineno, line = item
            tokens = []
            for raw in line.split():
                try:
                    tokens.append(SenseToken.parse(raw))
                except ValueError as exc:
                    raise FormatError(f"{corpus_path}:{lineno}: {exc}") from exc
            prev = AnnotatedDocument(tokens=tokens, doc_id=str(lineno))
            doc = CleanDocument([t.word for t in tokens], doc_id=str(lineno))
            annotated = mssa_nr_annotate(doc, db, model, prev=prev, lookup=lookup)
            counts, keys = _count(annotated)
            text = " ".join(t.render() for t in annotated.tokens)
            return text, {"seen": len(doc.tokens), "pos": counts}, keys

    else:
        cache = GlossVectorCache(db, model, stopwords)
        annotate_one = mssa_annotate if algorithm == "mssa" else mssa_d_annotate

        def run_line(item: tuple[int, str]) -> tuple[str, dict, set]:
            lineno, line = item
            doc = CleanDocument(clean_tokenize(line, cache.stopwords), str(lineno))
            annotated = annotate_one(doc, db, model, cache=cache)
            counts, keys = _count(annotated)
            text = " ".join(t.render() for t in annotated.tokens)
            return text, {"seen": len(doc.tokens), "pos": counts}, keys

    stats = AnnotationStats()
    all_keys: set[SynsetKey] = set()

    def consume(result: tuple[str, dict, set], sink) -> None:
        text, info, keys = result
        sink.write(text + "\n")
        stats.documents += 1
        stats.tokens_seen += info["seen"]
        for pos, count in info["pos"].items():
            stats.pos_tokens[pos] = stats.pos_tokens.get(pos, 0) + count
        all_keys.update(keys)

    with open(corpus_path, encoding="utf-8") as src, open(
        out_path, "w", encoding="utf-8"
    ) as sink:
        items = enumerate(src, start=1)
        if workers > 1 and "fork" in multiprocessing.get_all_start_methods():
            global _POOL_TASK
            _POOL_TASK = run_line
            try:
                ctx = multiprocessing.get_context("fork")
                with ctx.Pool(workers) as pool:
                    for result in pool.imap(_pool_run, items, chunksize=16):
                        consume(result, sink)
            finally:
                _POOL_TASK = None
        else:
            for item in items:
                consume(run_line(item), sink)

    stats.tokens_annotated = sum(stats.pos_tokens.values())
    stats.tokens_unresolved = stats.tokens_seen - stats.tokens_annotated
    stats.distinct_synsets = len(all_keys)
    for key in all_keys:
        stats.pos_distinct_synsets[key.pos] = (
            stats.pos_distinct_synsets.get(key.pos, 0) + 1
        )
    return stats

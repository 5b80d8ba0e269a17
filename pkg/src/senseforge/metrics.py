"""Similarity measures between words represented by sets of sense vectors.

Five measures over two words u and w with sense vectors e(u,1..N) and
e(w,1..M):

* avg_sim: mean cosine over all N*M sense pairs.
* max_sim: best cosine over all sense pairs.
* avg_sim_c: cosine of each pair weighted by how well each sense fits
  its word's sentential context, P = cosine(sense, context), unclamped.
* max_sim_c: cosine between the two context-best senses.
* global_sim: cosine of the two mean sense vectors.

Every measure returns None when the required cosines are undefined
(zero-norm vectors); defined results lie in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vectors import SenseToken, VectorModel, cosine, mean_vectors

METRIC_NAMES = ("avg_sim", "max_sim", "avg_sim_c", "max_sim_c", "global_sim")
CONTEXT_METRICS = ("avg_sim_c", "max_sim_c")


@dataclass(frozen=True, slots=True)
class SenseSet:
    """All sense vectors of one word in a model, sorted by sense key."""

    word: str
    senses: tuple[tuple[SenseToken, np.ndarray], ...]

    def __post_init__(self):
        if not self.senses:
            raise ValueError(f"no senses for word {self.word!r}")


def build_sense_index(model: VectorModel) -> dict[str, SenseSet]:
    """Group a sense model's entries by word. Non-sense tokens are ignored."""
    grouped: dict[str, list[tuple[SenseToken, np.ndarray]]] = {}
    for text, vec in model.entries.items():
        try:
            token = SenseToken.parse(text)
        except ValueError:
            continue
        grouped.setdefault(token.word, []).append((token, vec))
    index: dict[str, SenseSet] = {}
    for word, pairs in grouped.items():
        pairs.sort(key=lambda item: item[0].key)
        index[word] = SenseSet(word=word, senses=tuple(pairs))
    return index


def sense_set(model: VectorModel, word: str) -> SenseSet | None:
    """SenseSet for one word, or None when the model has no senses for it."""
    return build_sense_index(model).get(word)


def avg_sim(u: SenseSet, w: SenseSet) -> float | None:
    total = 0.0
    for _, uvec in u.senses:
        for _, wvec in w.senses:
            sim = cosine(uvec, wvec)
            if sim is None:
                return None
            total += sim
    return total / (len(u.senses) * len(w.senses))


def max_sim(u: SenseSet, w: SenseSet) -> float | None:
    best: float | None = None
    for _, uvec in u.senses:
        for _, wvec in w.senses:
            sim = cosine(uvec, wvec)
            if sim is not None and (best is None or sim > best):
                best = sim
    return best


def context_vector(
    sentence_tokens: list[str],
    model: VectorModel,
    index: dict[str, SenseSet] | None = None,
) -> np.ndarray | None:
    """Mean of all sense vectors of all sentence words found in the model."""
    if index is None:
        index = build_sense_index(model)
    vecs = []
    for word in sentence_tokens:
        senses = index.get(word)
        if senses is not None:
            vecs.extend(vec for _, vec in senses.senses)
    return mean_vectors(vecs) if vecs else None


def avg_sim_c(
    u: SenseSet, w: SenseSet, cu: np.ndarray, cw: np.ndarray
) -> float | None:
    total = 0.0
    for _, uvec in u.senses:
        pu = cosine(uvec, cu)
        if pu is None:
            return None
        for _, wvec in w.senses:
            pw = cosine(wvec, cw)
            sim = cosine(uvec, wvec)
            if pw is None or sim is None:
                return None
            total += pu * pw * sim
    return total / (len(u.senses) * len(w.senses))


def _context_argmax(senses: SenseSet, ctx: np.ndarray) -> np.ndarray | None:
    # Senses are key-sorted; strict improvement keeps the lowest key on ties.
    best: float | None = None
    best_vec: np.ndarray | None = None
    for _, vec in senses.senses:
        fit = cosine(vec, ctx)
        if fit is not None and (best is None or fit > best):
            best, best_vec = fit, vec
    return best_vec


def max_sim_c(
    u: SenseSet, w: SenseSet, cu: np.ndarray, cw: np.ndarray
) -> float | None:
    uvec = _context_argmax(u, cu)
    wvec = _context_argmax(w, cw)
    if uvec is None or wvec is None:
        return None
    return cosine(uvec, wvec)


def global_sim(u: SenseSet, w: SenseSet) -> float | None:
    umean = mean_vectors([vec for _, vec in u.senses])
    wmean = mean_vectors([vec for _, vec in w.senses])
    return cosine(umean, wmean)


METRICS = {
    "avg_sim": avg_sim,
    "max_sim": max_sim,
    "avg_sim_c": avg_sim_c,
    "max_sim_c": max_sim_c,
    "global_sim": global_sim,
}

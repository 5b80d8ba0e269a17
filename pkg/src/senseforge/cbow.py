"""Continuous-bag-of-words training with hierarchical softmax.

Predicts each token from the mean of its context input vectors; the
output layer factors token probability along a Huffman-tree path, so a
step costs O(log vocab) node updates. Two deliberate departures from the
classic reference trainer keep runs reproducible: the context window is
the full +-window span (no random shrinking) and there is no
frequent-token subsampling.
"""

from __future__ import annotations

import heapq
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .vectors import VectorModel


class ConfigError(ValueError):
    """Training cannot proceed with the given configuration/corpus."""


@dataclass(frozen=True, slots=True)
class TrainConfig:
    dim: int = 300
    window: int = 15
    min_count: int = 10
    epochs: int = 5
    lr0: float = 0.025
    lr_min: float = 1e-4
    seed: int = 1

    def __post_init__(self):
        if min(self.dim, self.window, self.min_count, self.epochs) <= 0:
            raise ConfigError("dim, window, min_count, epochs must be positive")
        if not (0 < self.lr_min < self.lr0):
            raise ConfigError("need 0 < lr_min < lr0")


@dataclass(slots=True)
class Vocab:
    """Retained tokens with frequencies, most frequent first (ties by token)."""

    tokens: list[tuple[str, int]] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.tokens)


def build_vocab(corpus_path: str | os.PathLike, min_count: int) -> Vocab:
    """Count whitespace tokens of a one-document-per-line corpus file."""
    counts: Counter[str] = Counter()
    with open(corpus_path, encoding="utf-8") as handle:
        for line in handle:
            counts.update(line.split())
    kept = sorted(
        ((tok, n) for tok, n in counts.items() if n >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    return Vocab(tokens=kept, index={tok: i for i, (tok, _) in enumerate(kept)})


@dataclass(slots=True)
class HuffmanTree:
    """Per vocab index: inner-node ids from the root down, and branch bits."""

    paths: list[np.ndarray]
    codes: list[np.ndarray]
    n_inner: int


def build_huffman(vocab: Vocab) -> HuffmanTree:
    """Build the Huffman coding tree over vocab frequencies.

    Leaves are seeded with their vocab index as the heap tie-break and
    inner nodes with their creation order, so construction is fully
    deterministic. The two popped minima get branch bits 0 and 1.
    """
    n = len(vocab)
    parent: dict[int, tuple[int, int]] = {}  # node id -> (parent id, branch bit)
    heap: list[tuple[int, int, int]] = [
        (freq, i, i) for i, (_, freq) in enumerate(vocab.tokens)
    ]
    heapq.heapify(heap)
    next_id = n
    while len(heap) > 1:
        count0, _, node0 = heapq.heappop(heap)
        count1, _, node1 = heapq.heappop(heap)
        parent[node0] = (next_id, 0)
        parent[node1] = (next_id, 1)
        heapq.heappush(heap, (count0 + count1, next_id, next_id))
        next_id += 1
    paths: list[np.ndarray] = []
    codes: list[np.ndarray] = []
    for leaf in range(n):
        path: list[int] = []
        bits: list[int] = []
        node = leaf
        while node in parent:
            up, bit = parent[node]
            path.append(up - n)  # inner-node row index
            bits.append(bit)
            node = up
        path.reverse()
        bits.reverse()
        paths.append(np.asarray(path, dtype=np.intp))
        codes.append(np.asarray(bits, dtype=np.float64))
    return HuffmanTree(paths=paths, codes=codes, n_inner=max(n - 1, 0))


@dataclass(slots=True)
class CbowParams:
    """Trainable state: input vectors (the model) and inner-node vectors."""

    vocab: Vocab
    syn0: np.ndarray  # (vocab, dim) input vectors
    syn1: np.ndarray  # (vocab - 1, dim) inner-node vectors


def init_params(vocab: Vocab, dim: int, seed: int) -> CbowParams:
    rng = np.random.default_rng(seed)
    syn0 = (rng.random((len(vocab), dim)) - 0.5) / dim
    syn1 = np.zeros((max(len(vocab) - 1, 0), dim))
    return CbowParams(vocab=vocab, syn0=syn0, syn1=syn1)


def _step(
    center: int,
    context: np.ndarray,
    tree: HuffmanTree,
    syn0: np.ndarray,
    syn1: np.ndarray,
    lr: float,
) -> float:
    path = tree.paths[center]
    code = tree.codes[center]
    h = syn0[context].mean(axis=0)
    if len(path) == 0:
        return 0.0
    nodes = syn1[path]  # copy: gradients below use pre-update values
    z = nodes @ h
    sign = 1.0 - 2.0 * code
    loss = float(np.logaddexp(0.0, -sign * z).sum())
    if lr != 0.0:
        grad = (1.0 - code - _sigmoid(z)) * lr
        syn1[path] += np.outer(grad, h)
        feedback = (grad @ nodes) / len(context)
        if len(set(context.tolist())) == len(context):
            syn0[context] += feedback
        else:
            np.add.at(syn0, context, feedback)
    return loss


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    np.negative(np.abs(z), out=out)
    np.exp(out, out=out)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + out[positive])
    out[~positive] = out[~positive] / (1.0 + out[~positive])
    return out


def cbow_step(
    center: str,
    context: list[str],
    tree: HuffmanTree,
    params: CbowParams,
    lr: float,
) -> float:
    """One prediction/update step; returns the pre-update path loss.

    The loss is -sum over path nodes of log sigma(+-h.v), the sign set by
    the branch bit; with lr 0 this is a pure loss probe. Inner-node and
    context input vectors receive their exact gradients (the context
    share is split equally through the mean).
    """
    if not context:
        raise ValueError("context must be nonempty")
    center_i = params.vocab.index[center]
    context_i = np.asarray([params.vocab.index[t] for t in context], dtype=np.intp)
    return _step(center_i, context_i, tree, params.syn0, params.syn1, lr)


def _doc_indices(corpus_path: str, vocab: Vocab) -> list[np.ndarray]:
    docs = []
    with open(corpus_path, encoding="utf-8") as handle:
        for line in handle:
            idx = [vocab.index[t] for t in line.split() if t in vocab.index]
            if idx:
                docs.append(np.asarray(idx, dtype=np.intp))
    return docs


def _train_docs(
    docs: list[np.ndarray],
    tree: HuffmanTree,
    params: CbowParams,
    config: TrainConfig,
    counter: list[int],
    total_updates: int,
) -> None:
    syn0, syn1 = params.syn0, params.syn1
    window = config.window
    lr_span = config.lr_min - config.lr0
    for doc in docs:
        n = len(doc)
        if n < 2:
            continue
        for i in range(n):
            t = counter[0]
            counter[0] = t + 1
            lr = config.lr0 + lr_span * (t / total_updates)
            context = np.concatenate(
                (doc[max(0, i - window) : i], doc[i + 1 : i + 1 + window])
            )
            _step(int(doc[i]), context, tree, syn0, syn1, lr)


def train(
    corpus_path: str | os.PathLike,
    config: TrainConfig,
    workers: int = 1,
) -> VectorModel:
    """Train input vectors over a one-document-per-line corpus.

    Deterministic for a fixed seed with workers=1. With more workers,
    documents are sharded across threads updating shared parameters
    without locks, so results vary slightly run to run.
    """
    corpus_path = os.fspath(corpus_path)
    vocab = build_vocab(corpus_path, config.min_count)
    if len(vocab) == 0:
        raise ConfigError("empty vocabulary: corpus too small for min_count")
    tree = build_huffman(vocab)
    params = init_params(vocab, config.dim, config.seed)
    docs = _doc_indices(corpus_path, vocab)
    per_epoch = sum(len(d) for d in docs if len(d) >= 2)
    total_updates = max(per_epoch * config.epochs, 1)
    counter = [0]
    for _ in range(config.epochs):
        if workers > 1:
            shards = [docs[w::workers] for w in range(workers)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                jobs = [
                    pool.submit(
                        _train_docs, shard, tree, params, config, counter, total_updates
                    )
                    for shard in shards
                ]
                for job in jobs:
                    job.result()
        else:
            _train_docs(docs, tree, params, config, counter, total_updates)
    entries = {
        token: params.syn0[i].astype(np.float32)
        for i, (token, _) in enumerate(vocab.tokens)
    }
    return VectorModel(dim=config.dim, entries=entries)

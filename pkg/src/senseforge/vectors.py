"""Dense vector models and the similarity primitives built on them.

One store serves both plain word models and sense models; sense models
use the rendered SenseToken form `word#offset#pos` as the token string.
Two interchange formats are supported: a text format (`vocab dim` header,
one `token v1 ... vdim` line per entry) and a binary format (same ASCII
header, then per entry the token, a space, dim little-endian float32
values, and a newline separator).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .wordnet import POS_TAGS, SynsetKey


class FormatError(Exception):
    """A model file does not match its declared layout."""


class SenseToken(NamedTuple):
    """An annotated corpus token: a surface word bound to one synset."""

    word: str
    key: SynsetKey

    def render(self) -> str:
        return f"{self.word}#{self.key.offset:08d}#{self.key.pos}"

    @classmethod
    def parse(cls, text: str) -> "SenseToken":
        word, _, rest = text.partition("#")
        offset, sep, pos = rest.partition("#")
        if (
            not word
            or not sep
            or len(offset) != 8
            or not offset.isdigit()
            or pos not in POS_TAGS
        ):
            raise ValueError(f"not a sense token: {text!r}")
        return cls(word, SynsetKey(int(offset), pos))


@dataclass(slots=True)
class VectorModel:
    """Mapping from token string to a fixed-dimension dense vector."""

    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, token: str) -> np.ndarray | None:
        return self.entries.get(token)


def vector_norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def cosine_given_norms(
    u: np.ndarray, nu: float, v: np.ndarray, nv: float
) -> float | None:
    """Cosine from precomputed norms; None when either norm is zero."""
    if nu == 0.0 or nv == 0.0:
        return None
    return float(np.dot(u, v) / (nu * nv))


def cosine(u: Sequence[float], v: Sequence[float]) -> float | None:
    """Cosine similarity in [-1, 1], or None when a norm is zero.

    Callers that rank by cosine treat None as minus infinity, so
    zero-norm vectors are never selected.
    """
    u64 = np.asarray(u, dtype=np.float64)
    v64 = np.asarray(v, dtype=np.float64)
    if u64.shape != v64.shape:
        raise ValueError(f"dimension mismatch: {u64.shape} vs {v64.shape}")
    return cosine_given_norms(u64, vector_norm(u64), v64, vector_norm(v64))


def mean_vectors(vs: Iterable[Sequence[float]]) -> np.ndarray | None:
    """Componentwise mean of same-dimension vectors; None for an empty list."""
    stack = [np.asarray(v, dtype=np.float64) for v in vs]
    if not stack:
        return None
    if any(v.shape != stack[0].shape for v in stack):
        raise ValueError("dimension mismatch in mean_vectors")
    return np.mean(stack, axis=0)


def _parse_header(line: str | bytes, path: str) -> tuple[int, int]:
    try:
        vocab_text, dim_text = line.split()
        vocab_size, dim = int(vocab_text), int(dim_text)
    except ValueError as exc:
        raise FormatError(f"{path}: bad header line: {line!r}") from exc
    if vocab_size < 0 or dim <= 0:
        raise FormatError(f"{path}: bad header values {vocab_size} {dim}")
    return vocab_size, dim


def _load_text(path: str) -> VectorModel:
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        vocab_size, dim = _parse_header(header, path)
        entries: dict[str, np.ndarray] = {}
        for line in handle:
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dim + 1:
                raise FormatError(
                    f"{path}: entry {len(entries) + 1}: expected {dim} components, "
                    f"got {len(fields) - 1}"
                )
            token = fields[0]
            if token in entries:
                raise FormatError(f"{path}: duplicate token {token!r}")
            try:
                vec = np.array(fields[1:], dtype=np.float32)
            except ValueError as exc:
                raise FormatError(f"{path}: bad float in entry {token!r}") from exc
            entries[token] = vec
    if len(entries) != vocab_size:
        raise FormatError(
            f"{path}: header declares {vocab_size} entries, found {len(entries)}"
        )
    return VectorModel(dim=dim, entries=entries)


def _load_binary(path: str) -> VectorModel:
    with open(path, "rb") as handle:
        blob = handle.read()
    newline = blob.find(b"\n")
    if newline < 0:
        raise FormatError(f"{path}: missing header line")
    vocab_size, dim = _parse_header(blob[:newline].decode("ascii", "replace"), path)
    entries: dict[str, np.ndarray] = {}
    pos = newline + 1
    vec_bytes = 4 * dim
    for i in range(vocab_size):
        space = blob.find(b" ", pos)
        if space < 0:
            raise FormatError(f"{path}: truncated at entry {i + 1}")
        token = blob[pos:space].decode("utf-8")
        start = space + 1
        end = start + vec_bytes
        if end > len(blob):
            raise FormatError(f"{path}: truncated payload in entry {token!r}")
        if not token or token in entries:
            raise FormatError(f"{path}: bad or duplicate token {token!r}")
        entries[token] = np.frombuffer(blob[start:end], dtype="<f4").copy()
        pos = end
        if blob[pos : pos + 1] == b"\n":
            pos += 1
        elif i + 1 < vocab_size:
            raise FormatError(f"{path}: missing separator after entry {token!r}")
    if blob[pos:].strip():
        raise FormatError(f"{path}: trailing data after {vocab_size} entries")
    return VectorModel(dim=dim, entries=entries)


def load_model(path: str | os.PathLike, format: str = "text") -> VectorModel:
    """Read a model file in the given format ("text" or "binary")."""
    path = os.fspath(path)
    if format == "text":
        return _load_text(path)
    if format == "binary":
        return _load_binary(path)
    raise ValueError(f"unknown model format: {format!r}")


def save_model(model: VectorModel, path: str | os.PathLike, format: str = "text") -> None:
    """Write a model file; entries are emitted in lexicographic token order."""
    path = os.fspath(path)
    if format not in ("text", "binary"):
        raise ValueError(f"unknown model format: {format!r}")
    tokens = sorted(model.entries)
    for token in tokens:
        if not token or " " in token or "\n" in token:
            raise ValueError(f"token not serializable: {token!r}")
    if format == "text":
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"{len(tokens)} {model.dim}\n")
            for token in tokens:
                vec = model.entries[token]
                text = " ".join(f"{float(x):.9g}" for x in vec)
                handle.write(f"{token} {text}\n")
    else:
        with open(path, "wb") as handle:
            handle.write(f"{len(tokens)} {model.dim}\n".encode("ascii"))
            for token in tokens:
                vec = np.asarray(model.entries[token], dtype="<f4")
                handle.write(token.encode("utf-8") + b" " + vec.tobytes() + b"\n")

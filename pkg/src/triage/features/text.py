"""Vocabulary, bag-of-words and TF-IDF weighting."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


@dataclass
class Vocabulary:
    tokens: list[str] = field(default_factory=list)
    doc_freq: dict[str, int] = field(default_factory=dict)
    corpus_freq: dict[str, int] = field(default_factory=dict)
    min_count: int = 2

    def __post_init__(self) -> None:
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, tok: object) -> bool:
        return tok in self.index

    def counts(self) -> np.ndarray:
        return np.array([self.corpus_freq[t] for t in self.tokens], dtype=np.int64)

    def to_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        return {
            f"{prefix}tokens": np.array(self.tokens, dtype=str),
            f"{prefix}df": np.array([self.doc_freq[t] for t in self.tokens], dtype=np.int64),
            f"{prefix}cf": np.array([self.corpus_freq[t] for t in self.tokens], dtype=np.int64),
            f"{prefix}min_count": np.array(self.min_count),
        }

    @classmethod
    def from_arrays(cls, arrays, prefix: str) -> "Vocabulary":
        tokens = [str(t) for t in arrays[f"{prefix}tokens"]]
        return cls(
            tokens=tokens,
            doc_freq=dict(zip(tokens, map(int, arrays[f"{prefix}df"]))),
            corpus_freq=dict(zip(tokens, map(int, arrays[f"{prefix}cf"]))),
            min_count=int(arrays[f"{prefix}min_count"]),
        )


def build_vocab(docs: Iterable[Sequence[str]], min_count: int = 2) -> Vocabulary:
    """Tokens seen at least ``min_count`` times, indexed by first appearance."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    cf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    order: dict[str, None] = {}
    for doc in docs:
        cf.update(doc)
        df.update(set(doc))
        order.update(dict.fromkeys(doc))
    kept = [t for t in order if cf[t] >= min_count]
    return Vocabulary(kept, {t: df[t] for t in kept}, {t: cf[t] for t in kept}, min_count)


@dataclass
class SparseVector:
    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.indices.shape != self.weights.shape:
            raise ValueError("indices and weights differ in length")
        if len(self.indices):
            if np.any(np.diff(self.indices) <= 0) or self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("indices must be strictly increasing and < dim")
            if np.any(self.weights == 0):
                raise ValueError("zero weights are not stored")

    def __len__(self) -> int:
        return len(self.indices)

    def items(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.weights.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.weights
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.weights, self.weights)))


def bow(doc: Sequence[str], vocab: Vocabulary) -> SparseVector:
    counts = Counter(vocab.index[t] for t in doc if t in vocab.index)
    idx = sorted(counts)
    return SparseVector(idx, [float(counts[i]) for i in idx], len(vocab))


@dataclass
class IdfWeights:
    idf: np.ndarray
    n_docs: int

    def __post_init__(self) -> None:
        self.idf = np.asarray(self.idf, dtype=np.float64)
        if np.any(self.idf <= 0):
            raise ValueError("idf values must be positive")


def tfidf_fit(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> IdfWeights:
    """Smoothed idf = ln((1 + N) / (1 + df)) + 1."""
    n = len(docs)
    if n < 1:
        raise ValueError("tfidf_fit needs at least one document")
    df = np.zeros(len(vocab))
    for doc in docs:
        for t in set(doc):
            i = vocab.index.get(t)
            if i is not None:
                df[i] += 1
    return IdfWeights(np.log((1.0 + n) / (1.0 + df)) + 1.0, n)


def tfidf_transform(v: SparseVector, idf: IdfWeights) -> SparseVector:
    """Scale counts by idf and L2-normalize; the zero vector passes through."""
    w = v.weights * idf.idf[v.indices]
    norm = math.sqrt(float(np.dot(w, w)))
    if norm > 0:
        w = w / norm
    return SparseVector(v.indices.copy(), w, v.dim)


def term_document_matrix(vectors: Sequence[SparseVector], dim: int | None = None) -> sp.csc_matrix:
    """V x N sparse matrix with one column per document."""
    if dim is None:
        dim = vectors[0].dim if vectors else 0
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v) for v in vectors])
    rows = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    vals = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
    return sp.csc_matrix((vals, rows, indptr), shape=(dim, len(vectors)))

"""Skip-gram (word2vec) and PV-DM (doc2vec) embeddings trained with negative sampling.

Both models share :func:`neg_sampling_loss_grad`; training applies its
gradients with plain SGD, one mini-batch per sentence/document, using a
linearly decaying learning rate.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from triage.features.text import Vocabulary, build_vocab

MIN_ALPHA = 1e-4


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -x)


def neg_sampling_loss_grad(h: np.ndarray, pos: np.ndarray, neg: np.ndarray):
    """Negative-sampling loss summed over a batch, with gradients.

    h: (B, d) hidden vectors, pos: (B, d) output vectors of the true targets,
    neg: (B, K, d) output vectors of the sampled noise words.
    Loss is −Σ_b [log σ(h_b·pos_b) + Σ_k log σ(−h_b·neg_bk)].
    Returns (loss, d_h, d_pos, d_neg).
    """
    sp = np.einsum("bd,bd->b", h, pos)
    sn = np.einsum("bd,bkd->bk", h, neg)
    loss = -float(np.sum(_log_sigmoid(sp)) + np.sum(_log_sigmoid(-sn)))
    gp = _sigmoid(sp) - 1.0
    gn = _sigmoid(sn)
    d_h = gp[:, None] * pos + np.einsum("bk,bkd->bd", gn, neg)
    d_pos = gp[:, None] * h
    d_neg = gn[:, :, None] * h[:, None, :]
    return loss, d_h, d_pos, d_neg


def pvdm_loss_grad(doc_vec: np.ndarray, ctx_vecs: np.ndarray, pos: np.ndarray, neg: np.ndarray):
    """Single PV-DM prediction: hidden = mean(doc vector, context word vectors).

    Returns (loss, d_doc, d_ctx, d_pos, d_neg).
    """
    n = 1 + len(ctx_vecs)
    h = (doc_vec + ctx_vecs.sum(axis=0)) / n
    loss, d_h, d_pos, d_neg = neg_sampling_loss_grad(h[None, :], pos[None, :], neg[None, :, :])
    share = d_h[0] / n
    return loss, share, np.broadcast_to(share, ctx_vecs.shape).copy(), d_pos[0], d_neg[0]


def _noise_cdf(counts: np.ndarray) -> np.ndarray:
    p = counts.astype(np.float64) ** 0.75
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    return cdf


def _draw(cdf: np.ndarray, rng: np.random.Generator, shape) -> np.ndarray:
    return np.searchsorted(cdf, rng.random(shape), side="right").clip(max=len(cdf) - 1)


def _keep_probs(counts: np.ndarray, sample: float) -> np.ndarray:
    if sample <= 0:
        return np.ones(len(counts))
    thresh = sample * counts.sum()
    f = counts.astype(np.float64)
    return np.minimum(1.0, (np.sqrt(f / thresh) + 1.0) * thresh / f)


def _encode(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> list[np.ndarray]:
    return [np.array([vocab.index[t] for t in doc if t in vocab.index], dtype=np.int64) for doc in docs]


def _context_pairs(n: int, window: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(center, context) position pairs with a per-center reduced window in [1, window]."""
    if n < 2 or window < 1:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    reduced = rng.integers(1, window + 1, size=n)
    offsets = np.concatenate([np.arange(-window, 0), np.arange(1, window + 1)])
    centers = np.repeat(np.arange(n), len(offsets))
    ctx = centers + np.tile(offsets, n)
    ok = (ctx >= 0) & (ctx < n) & (np.abs(ctx - centers) <= reduced[centers])
    return centers[ok], ctx[ok]


def stable_seed(*parts) -> int:
    h = hashlib.sha256("\x1f".join(map(str, parts)).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little")


# ---------------------------------------------------------------------------
# word2vec


@dataclass
class WordEmbeddings:
    vocab: Vocabulary
    vectors: np.ndarray  # V x d input vectors
    out_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[self.vocab.index[token]]

    def __contains__(self, token: object) -> bool:
        return token in self.vocab

    def similarity(self, a: str, b: str) -> float:
        return cosine(self[a], self[b])


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def train_word2vec(
    docs: Sequence[Sequence[str]],
    dim: int = 100,
    window: int = 5,
    negatives: int = 5,
    subsample: float = 1e-4,
    epochs: int = 10,
    seed: int = 0,
    min_count: int = 2,
    alpha: float = 0.025,
) -> WordEmbeddings:
    vocab = build_vocab(docs, min_count)
    if len(vocab) == 0:
        raise ValueError("word2vec needs a nonempty vocabulary")
    rng = np.random.default_rng(seed)
    v = len(vocab)
    w_in = (rng.random((v, dim)) - 0.5) / dim
    w_out = np.zeros((v, dim))
    counts = vocab.counts()
    cdf = _noise_cdf(counts)
    keep = _keep_probs(counts, subsample)
    encoded = [d for d in _encode(docs, vocab) if len(d)]
    total = max(1, epochs * len(encoded))
    step = 0
    for _ in range(epochs):
        for sent in encoded:
            lr = alpha - (alpha - MIN_ALPHA) * step / total
            step += 1
            sent = sent[rng.random(len(sent)) < keep[sent]]
            c_pos, x_pos = _context_pairs(len(sent), window, rng)
            if not len(c_pos):
                continue
            centers, contexts = sent[c_pos], sent[x_pos]
            noise = _draw(cdf, rng, (len(centers), negatives))
            _, d_h, d_pos, d_neg = neg_sampling_loss_grad(w_in[centers], w_out[contexts], w_out[noise])
            np.add.at(w_in, centers, -lr * d_h)
            np.add.at(w_out, contexts, -lr * d_pos)
            np.add.at(w_out, noise.ravel(), -lr * d_neg.reshape(-1, dim))
    return WordEmbeddings(vocab, w_in, w_out)


def doc_vector_avg(doc: Sequence[str], emb: WordEmbeddings) -> np.ndarray:
    idx = [emb.vocab.index[t] for t in doc if t in emb.vocab.index]
    if not idx:
        return np.zeros(emb.dim)
    return emb.vectors[idx].mean(axis=0)


# ---------------------------------------------------------------------------
# doc2vec (PV-DM)


@dataclass
class DocEmbeddings:
    vocab: Vocabulary
    doc_vectors: np.ndarray  # n_docs x d
    word_vectors: np.ndarray
    out_vectors: np.ndarray
    window: int = 10
    negatives: int = 5
    subsample: float = 1e-4
    seed: int = 0

    @property
    def dim(self) -> int:
        return self.word_vectors.shape[1]


def _pvdm_batch(ids, doc_vec, w_in, w_out, window, negatives, cdf, rng):
    """Hidden vectors and sampled targets for every position of one encoded document."""
    n = len(ids)
    reduced = rng.integers(1, window + 1, size=n) if window > 0 else np.zeros(n, np.int64)
    offsets = np.concatenate([np.arange(-window, 0), np.arange(1, window + 1)])
    pos = np.arange(n)[:, None] + offsets[None, :]
    mask = (pos >= 0) & (pos < n) & (np.abs(offsets)[None, :] <= reduced[:, None])
    ctx = ids[np.clip(pos, 0, n - 1)]
    counts = 1 + mask.sum(axis=1)
    h = (doc_vec[None, :] + np.einsum("nw,nwd->nd", mask.astype(np.float64), w_in[ctx])) / counts[:, None]
    noise = _draw(cdf, rng, (n, negatives))
    return h, ctx, mask, counts, noise


def _pvdm_pass(ids, doc_vec, w_in, w_out, lr, window, negatives, cdf, rng, train_words: bool):
    h, ctx, mask, counts, noise = _pvdm_batch(ids, doc_vec, w_in, w_out, window, negatives, cdf, rng)
    _, d_h, d_pos, d_neg = neg_sampling_loss_grad(h, w_out[ids], w_out[noise])
    # word2vec convention: every member of the average receives the full
    # hidden-layer gradient, i.e. the exact gradient times the context size
    doc_vec -= lr * d_h.sum(axis=0)
    if train_words:
        m = mask.ravel()
        np.add.at(w_in, ctx.ravel()[m], -lr * np.repeat(d_h, mask.shape[1], axis=0)[m])
        np.add.at(w_out, ids, -lr * d_pos)
        np.add.at(w_out, noise.ravel(), -lr * d_neg.reshape(-1, d_neg.shape[-1]))


def train_doc2vec(
    docs: Sequence[Sequence[str]],
    dim: int = 100,
    window: int = 10,
    negatives: int = 5,
    subsample: float = 1e-4,
    epochs: int = 10,
    seed: int = 0,
    min_count: int = 1,
    alpha: float = 0.025,
) -> DocEmbeddings:
    """Distributed-memory paragraph vectors; the document vector joins every context average."""
    vocab = build_vocab(docs, min_count)
    rng = np.random.default_rng(seed)
    v = len(vocab)
    w_in = (rng.random((v, dim)) - 0.5) / dim
    w_out = np.zeros((v, dim))
    d_vecs = (rng.random((len(docs), dim)) - 0.5) / dim
    if v == 0:
        return DocEmbeddings(vocab, d_vecs, w_in, w_out, window, negatives, subsample, seed)
    counts = vocab.counts()
    cdf = _noise_cdf(counts)
    keep = _keep_probs(counts, subsample)
    encoded = _encode(docs, vocab)
    total = max(1, epochs * len(encoded))
    step = 0
    for _ in range(epochs):
        for di, ids in enumerate(encoded):
            lr = alpha - (alpha - MIN_ALPHA) * step / total
            step += 1
            ids = ids[rng.random(len(ids)) < keep[ids]]
            if not len(ids):
                continue
            _pvdm_pass(ids, d_vecs[di], w_in, w_out, lr, window, negatives, cdf, rng, train_words=True)
    return DocEmbeddings(vocab, d_vecs, w_in, w_out, window, negatives, subsample, seed)


def infer_vector(
    doc: Sequence[str],
    model: DocEmbeddings,
    steps: int = 20,
    alpha: float = 0.025,
    seed: int = 0,
) -> np.ndarray:
    """Fit a vector for an unseen document against the frozen word/output matrices.

    Starts from zero and runs ``steps`` passes over the document with a linearly
    decaying rate. A document with no known words stays at zero.
    """
    vec = np.zeros(model.dim)
    ids = _encode([doc], model.vocab)[0]
    if not len(ids) or steps <= 0:
        return vec
    rng = np.random.default_rng(seed)
    cdf = _noise_cdf(model.vocab.counts())
    for s in range(steps):
        lr = alpha - (alpha - MIN_ALPHA) * s / steps
        _pvdm_pass(
            ids, vec, model.word_vectors, model.out_vectors, lr, model.window, model.negatives, cdf, rng,
            train_words=False,
        )
    return vec

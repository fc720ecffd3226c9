"""Training-data ingestion, logistic regression and the per-type relevance pipeline."""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from triage.bundle import load_bundle, save_bundle
from triage.corpus import Tweet, learning_tokens, segmentation_wordlist, tokenize
from triage.errors import DataError
from triage.features import (
    IdfWeights,
    LsiModel,
    Vocabulary,
    WordEmbeddings,
    bow,
    build_vocab,
    doc_vector_avg,
    lsi_fit,
    lsi_project_many,
    tfidf_fit,
    tfidf_transform,
    train_word2vec,
)
from triage.matchfilter import keywords_for

logger = logging.getLogger(__name__)

# lowercase label -> normalized label; None means "drop the row"
LABEL_MAP: dict[str, str | None] = {
    "related": "related",
    "relevant": "related",
    "on-topic": "related",
    "on topic": "related",
    "related and informative": "related",
    "related - but not informative": "related",
    "not related": "not_related",
    "not_related": "not_related",
    "not relevant": "not_related",
    "off-topic": "not_related",
    "off topic": "not_related",
    "can't decide": None,
    "cant decide": None,
    "can't judge": None,
}

FEATURE_MODES = ("tfidf_lsi", "word2vec_avg")


@dataclass(frozen=True)
class LabeledExample:
    text: str
    label: str  # related | not_related
    confidence: float = 1.0
    source: str = "other"
    disaster_type: str | None = None

    @property
    def y(self) -> int:
        return int(self.label == "related")


def normalize_label(raw: str) -> str | None:
    key = raw.strip().lower().replace("’", "'")
    if key not in LABEL_MAP:
        raise ValueError(f"unknown label {raw!r}")
    return LABEL_MAP[key]


def load_training(paths: Iterable[str | Path], type_filter: Iterable[str] | None = None) -> list[LabeledExample]:
    """Read labeled CSVs (``text,label[,confidence][,type]``).

    Drops "can't decide" rows and rows whose confidence is below 1. Files
    without a confidence column are CrisisLex-style and count as fully
    confident. An optional ``type`` column is matched against ``type_filter``.
    """
    types = None if type_filter is None else {t.lower() for t in type_filter}
    out: list[LabeledExample] = []
    for path in paths:
        path = Path(path)
        try:
            fh = path.open(encoding="utf-8", newline="")
        except OSError as exc:
            raise DataError(f"cannot read training file {path}: {exc}") from exc
        with fh:
            reader = csv.DictReader(fh)
            cols = {c.strip().lower() for c in reader.fieldnames or ()}
            missing = {"text", "label"} - cols
            if missing:
                raise DataError(f"{path}: missing columns {sorted(missing)}")
            has_conf = "confidence" in cols
            source = "crowdflower_style" if has_conf else "crisislex_style"
            n_rows = n_kept = 0
            for row in reader:
                row = {k.strip().lower(): v for k, v in row.items() if k is not None}
                n_rows += 1
                try:
                    label = normalize_label(row["label"] or "")
                except ValueError as exc:
                    logger.warning("%s:%d: %s; row skipped", path, reader.line_num, exc)
                    continue
                if label is None:
                    continue
                conf = 1.0
                if has_conf and (row.get("confidence") or "").strip():
                    try:
                        conf = float(row["confidence"])
                    except ValueError:
                        logger.warning("%s:%d: bad confidence %r; row skipped", path, reader.line_num, row["confidence"])
                        continue
                if conf < 1.0:
                    continue
                dtype = (row.get("type") or "").strip().lower() or None
                if types is not None and dtype is not None and dtype not in types:
                    continue
                out.append(LabeledExample(row["text"] or "", label, conf, source, dtype))
                n_kept += 1
            logger.info("%s: kept %d of %d rows", path, n_kept, n_rows)
    return out


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss_grad(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy + (l2/2)·‖w‖² and its gradient (dw, db)."""
    z = x @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))
    r = (_sigmoid(z) - y) / len(y)
    return loss, x.T @ r + l2 * w, float(r.sum())


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float = 0.0
    l2: float = 1e-4
    mean: np.ndarray | None = None
    scale: np.ndarray | None = None
    losses: list[float] = field(default_factory=list, repr=False)

    def _prep(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.mean is not None:
            x = (x - self.mean) / self.scale
        return x

    def decision(self, x: np.ndarray) -> np.ndarray:
        return self._prep(x) @ self.weights + self.bias

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision(x))

    def to_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        d = {f"{prefix}w": self.weights, f"{prefix}b": np.array(self.bias), f"{prefix}l2": np.array(self.l2)}
        if self.mean is not None:
            d[f"{prefix}mean"] = self.mean
            d[f"{prefix}scale"] = self.scale
        return d

    @classmethod
    def from_arrays(cls, arrays, prefix: str) -> "LogRegModel":
        return cls(
            weights=arrays[f"{prefix}w"],
            bias=float(arrays[f"{prefix}b"]),
            l2=float(arrays[f"{prefix}l2"]),
            mean=arrays.get(f"{prefix}mean"),
            scale=arrays.get(f"{prefix}scale"),
        )


def train_logreg(
    x: np.ndarray,
    y: Sequence[int],
    l2: float = 1e-4,
    learning_rate: float = 0.1,
    epochs: int = 200,
    seed: int = 0,
    standardize: bool = True,
) -> LogRegModel:
    """Full-batch gradient descent from w = 0, b = 0.

    With ``standardize`` the features are centred and scaled by their training
    statistics, which are stored on the model and reapplied at prediction.
    ``seed`` is accepted for interface symmetry; the procedure has no randomness.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or len(x) != len(y) or len(y) < 2:
        raise ValueError("need a 2-D feature matrix with one label per row (at least 2 rows)")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class; supply both positive and negative examples")
    mean = scale = None
    if standardize:
        mean = x.mean(axis=0)
        scale = x.std(axis=0)
        scale[scale < 1e-12] = 1.0
        x = (x - mean) / scale
    w = np.zeros(x.shape[1])
    b = 0.0
    losses = []
    for _ in range(epochs):
        loss, dw, db = logistic_loss_grad(w, b, x, y, l2)
        losses.append(loss)
        w -= learning_rate * dw
        b -= learning_rate * db
    losses.append(logistic_loss_grad(w, b, x, y, l2)[0])
    return LogRegModel(w, b, l2, mean, scale, losses)


# ---------------------------------------------------------------------------
# relevance pipeline


@dataclass
class FeatureConfig:
    mode: str = "tfidf_lsi"
    min_count: int = 2
    lsi_k: int = 100
    w2v_dim: int = 100
    w2v_window: int = 5
    w2v_negatives: int = 5
    w2v_subsample: float = 1e-4
    w2v_epochs: int = 10
    l2: float = 1e-4
    learning_rate: float = 0.1
    epochs: int = 200
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in FEATURE_MODES:
            raise ValueError(f"featurization mode must be one of {FEATURE_MODES}")


@dataclass
class RelevancePipeline:
    types: tuple[str, ...]
    config: FeatureConfig
    wordlist: frozenset[str]
    vocab: Vocabulary
    logreg: LogRegModel
    idf: IdfWeights | None = None
    lsi: LsiModel | None = None
    embeddings: WordEmbeddings | None = None

    @property
    def threshold(self) -> float:
        return self.config.threshold

    def tokens(self, text: str) -> list[str]:
        return learning_tokens(text, self.wordlist)

    def featurize(self, texts: Sequence[str]) -> np.ndarray:
        docs = [self.tokens(t) for t in texts]
        if self.config.mode == "tfidf_lsi":
            vecs = [tfidf_transform(bow(d, self.vocab), self.idf) for d in docs]
            return lsi_project_many(vecs, self.lsi)
        if not docs:
            return np.zeros((0, self.embeddings.dim))
        return np.array([doc_vector_avg(d, self.embeddings) for d in docs])

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        if len(texts) == 0:
            return np.zeros(0)
        return self.logreg.predict_proba(self.featurize(texts))

    def save(self, path: str | Path) -> None:
        arrays = {
            **self.vocab.to_arrays("vocab_"),
            **self.logreg.to_arrays("lr_"),
            "wordlist": np.array(sorted(self.wordlist), dtype=str),
        }
        if self.idf is not None:
            arrays["idf"] = self.idf.idf
            arrays["idf_n"] = np.array(self.idf.n_docs)
        if self.lsi is not None:
            arrays["lsi_u"] = self.lsi.projection
            arrays["lsi_s"] = self.lsi.singular_values
        if self.embeddings is not None:
            arrays.update(self.embeddings.vocab.to_arrays("w2v_vocab_"))
            arrays["w2v_in"] = self.embeddings.vectors
            arrays["w2v_out"] = self.embeddings.out_vectors
        save_bundle(path, "relevance", {"types": list(self.types), "config": asdict(self.config)}, arrays)

    @classmethod
    def load(cls, path: str | Path) -> "RelevancePipeline":
        meta, a = load_bundle(path, "relevance")
        emb = None
        if "w2v_in" in a:
            emb = WordEmbeddings(Vocabulary.from_arrays(a, "w2v_vocab_"), a["w2v_in"], a["w2v_out"])
        return cls(
            types=tuple(meta["types"]),
            config=FeatureConfig(**meta["config"]),
            wordlist=frozenset(str(w) for w in a["wordlist"]),
            vocab=Vocabulary.from_arrays(a, "vocab_"),
            logreg=LogRegModel.from_arrays(a, "lr_"),
            idf=IdfWeights(a["idf"], int(a["idf_n"])) if "idf" in a else None,
            lsi=LsiModel(a["lsi_u"], a["lsi_s"]) if "lsi_u" in a else None,
            embeddings=emb,
        )


def _canonical_order(examples: Sequence[LabeledExample], seed: int) -> list[LabeledExample]:
    ordered = sorted(examples, key=lambda e: (e.text, e.label, e.confidence, e.source, e.disaster_type or ""))
    perm = np.random.default_rng(seed).permutation(len(ordered))
    return [ordered[i] for i in perm]


def train_relevance(
    types: Iterable[str],
    examples: Sequence[LabeledExample],
    config: FeatureConfig | None = None,
    seed: int = 0,
    unlabeled: Sequence[str] = (),
) -> RelevancePipeline:
    """Tokenize, vocabulary, TF-IDF, LSI, then logistic regression (or averaged word2vec features).

    ``unlabeled`` texts (the disaster corpus itself) only feed word2vec training.
    """
    config = config or FeatureConfig()
    types = tuple(sorted(set(types)))
    if not examples:
        raise DataError("no training examples")
    examples = _canonical_order(examples, seed)
    y = np.array([e.y for e in examples])
    if len(np.unique(y)) < 2:
        raise DataError("training examples need both related and not_related labels")
    raw = [tokenize(e.text) for e in examples]
    wordlist = segmentation_wordlist(raw, keywords_for(types))
    docs = [learning_tokens(e.text, wordlist) for e in examples]
    vocab = build_vocab(docs, config.min_count)
    if len(vocab) == 0:
        raise DataError(f"no token occurs at least {config.min_count} times in the training data")

    if config.mode == "tfidf_lsi":
        idf = tfidf_fit(docs, vocab)
        vecs = [tfidf_transform(bow(d, vocab), idf) for d in docs]
        k = min(config.lsi_k, len(vocab), len(vecs))
        lsi = lsi_fit(vecs, k, seed=seed)
        x = lsi_project_many(vecs, lsi)
        pipe_parts = dict(idf=idf, lsi=lsi)
    else:
        emb = train_word2vec(
            docs + [learning_tokens(t, wordlist) for t in sorted(unlabeled)],
            dim=config.w2v_dim,
            window=config.w2v_window,
            negatives=config.w2v_negatives,
            subsample=config.w2v_subsample,
            epochs=config.w2v_epochs,
            seed=seed,
            min_count=config.min_count,
        )
        x = np.array([doc_vector_avg(d, emb) for d in docs])
        pipe_parts = dict(embeddings=emb)
    model = train_logreg(x, y, l2=config.l2, learning_rate=config.learning_rate, epochs=config.epochs, seed=seed)
    return RelevancePipeline(types, config, wordlist, vocab, model, **pipe_parts)


def classify_learning(corpus: Iterable[Tweet], pipeline: RelevancePipeline, threshold: float | None = None) -> set[str]:
    tweets = list(corpus)
    if not tweets:
        return set()
    thr = pipeline.threshold if threshold is None else threshold
    proba = pipeline.predict_proba([t.text for t in tweets])
    return {t.tweet_id for t, p in zip(tweets, proba) if p >= thr}

"""Paragraph-vector sentiment classifier and time-binned positive/negative counts."""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from triage.bundle import load_bundle, save_bundle
from triage.corpus import Tweet, format_ts, parse_ts, tokenize
from triage.errors import DataError
from triage.features import DocEmbeddings, Vocabulary, infer_vector, train_doc2vec
from triage.features.embeddings import stable_seed
from triage.learner import LogRegModel, train_logreg

logger = logging.getLogger(__name__)

POSITIVE, NEGATIVE = "positive", "negative"
_POLARITY = {"0": NEGATIVE, "4": POSITIVE, "neg": NEGATIVE, "pos": POSITIVE, "negative": NEGATIVE, "positive": POSITIVE}
GRANULARITIES = {"hour": timedelta(hours=1), "day": timedelta(days=1)}
SERIES_FIELDS = ["bin_start", "granularity", "positive", "negative"]


@dataclass
class SentimentConfig:
    dim: int = 100
    window: int = 10
    negatives: int = 5
    subsample: float = 1e-4
    epochs: int = 60
    min_count: int = 1
    infer_steps: int = 20
    infer_alpha: float = 0.025
    l2: float = 1e-4
    learning_rate: float = 0.1
    logreg_epochs: int = 200
    threshold: float = 0.5


def load_sentiment_csv(path: str | Path) -> list[tuple[str, str]]:
    """``polarity,text`` rows; polarity 0/4 (Sentiment140) or neg/pos. Other polarities are skipped."""
    path = Path(path)
    try:
        fh = path.open(encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read sentiment file {path}: {exc}") from exc
    out = []
    with fh:
        reader = csv.DictReader(fh)
        if not {"polarity", "text"} <= set(reader.fieldnames or ()):
            raise DataError(f"{path}: expected header polarity,text")
        for row in reader:
            label = _POLARITY.get((row["polarity"] or "").strip().lower())
            if label is None:
                continue
            out.append((row["text"] or "", label))
    return out


@dataclass
class SentimentModel:
    doc_model: DocEmbeddings
    logreg: LogRegModel
    config: SentimentConfig
    seed: int = 0

    @property
    def threshold(self) -> float:
        return self.config.threshold

    def vector(self, text: str, seed: int) -> np.ndarray:
        return infer_vector(
            tokenize(text), self.doc_model, steps=self.config.infer_steps, alpha=self.config.infer_alpha, seed=seed
        )

    def save(self, path: str | Path) -> None:
        d = self.doc_model
        arrays = {
            **d.vocab.to_arrays("vocab_"),
            "word_vectors": d.word_vectors,
            "out_vectors": d.out_vectors,
            **self.logreg.to_arrays("lr_"),
        }
        meta = {
            "config": asdict(self.config),
            "seed": self.seed,
            "doc2vec": {"window": d.window, "negatives": d.negatives, "subsample": d.subsample, "seed": d.seed},
        }
        save_bundle(path, "sentiment", meta, arrays)

    @classmethod
    def load(cls, path: str | Path) -> "SentimentModel":
        meta, a = load_bundle(path, "sentiment")
        dv = meta["doc2vec"]
        doc_model = DocEmbeddings(
            Vocabulary.from_arrays(a, "vocab_"),
            np.zeros((0, a["word_vectors"].shape[1])),
            a["word_vectors"],
            a["out_vectors"],
            dv["window"],
            dv["negatives"],
            dv["subsample"],
            dv["seed"],
        )
        return cls(doc_model, LogRegModel.from_arrays(a, "lr_"), SentimentConfig(**meta["config"]), meta["seed"])


def train_sentiment(
    train: Sequence[tuple[str, str]],
    test: Sequence[tuple[str, str]] = (),
    predict_texts: Sequence[str] = (),
    config: SentimentConfig | None = None,
    seed: int = 0,
) -> tuple[SentimentModel, float | None]:
    """Train doc2vec on train + test + prediction texts, then logistic regression on the training vectors.

    Returns the model and the accuracy on the test vectors (None without a test set).
    """
    config = config or SentimentConfig()
    labels = {lab for _, lab in train}
    if labels != {POSITIVE, NEGATIVE}:
        raise DataError("sentiment training data needs both positive and negative examples")
    texts = [t for t, _ in train] + [t for t, _ in test] + list(predict_texts)
    docs = [tokenize(t) for t in texts]
    doc_model = train_doc2vec(
        docs,
        dim=config.dim,
        window=config.window,
        negatives=config.negatives,
        subsample=config.subsample,
        epochs=config.epochs,
        seed=seed,
        min_count=config.min_count,
    )
    y = np.array([lab == POSITIVE for _, lab in train], dtype=float)
    x_train = doc_model.doc_vectors[: len(train)]
    logreg = train_logreg(x_train, y, l2=config.l2, learning_rate=config.learning_rate, epochs=config.logreg_epochs)
    model = SentimentModel(doc_model, logreg, config, seed)
    accuracy = None
    if test:
        x_test = doc_model.doc_vectors[len(train) : len(train) + len(test)]
        pred = logreg.predict_proba(x_test) >= config.threshold
        truth = np.array([lab == POSITIVE for _, lab in test])
        accuracy = float(np.mean(pred == truth))
    return model, accuracy


def predict_sentiment(tweets: Sequence[Tweet | str], model: SentimentModel) -> list[str]:
    """One label per input, in order. Inference noise is seeded per tweet id (or per text)."""
    if not tweets:
        return []
    vecs = []
    for t in tweets:
        key, text = (t.tweet_id, t.text) if isinstance(t, Tweet) else (f"text:{t}", t)
        vecs.append(model.vector(text, stable_seed(model.seed, key)))
    proba = model.logreg.predict_proba(np.array(vecs))
    return [POSITIVE if p >= model.threshold else NEGATIVE for p in proba]


# ---------------------------------------------------------------------------
# time bins


@dataclass(frozen=True)
class TimeSeriesBin:
    bin_start: datetime
    granularity: str
    positive: int = 0
    negative: int = 0

    @property
    def total(self) -> int:
        return self.positive + self.negative


def floor_time(ts: datetime, granularity: str) -> datetime:
    ts = ts.astimezone(timezone.utc).replace(minute=0, second=0, microsecond=0)
    if granularity == "day":
        ts = ts.replace(hour=0)
    elif granularity != "hour":
        raise ValueError(f"granularity must be hour or day, got {granularity!r}")
    return ts


def bin_counts(
    labeled: Iterable[tuple[datetime, str]],
    granularity: str,
    start: datetime,
    end: datetime,
) -> list[TimeSeriesBin]:
    """Positive/negative counts per UTC hour or day over [start, end), empty bins included."""
    if not start < end:
        raise ValueError("window start must precede its end")
    step = GRANULARITIES.get(granularity)
    if step is None:
        raise ValueError(f"granularity must be hour or day, got {granularity!r}")
    first = floor_time(start, granularity)
    n_bins = 0
    while first + n_bins * step < end:
        n_bins += 1
    pos = [0] * n_bins
    neg = [0] * n_bins
    for ts, label in labeled:
        if not start <= ts < end:
            continue
        i = (floor_time(ts, granularity) - first) // step
        if label == POSITIVE:
            pos[i] += 1
        elif label == NEGATIVE:
            neg[i] += 1
        else:
            raise ValueError(f"unknown sentiment label {label!r}")
    return [TimeSeriesBin(first + i * step, granularity, pos[i], neg[i]) for i in range(n_bins)]


def write_series_csv(bins: Sequence[TimeSeriesBin], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_FIELDS)
        for b in bins:
            w.writerow([format_ts(b.bin_start), b.granularity, b.positive, b.negative])


def read_series_csv(path: str | Path) -> list[TimeSeriesBin]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [
            TimeSeriesBin(parse_ts(r["bin_start"]), r["granularity"], int(r["positive"]), int(r["negative"]))
            for r in csv.DictReader(fh)
        ]

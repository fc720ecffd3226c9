from __future__ import annotations

from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import T0, at
from triage.corpus import Tweet
from triage.errors import DataError
from triage.sentiment import (
    NEGATIVE,
    POSITIVE,
    SentimentConfig,
    SentimentModel,
    TimeSeriesBin,
    bin_counts,
    load_sentiment_csv,
    predict_sentiment,
    read_series_csv,
    train_sentiment,
    write_series_csv,
)

SMALL = SentimentConfig(dim=8, window=3, epochs=2, subsample=0.0, logreg_epochs=20)


def test_synthetic_accuracy(sentiment_model):
    _, acc = sentiment_model
    assert acc >= 0.8


def test_empty_test_set_gives_no_accuracy():
    train = [("great day", POSITIVE), ("awful day", NEGATIVE)] * 3
    model, acc = train_sentiment(train, (), (), SMALL)
    assert acc is None and isinstance(model, SentimentModel)


def test_single_class_rejected():
    with pytest.raises(DataError):
        train_sentiment([("great", POSITIVE)] * 4, config=SMALL)


def test_batch_labels_preserve_order(sentiment_model):
    model, _ = sentiment_model
    texts = ["great great", "awful", "", "so great today", "awful awful night"]
    labels = predict_sentiment(texts, model)
    assert len(labels) == len(texts)
    assert labels == [predict_sentiment([t], model)[0] for t in texts]
    assert predict_sentiment([], model) == []


def test_empty_tweet_labeled_from_zero_vector(sentiment_model):
    model, _ = sentiment_model
    p = model.logreg.predict_proba(np.zeros((1, model.doc_model.word_vectors.shape[1])))[0]
    expected = POSITIVE if p >= 0.5 else NEGATIVE
    assert predict_sentiment([""], model) == [expected] == predict_sentiment([""], model)


def test_copy_of_positive_training_example(sentiment_model, scenario):
    model, _ = sentiment_model
    positives = [t for t, lab in scenario.sentiment_train if lab == POSITIVE]
    labels = predict_sentiment(positives, model)
    assert labels.count(POSITIVE) / len(labels) > 0.8


def test_prediction_deterministic_per_tweet_id(sentiment_model):
    model, _ = sentiment_model
    tweets = [Tweet(str(i), "u", T0, t) for i, t in enumerate(["great fun", "awful mess", "meh"])]
    assert predict_sentiment(tweets, model) == predict_sentiment(tweets, model)


def test_model_roundtrip(sentiment_model, tmp_path, scenario):
    model, _ = sentiment_model
    model.save(tmp_path / "s.npz")
    back = SentimentModel.load(tmp_path / "s.npz")
    texts = [t for t, _ in scenario.sentiment_test[:20]]
    assert predict_sentiment(texts, back) == predict_sentiment(texts, model)


def test_load_sentiment_csv(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text('polarity,text\n0,"awful, just awful"\n4,great\n2,neutral\npos,fine\nneg,bad\n')
    assert load_sentiment_csv(p) == [
        ("awful, just awful", NEGATIVE), ("great", POSITIVE), ("fine", POSITIVE), ("bad", NEGATIVE)
    ]
    bad = tmp_path / "b.csv"
    bad.write_text("label,text\n0,x\n")
    with pytest.raises(DataError):
        load_sentiment_csv(bad)


# --- bins ------------------------------------------------------------------


def test_hourly_bin_example():
    labeled = [(at(1, 10), POSITIVE), (at(1, 40), POSITIVE), (at(2, 5), POSITIVE)]
    bins = bin_counts(labeled, "hour", T0, at(4))
    assert [(b.bin_start, b.positive, b.negative) for b in bins] == [
        (at(0), 0, 0), (at(1), 2, 0), (at(2), 1, 0), (at(3), 0, 0)
    ]


def test_window_is_half_open():
    bins = bin_counts([(at(0), NEGATIVE), (at(2), NEGATIVE)], "hour", T0, at(2))
    assert sum(b.total for b in bins) == 1


def test_bad_window_and_granularity():
    with pytest.raises(ValueError):
        bin_counts([], "hour", at(2), at(1))
    with pytest.raises(ValueError):
        bin_counts([], "week", T0, at(1))


labeled_tweets = st.lists(
    st.tuples(st.integers(-600, 3 * 24 * 60 + 600), st.sampled_from([POSITIVE, NEGATIVE])), max_size=200
).map(lambda rows: [(T0 + timedelta(minutes=m), lab) for m, lab in rows])


@given(labeled_tweets)
def test_conservation_and_day_equals_hours(labeled):
    start, end = T0, T0 + timedelta(days=3)
    inside = sum(1 for ts, _ in labeled if start <= ts < end)
    hours = bin_counts(labeled, "hour", start, end)
    days = bin_counts(labeled, "day", start, end)
    assert sum(b.total for b in hours) == inside == sum(b.total for b in days)
    for d in days:
        same_day = [h for h in hours if h.bin_start.date() == d.bin_start.date()]
        assert d.positive == sum(h.positive for h in same_day)
        assert d.negative == sum(h.negative for h in same_day)


@given(labeled_tweets, st.data())
def test_deletion_is_monotone(labeled, data):
    keep = data.draw(st.lists(st.booleans(), min_size=len(labeled), max_size=len(labeled)))
    fewer = [x for x, k in zip(labeled, keep) if k]
    start, end = T0, T0 + timedelta(days=3)
    for g in ("hour", "day"):
        for a, b in zip(bin_counts(fewer, g, start, end), bin_counts(labeled, g, start, end)):
            assert a.positive <= b.positive and a.negative <= b.negative


def test_series_csv_roundtrip(tmp_path):
    bins = [TimeSeriesBin(at(0), "hour", 1, 2), TimeSeriesBin(at(1), "hour", 0, 0)]
    write_series_csv(bins, tmp_path / "s.csv")
    assert read_series_csv(tmp_path / "s.csv") == bins
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "bin_start,granularity,positive,negative"

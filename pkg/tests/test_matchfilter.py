from __future__ import annotations

import os
import random
from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

import oracles
from triage.errors import ConfigError, DataError
from triage.matchfilter import (
    CORE_KEYWORDS,
    HashtagLedger,
    LedgerEntry,
    TermSet,
    classify_conventional,
    classify_matching,
    expand_candidates,
    final_terms,
    improvement,
    keywords_for,
    ledger_lock,
    load_ledger,
    review,
    save_ledger,
)
from triage.regions import DisasterManifest

NOW = datetime(2014, 9, 1, tzinfo=timezone.utc)


def quake_manifest(**over):
    d = {
        "disaster_id": "napa_earthquake",
        "fema_code": "4193",
        "types": ["earthquake"],
        "start_date": "2014-08-24",
        "duration_days": 16,
        "affected_fips": ["06055"],
        "area_name": "napa",
        "official_name": "southnapaearthquake",
    }
    d.update(over)
    return DisasterManifest.from_dict(d)


def test_core_keywords_verbatim():
    assert CORE_KEYWORDS["wildfire"] == ("fire", "firing", "burn", "buring", "blaze", "blazing", "flame", "framing")
    assert set(keywords_for(["flood", "wildfire"])) == set(CORE_KEYWORDS["flood"]) | set(CORE_KEYWORDS["wildfire"])
    with pytest.raises(ConfigError):
        keywords_for(["volcano"])


# --- expansion -------------------------------------------------------------


def test_expand_examples():
    assert expand_candidates(["fire"], {"fireworks": 5, "napafire": 3, "coffee": 9}) == ["fireworks", "napafire"]
    assert expand_candidates(["quake"], {"3amearthquake": 2, "quakeinsf": 1, "flood": 4}) == [
        "3amearthquake", "quakeinsf"
    ]
    assert expand_candidates(["quake"], {}) == []


def test_expand_multiword_keyword():
    assert expand_candidates(["high water"], {"highwater": 1, "water": 2}) == ["highwater"]


words = st.text(alphabet="abcfire ", min_size=1, max_size=6)


@given(st.lists(words, max_size=5), st.dictionaries(st.text(alphabet="abcfire", min_size=1, max_size=10), st.integers(1, 50)))
def test_expand_matches_substring_oracle(keywords, hd):
    got = expand_candidates(keywords, hd)
    assert set(got) == oracles.substring_candidates(keywords, hd)
    assert len(got) == len(set(got))


# --- ledger and review -----------------------------------------------------


def fresh_ledger(n=5):
    return HashtagLedger.from_candidates([f"tag{i}" for i in range(n)], {f"tag{i}": 10 - i for i in range(n)})


def scripted(answers):
    it = iter(answers)
    return lambda _prompt: next(it)


def test_review_saves_each_decision_and_resumes(tmp_path):
    path = tmp_path / "ledger.csv"
    ledger = fresh_ledger()
    save_ledger(ledger, path)
    review(ledger, {}, path, prompt=scripted(["a", "r", "q"]), echo=lambda s: None, clock=lambda: NOW)
    on_disk = load_ledger(path)
    assert [e.status for e in on_disk.entries] == ["accepted", "rejected", "candidate", "candidate", "candidate"]

    seen = []

    def echo(line):
        if line.startswith("["):
            seen.append(line)

    review(on_disk, {}, path, prompt=scripted(["a", "a", "a"]), echo=echo, clock=lambda: NOW)
    assert "#tag2" in seen[0]
    assert load_ledger(path).accepted == {"tag0", "tag2", "tag3", "tag4"}


def test_review_eof_quits_cleanly(tmp_path):
    path = tmp_path / "ledger.csv"
    ledger = fresh_ledger(2)

    def eof(_):
        raise EOFError

    review(ledger, {}, path, prompt=eof, echo=lambda s: None)
    assert len(ledger.pending()) == 2


def test_review_only_touches_status_fields(tmp_path):
    path = tmp_path / "ledger.csv"
    ledger = fresh_ledger()
    before = [(e.hashtag, e.count) for e in ledger.entries]
    review(ledger, {}, path, prompt=scripted(["a", "s", "r", "x", "a", "a"]), echo=lambda s: None, clock=lambda: NOW)
    assert [(e.hashtag, e.count) for e in ledger.entries] == before
    assert all(e.decided_at == NOW for e in ledger.entries if e.status != "candidate")


def test_all_rejected_falls_back_to_keywords(tmp_path):
    path = tmp_path / "ledger.csv"
    ledger = fresh_ledger(3)
    review(ledger, {}, path, prompt=scripted(["r"] * 3), echo=lambda s: None, clock=lambda: NOW)
    assert final_terms(["quake"], ledger) == TermSet(("quake",), frozenset())


def test_failed_save_keeps_previous_file(tmp_path, monkeypatch):
    path = tmp_path / "ledger.csv"
    save_ledger(fresh_ledger(2), path)
    before = path.read_text()

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        save_ledger(fresh_ledger(4), path)
    assert path.read_text() == before
    assert [p.name for p in tmp_path.iterdir() if p.suffix == ".tmp"] == []


def test_second_review_session_is_refused(tmp_path):
    path = tmp_path / "ledger.csv"
    with ledger_lock(path):
        with pytest.raises(ConfigError):
            with ledger_lock(path):
                pass


def test_ledger_invariants():
    with pytest.raises(DataError):
        HashtagLedger([LedgerEntry("a", 1), LedgerEntry("a", 2)])
    with pytest.raises(DataError):
        HashtagLedger([LedgerEntry("a", 1, "maybe")])
    with pytest.raises(DataError):
        HashtagLedger([LedgerEntry("a", 1, "accepted")])  # decision without a time


def test_ledger_missing_columns(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("hashtag,count\nfoo,1\n")
    with pytest.raises(DataError):
        load_ledger(p)


def test_merge_keeps_decisions():
    ledger = HashtagLedger([LedgerEntry("napaquake", 3, "accepted", NOW)])
    added = ledger.merge_candidates(["napaquake", "quakeinsf"], {"napaquake": 9, "quakeinsf": 2})
    assert added == 1
    assert ledger.get("napaquake").status == "accepted"


# --- classification --------------------------------------------------------


def test_final_terms_examples():
    ledger = HashtagLedger([LedgerEntry("napaquake", 3, "accepted", NOW), LedgerEntry("quakeroats", 1, "rejected", NOW)])
    assert final_terms(["quake"], ledger) == TermSet(("quake",), frozenset({"napaquake"}))
    assert final_terms(["quake"], None) == TermSet(("quake",), frozenset())


def test_matching_examples():
    quake = final_terms(keywords_for(["earthquake"]), HashtagLedger([LedgerEntry("napaquake", 1, "accepted", NOW)]))
    fire = final_terms(keywords_for(["wildfire"]), None)
    assert classify_matching("aftershocks all night #napaquake", quake)
    assert classify_matching("watching fireworks tonight", fire)
    assert not classify_matching("Safe and Sound! Just a lot of shaking in SF", quake)


def test_token_mode_is_stricter():
    terms = final_terms(["quake"], None)
    assert classify_matching("earthquake!", terms, mode="substring")
    assert not classify_matching("earthquake!", terms, mode="token")
    assert classify_matching("big quake", terms, mode="token")
    with pytest.raises(ConfigError):
        classify_matching("x", terms, mode="fuzzy")


def test_conventional_examples():
    m = quake_manifest()
    assert classify_conventional("#napaearthquake was scary", m)
    assert not classify_conventional("#3amearthquake", m)
    assert classify_conventional("big quake", m)


def test_improvement_examples():
    assert improvement(180, 100) == 80.0
    assert improvement(100, 100) == 0.0
    assert improvement(90, 100) == -10.0
    assert improvement(5, 0) is None


texts = st.text(alphabet="aquketr #fion", max_size=40)


@given(st.lists(texts, max_size=30), st.sets(st.text(alphabet="aquketr", min_size=1, max_size=8), max_size=4))
def test_refinement_only_adds(tweets, accepted):
    kw = ("quake",)
    ledger = HashtagLedger([LedgerEntry(h, 1, "accepted", NOW) for h in sorted(accepted)])
    base = {i for i, t in enumerate(tweets) if classify_matching(t, final_terms(kw, None))}
    refined = {i for i, t in enumerate(tweets) if classify_matching(t, final_terms(kw, ledger))}
    assert base <= refined


@given(texts, st.text(alphabet="aquketr", min_size=1, max_size=4))
def test_keyword_only_is_substring_search(text, k):
    assert classify_matching(text, TermSet((k,))) == (k in text.lower())


@pytest.mark.parametrize("accept", [True, False])
def test_conventional_hashtag_reaches_matching_iff_accepted(accept):
    m = quake_manifest(keyword_overrides=["zzz"])  # keep the keyword clause out of the way
    text = "so loud #southnapaearthquake"
    assert classify_conventional(text, m)
    status = "accepted" if accept else "rejected"
    ledger = HashtagLedger([LedgerEntry("southnapaearthquake", 1, status, NOW)])
    terms = final_terms(keywords_for(m.types, m.keyword_overrides), ledger)
    assert classify_matching(text, terms) is accept


def test_random_candidates_against_oracle_bulk():
    rng = random.Random(11)
    alphabet = "abcdefgquakefire"
    for _ in range(1000):
        kws = ["".join(rng.choice(alphabet) for _ in range(rng.randint(1, 4))) for _ in range(rng.randint(1, 4))]
        hd = {"".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12))): rng.randint(1, 9) for _ in range(30)}
        assert set(expand_candidates(kws, hd)) == oracles.substring_candidates(kws, hd)

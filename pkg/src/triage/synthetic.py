"""Seeded generator for the bundled synthetic earthquake scenario.

Produces a geotagged corpus with planted relevant/irrelevant and
positive/negative structure, square county geometry, a disaster manifest,
labeled relevance training files and Sentiment140-style sentiment files.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

from triage.corpus import Corpus, Tweet, write_corpus

START = date(2014, 8, 24)
DURATION = 16
QUAKE_AT = datetime(2014, 8, 24, 10, 20, tzinfo=timezone.utc)

AFFECTED = ("06055", "06097")
# 4 x 3 grid of square counties; the last one sits in another state
GRID = (
    ("06041", "06097", "06055", "06113"),
    ("06075", "06095", "06013", "06067"),
    ("06081", "06001", "06085", "32005"),
)
LON0, LAT0, CELL = -123.0, 37.0, 0.5

NEG_WORDS = ("scary", "terrible", "awful", "scared", "horrible", "worst", "sad", "hate", "upset", "panic")
POS_WORDS = ("thankful", "grateful", "great", "love", "happy", "blessed", "relieved", "wonderful", "glad", "proud")
FILLER = (
    "today tonight morning coffee work lunch dinner game music friends family home news night weekend traffic "
    "school class movie beach park drive walk store shopping city street downtown bar wine beer pizza tacos "
    "burger team season show phone photo video book sleep early late week monday friday sunday bus train "
    "gym run dog cat baby party birthday concert festival vineyard market office meeting call email"
).split()
OTHER_FILLER = (
    "lol omg album celebrity bieber selfie followers retweet giveaway fashion makeup nails hair outfit "
    "playlist singer rapper episode netflix anime gaming stream fans tour tickets crush boyfriend girlfriend "
    "bored homework exam mood vibes snapchat instagram emoji lmao idol kpop"
).split()
SHARED = ("everyone", "people", "house", "last", "night", "just", "woke", "still", "hope", "ok")

CONVENTIONAL_TEMPLATES = (
    "that was a big quake {s} {f}",
    "#napaearthquake {s} {f} {f}",
    "aftershock again {s} {f}",
    "#earthquake in napa {s} {f}",
    "felt the tremor {f} {s}",
    "{f} another aftershock {s} #napaearthquake",
    "quake woke everyone up {s}",
)
COINED_TAGS = ("3amearthquake", "quakeinsf", "eathquake", "eartquake", "earrhquake", "napaquake", "quakenapa",
               "napaquakestrong", "fearoftheearthquake", "aftershockclub")
COINED_TEMPLATES = (
    "{s} #{tag} {f}",
    "#{tag} {s} {f} {f}",
    "{f} {s} #{tag}",
    "woke up at 3am #{tag} {s}",
)
SEMANTIC_TEMPLATES = (
    "so much shaking last night {s} {f}",
    "house was rattling everyone ok {s}",
    "#staysafenapa {s} {f}",
    "woke up to everything moving {s} {f}",
    "the ground was rolling {s} hope everyone is ok",
)
FALSE_POSITIVE_TEMPLATES = (
    "quaker oats for breakfast {f} {s}",
    "#quakeroats {f} {f}",
)
IRRELEVANT_TEMPLATES = (
    "{f} {f} {s}",
    "{f} with {f} {f} {s}",
    "just got {f} {f}",
    "{s} {f} {f} {f}",
    "{f} {f} tonight {s}",
    "{sh} {f} {f} {s}",
    "{f} {sh} {sh} {f}",
)
SPAM_TEMPLATES = ("check out our {f} deals now", "{f} sale today only", "best {f} in town click now")

RELATED_TRAIN = (
    "{sh} {q} damage in {place} {s}",
    "{q} felt across {place} {sh} {f}",
    "magnitude {n} {q} hits {place} {f}",
    "{f} {f} {sh} {place} {s}",
    "#{place}{q} rescue teams {sh}",
    "buildings collapsed after the {q} {s}",
    "{sh} shaking so hard {s} {sh}",
    "emergency crews after {q} {place} {sh}",
    "pray for {place} {q} victims {s}",
    "{sh} {sh} the {q} {s}",
)
UNRELATED_TRAIN = (
    "{o} {o} {s}",
    "{o} {o} {o}",
    "{s} {o} with {o}",
    "{o} {f} {o} {s}",
    "{o} {sh} {o}",
    "{f} {f} {o} {s}",
    "{f} with {f} {o}",
)
PLACES = ("chile", "nepal", "japan", "mexico", "italy", "peru", "haiti", "napa")
QWORDS = ("earthquake", "quake", "aftershock", "tremor", "earthquake")
FLOOD_RELATED = ("{sh} flood waters rising in {place} {s}", "storm surge {place} {sh}", "#{place}flood {s} {sh}")
FIRE_RELATED = ("wildfire spreading near {place} {s}", "{sh} smoke from the fire {s}", "#{place}fire evacuations {sh}")


@dataclass
class Scenario:
    corpus: Corpus
    manifest: dict
    geometry: dict
    relevant_ids: set[str]
    coined_ids: set[str]
    conventional_ids: set[str]
    spam_users: set[str]
    training_rows: dict[str, list[dict]] = field(default_factory=dict)
    sentiment_train: list[tuple[str, str]] = field(default_factory=list)
    sentiment_test: list[tuple[str, str]] = field(default_factory=list)
    relevant_hashtags: set[str] = field(default_factory=set)
    irrelevant_hashtags: set[str] = field(default_factory=set)


def county_square(fips: str) -> list[list[float]]:
    for r, row in enumerate(GRID):
        for c, f in enumerate(row):
            if f == fips:
                x0, y0 = LON0 + c * CELL, LAT0 + r * CELL
                return [[x0, y0], [x0 + CELL, y0], [x0 + CELL, y0 + CELL], [x0, y0 + CELL], [x0, y0]]
    raise KeyError(fips)


def geometry() -> dict:
    feats = [
        {"type": "Feature", "properties": {"FIPS": f}, "geometry": {"type": "Polygon", "coordinates": [county_square(f)]}}
        for row in GRID
        for f in row
    ]
    return {"type": "FeatureCollection", "features": feats}


def manifest() -> dict:
    return {
        "disaster_id": "napa_earthquake",
        "fema_code": "4193",
        "types": ["earthquake"],
        "start_date": START.isoformat(),
        "duration_days": DURATION,
        "affected_fips": list(AFFECTED),
        "area_name": "napa",
        "official_name": "southnapaearthquake",
    }


def _fill(rng: random.Random, template: str, mood: str | None = None, **extra) -> str:
    def mood_word() -> str:
        m = mood or rng.choice(("pos", "neg", "none", "none"))
        if m == "pos":
            return rng.choice(POS_WORDS)
        if m == "neg":
            return rng.choice(NEG_WORDS)
        return rng.choice(FILLER)

    out = template
    while "{f}" in out:
        out = out.replace("{f}", rng.choice(FILLER), 1)
    while "{o}" in out:
        out = out.replace("{o}", rng.choice(OTHER_FILLER), 1)
    while "{sh}" in out:
        out = out.replace("{sh}", rng.choice(SHARED), 1)
    while "{s}" in out:
        out = out.replace("{s}", mood_word(), 1)
    return out.format(**extra) if extra else out


def _sentiment_rows(rng: random.Random, n: int) -> list[tuple[str, str]]:
    rows = []
    for i in range(n):
        label = "positive" if i % 2 == 0 else "negative"
        words = POS_WORDS if label == "positive" else NEG_WORDS
        parts = [rng.choice(FILLER) for _ in range(rng.randint(3, 6))]
        for _ in range(rng.randint(1, 2)):
            parts.insert(rng.randrange(len(parts) + 1), rng.choice(words))
        rows.append((" ".join(parts), label))
    return rows


def _training_rows(rng: random.Random) -> dict[str, list[dict]]:
    crisislex = []
    for _ in range(260):
        t = _fill(rng, rng.choice(RELATED_TRAIN), place=rng.choice(PLACES), q=rng.choice(QWORDS), n=rng.randint(4, 8))
        crisislex.append({"text": t, "label": "Related", "type": "earthquake"})
    for _ in range(240):
        crisislex.append({"text": _fill(rng, rng.choice(UNRELATED_TRAIN)), "label": "Not related", "type": "earthquake"})
    for _ in range(120):
        crisislex.append({"text": _fill(rng, rng.choice(FLOOD_RELATED), place=rng.choice(PLACES)), "label": "Related", "type": "flood"})
        crisislex.append({"text": _fill(rng, rng.choice(UNRELATED_TRAIN)), "label": "Not related", "type": "flood"})
    for _ in range(80):
        crisislex.append({"text": _fill(rng, rng.choice(FIRE_RELATED), place=rng.choice(PLACES)), "label": "Related", "type": "wildfire"})
        crisislex.append({"text": _fill(rng, rng.choice(UNRELATED_TRAIN)), "label": "Not related", "type": "wildfire"})
    crowdflower = []
    for i in range(120):
        related = i % 3 != 0
        if related:
            text = _fill(rng, rng.choice(RELATED_TRAIN), place=rng.choice(PLACES), q=rng.choice(QWORDS), n=rng.randint(4, 8))
        else:
            text = _fill(rng, rng.choice(UNRELATED_TRAIN))
        label = "Relevant" if related else "Not Relevant"
        if i % 10 == 7:
            label = "Can't Decide"
        conf = "1" if i % 4 else rng.choice(("0.67", "0.8", "0.5"))
        crowdflower.append({"text": text, "label": label, "confidence": conf, "type": "earthquake"})
    return {"crisislex": crisislex, "crowdflower": crowdflower}


def generate(
    seed: int = 7,
    n_tweets: int = 5000,
    n_users: int = 420,
    coined_fraction: float = 0.3,
    semantic_fraction: float = 0.1,
    affected_relevance: float = 0.22,
    unaffected_relevance: float = 0.06,
    n_spammers: int = 5,
) -> Scenario:
    """Build the synthetic scenario; identical output for identical arguments."""
    rng = random.Random(seed)
    counties = [f for row in GRID for f in row]
    users = [f"u{i:04d}" for i in range(n_users)]
    home = {u: (rng.choice(AFFECTED) if i % 3 == 0 else rng.choice(counties)) for i, u in enumerate(users)}
    spammers = set(rng.sample(users[1:], n_spammers))
    window_start = datetime(START.year, START.month, START.day, tzinfo=timezone.utc)
    span = timedelta(days=DURATION + 6)
    t0 = window_start - timedelta(days=3)

    tweets: list[Tweet] = []
    relevant: set[str] = set()
    coined: set[str] = set()
    conventional: set[str] = set()

    def place(u: str) -> tuple[float | None, float | None, str | None]:
        sq = county_square(home[u])
        lon = rng.uniform(sq[0][0] + 0.01, sq[1][0] - 0.01)
        lat = rng.uniform(sq[0][1] + 0.01, sq[2][1] - 0.01)
        if rng.random() < 0.2:
            return None, None, home[u]
        return round(lat, 5), round(lon, 5), None

    n_spam = 0
    spam_days = {u: window_start + timedelta(days=rng.randrange(DURATION)) for u in sorted(spammers)}
    for u in sorted(spammers):
        for _ in range(rng.randint(18, 30)):
            n_spam += 1
            lat, lon, fips = place(u)
            ts = spam_days[u] + timedelta(seconds=rng.randrange(86400))
            tweets.append(Tweet(f"s{n_spam:05d}", u, ts, _fill(rng, rng.choice(SPAM_TEMPLATES)), lat, lon, False, fips))

    normal_users = [u for u in users if u not in spammers]
    for i in range(n_tweets - n_spam):
        tid = f"t{i:05d}"
        u = rng.choice(normal_users)
        lat, lon, fips = place(u)
        in_affected = home[u] in AFFECTED
        rate = affected_relevance if in_affected else unaffected_relevance
        is_rel = rng.random() < rate
        if is_rel:
            # relevant chatter clusters right after the shock
            ts = QUAKE_AT + timedelta(seconds=int(rng.expovariate(1 / (2.5 * 86400))))
            if ts >= window_start + timedelta(days=DURATION):
                ts = QUAKE_AT + timedelta(seconds=rng.randrange(3600 * 6))
            hours = (ts - QUAKE_AT).total_seconds() / 3600
            mood = "neg" if rng.random() < (0.85 if hours < 24 else 0.35) else "pos"
            r = rng.random()
            if r < coined_fraction:
                text = _fill(rng, rng.choice(COINED_TEMPLATES), mood, tag=rng.choice(COINED_TAGS))
                coined.add(tid)
            elif r < coined_fraction + semantic_fraction:
                text = _fill(rng, rng.choice(SEMANTIC_TEMPLATES), mood)
            else:
                text = _fill(rng, rng.choice(CONVENTIONAL_TEMPLATES), mood)
                conventional.add(tid)
            relevant.add(tid)
        else:
            ts = t0 + timedelta(seconds=rng.randrange(int(span.total_seconds())))
            if rng.random() < 0.02:
                text = _fill(rng, rng.choice(FALSE_POSITIVE_TEMPLATES))
            else:
                text = _fill(rng, rng.choice(IRRELEVANT_TEMPLATES))
            if rng.random() < 0.1:
                text += f" #{rng.choice(FILLER)}"
        tweets.append(Tweet(tid, u, ts, text, lat, lon, rng.random() < 0.1, fips))

    tweets.sort(key=lambda t: (t.timestamp, t.tweet_id))
    return Scenario(
        corpus=Corpus(tweets),
        manifest=manifest(),
        geometry=geometry(),
        relevant_ids=relevant,
        coined_ids=coined,
        conventional_ids=conventional,
        spam_users=spammers,
        training_rows=_training_rows(rng),
        sentiment_train=_sentiment_rows(rng, 200),
        sentiment_test=_sentiment_rows(rng, 100),
        relevant_hashtags=set(COINED_TAGS) | {"earthquake", "napaearthquake"},
        irrelevant_hashtags={"quakeroats"},
    )


def _write_csv(path: Path, fields: list[str], rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


def write_scenario(sc: Scenario, directory: str | Path) -> dict[str, Path]:
    """Write every input file of the scenario; returns name -> path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": d / "corpus.jsonl",
        "manifest": d / "manifest.json",
        "geometry": d / "counties.geojson",
        "crisislex": d / "train_crisislex.csv",
        "crowdflower": d / "train_crowdflower.csv",
        "sentiment_train": d / "sentiment_train.csv",
        "sentiment_test": d / "sentiment_test.csv",
    }
    write_corpus(sc.corpus, paths["corpus"])
    paths["manifest"].write_text(json.dumps(sc.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["geometry"].write_text(json.dumps(sc.geometry, sort_keys=True) + "\n", encoding="utf-8")
    _write_csv(paths["crisislex"], ["text", "label", "type"], sc.training_rows["crisislex"])
    _write_csv(paths["crowdflower"], ["text", "label", "confidence", "type"], sc.training_rows["crowdflower"])
    polarity = {"positive": "4", "negative": "0"}
    for key, rows in (("sentiment_train", sc.sentiment_train), ("sentiment_test", sc.sentiment_test)):
        _write_csv(paths[key], ["polarity", "text"], ({"polarity": polarity[lab], "text": t} for t, lab in rows))
    return paths

"""Tweet data model, JSONL ingestion, tokenization, hashtag dictionary and spam removal."""

from __future__ import annotations

import html
import json
import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from triage.errors import DataError

logger = logging.getLogger(__name__)

DEFAULT_SPAM_THRESHOLD = 15

# Emoticon/emoji -> word. ASCII emoticons only match when whitespace-delimited.
DEFAULT_EMOJI = {
    ":)": "happy",
    ":-)": "happy",
    ";)": "happy",
    ";-)": "happy",
    ":D": "happy",
    ":-D": "happy",
    "=)": "happy",
    ":(": "sad",
    ":-(": "sad",
    ":'(": "sad",
    "=(": "sad",
    ":/": "confused",
    ":-/": "confused",
    ":P": "playful",
    ":p": "playful",
    ":O": "surprised",
    ":o": "surprised",
    "<3": "love",
    "</3": "heartbroken",
    ":|": "neutral",
    "\U0001F600": "happy",
    "\U0001F602": "laugh",
    "\U0001F60A": "happy",
    "\U0001F622": "sad",
    "\U0001F62D": "cry",
    "\U0001F621": "angry",
    "\U0001F631": "scared",
    "\U0001F64F": "pray",
    "❤": "love",
    "\U0001F494": "heartbroken",
    "\U0001F525": "fire",
    "\U0001F30A": "water",
    "\U0001F44D": "good",
    "\U0001F44E": "bad",
}

_HTML_TAG = re.compile(r"</?[A-Za-z!][^<>]*>")
_TOKEN = re.compile(r"[#@]?[a-z0-9_]+")
_WORDISH = re.compile(r"^[A-Za-z0-9_#@]+$")


@dataclass(frozen=True)
class Tweet:
    tweet_id: str
    user_id: str
    timestamp: datetime
    text: str
    lat: float | None = None
    lon: float | None = None
    is_retweet: bool = False
    county_fips: str | None = None

    @property
    def day(self) -> date:
        return self.timestamp.astimezone(timezone.utc).date()

    def to_record(self) -> dict:
        rec = {
            "id": self.tweet_id,
            "user": self.user_id,
            "ts": format_ts(self.timestamp),
            "text": self.text,
            "rt": self.is_retweet,
        }
        if self.lat is not None:
            rec["lat"] = self.lat
            rec["lon"] = self.lon
        if self.county_fips is not None:
            rec["fips"] = self.county_fips
        return rec


@dataclass(frozen=True)
class LineError:
    line: int
    message: str


class Corpus:
    """Ordered tweets with user and UTC-day indexes."""

    def __init__(self, tweets: Iterable[Tweet] = (), errors: Sequence[LineError] = ()):
        self.tweets: tuple[Tweet, ...] = tuple(tweets)
        self.errors: list[LineError] = list(errors)
        self.by_id: dict[str, Tweet] = {}
        self.by_user: dict[str, list[str]] = defaultdict(list)
        self.by_day: dict[date, list[str]] = defaultdict(list)
        for t in self.tweets:
            if t.tweet_id in self.by_id:
                raise DataError(f"duplicate tweet id {t.tweet_id!r}")
            self.by_id[t.tweet_id] = t
            self.by_user[t.user_id].append(t.tweet_id)
            self.by_day[t.day].append(t.tweet_id)
        self.by_user = dict(self.by_user)
        self.by_day = dict(self.by_day)

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[Tweet]:
        return iter(self.tweets)

    def __contains__(self, tweet_id: object) -> bool:
        return tweet_id in self.by_id

    def ids(self) -> set[str]:
        return set(self.by_id)

    def subset(self, keep: Iterable[str]) -> "Corpus":
        keep = set(keep)
        return Corpus(t for t in self.tweets if t.tweet_id in keep)

    def sorted(self) -> "Corpus":
        """Copy ordered by (timestamp, tweet_id)."""
        return Corpus(sorted(self.tweets, key=lambda t: (t.timestamp, t.tweet_id)))


@dataclass(frozen=True)
class SpamStats:
    spam_user_count: int
    total_user_count: int
    spam_tweet_count: int
    total_tweet_count: int

    def __post_init__(self) -> None:
        if not (0 <= self.spam_user_count <= self.total_user_count):
            raise ValueError("spam_user_count must be within [0, total_user_count]")
        if not (0 <= self.spam_tweet_count <= self.total_tweet_count):
            raise ValueError("spam_tweet_count must be within [0, total_tweet_count]")

    @property
    def spam_ratio(self) -> float:
        """Percent of tweets removed."""
        if self.total_tweet_count == 0:
            return 0.0
        return 100.0 * self.spam_tweet_count / self.total_tweet_count

    @property
    def user_ratio(self) -> float:
        """Percent of users flagged as spammers."""
        if self.total_user_count == 0:
            return 0.0
        return 100.0 * self.spam_user_count / self.total_user_count

    def to_dict(self) -> dict:
        return {
            "spam_user_count": self.spam_user_count,
            "total_user_count": self.total_user_count,
            "spam_tweet_count": self.spam_tweet_count,
            "total_tweet_count": self.total_tweet_count,
            "spam_ratio": self.spam_ratio,
            "user_ratio": self.user_ratio,
        }


# ---------------------------------------------------------------------------
# ingestion


def parse_ts(value: str) -> datetime:
    """ISO-8601 -> aware UTC datetime truncated to whole seconds. Naive input is taken as UTC."""
    s = value.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _opt_coord(rec: dict, key: str, bound: float) -> float | None:
    v = rec.get(key)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"{key} must be a number")
    v = float(v)
    if not -bound <= v <= bound:
        raise ValueError(f"{key}={v} out of range")
    return v


def _opt_str(v) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ValueError("expected a string")
    return str(v)


def tweet_from_record(rec: Mapping) -> Tweet:
    if not isinstance(rec, Mapping):
        raise ValueError("record is not a JSON object")
    for key in ("id", "user", "ts", "text"):
        if rec.get(key) is None:
            raise ValueError(f"missing field {key!r}")
    if not isinstance(rec["text"], str):
        raise ValueError("text must be a string")
    if str(rec["id"]).strip() == "" or str(rec["user"]).strip() == "":
        raise ValueError("id and user must be non-empty")
    lat = _opt_coord(rec, "lat", 90.0)
    lon = _opt_coord(rec, "lon", 180.0)
    if (lat is None) != (lon is None):
        raise ValueError("lat and lon must be given together")
    rt = rec.get("rt", False)
    if not isinstance(rt, bool):
        raise ValueError("rt must be a boolean")
    fips = rec.get("fips")
    if fips is not None:
        fips = _opt_str(fips)
        if not re.fullmatch(r"\d{5}", fips):
            raise ValueError(f"fips {fips!r} is not a 5-digit code")
    return Tweet(
        tweet_id=_opt_str(rec["id"]),
        user_id=_opt_str(rec["user"]),
        timestamp=parse_ts(str(rec["ts"])),
        text=rec["text"],
        lat=lat,
        lon=lon,
        is_retweet=rt,
        county_fips=fips,
    )


def load_corpus(path: str | Path) -> Corpus:
    """Read a JSONL tweet file. Bad lines are skipped and listed in ``Corpus.errors``."""
    path = Path(path)
    try:
        fh = path.open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc
    tweets: list[Tweet] = []
    seen: set[str] = set()
    errors: list[LineError] = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                t = tweet_from_record(json.loads(line))
                if t.tweet_id in seen:
                    raise ValueError(f"duplicate id {t.tweet_id!r}")
            except (ValueError, TypeError) as exc:
                errors.append(LineError(lineno, str(exc)))
                continue
            seen.add(t.tweet_id)
            tweets.append(t)
    for err in errors:
        logger.warning("%s:%d: %s", path, err.line, err.message)
    return Corpus(tweets, errors)


def write_corpus(corpus: Iterable[Tweet], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for t in corpus:
            fh.write(json.dumps(t.to_record(), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


# ---------------------------------------------------------------------------
# tokenization


def load_emoji_map(path: str | Path) -> dict[str, str]:
    """Read an ``emoji.map`` file of ``<emoji>\\t<word>`` lines."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            emo, word = line.split("\t", 1)
        except ValueError:
            raise DataError(f"{path}:{lineno}: expected '<emoji>\\t<word>'") from None
        if not emo or _WORDISH.match(emo):
            logger.warning("%s:%d: ignoring emoticon %r made of word characters", path, lineno, emo)
            continue
        table[emo] = word.strip()
    return table


class Tokenizer:
    """Tweet tokenizer with a configurable emoticon table."""

    def __init__(self, emoji: Mapping[str, str] | None = None):
        self.emoji = dict(DEFAULT_EMOJI if emoji is None else emoji)
        ascii_emo = sorted((e for e in self.emoji if e.isascii()), key=len, reverse=True)
        uni_emo = sorted((e for e in self.emoji if not e.isascii()), key=len, reverse=True)
        self._ascii_re = (
            re.compile(r"(?<!\S)(?:" + "|".join(map(re.escape, ascii_emo)) + r")(?!\S)")
            if ascii_emo
            else None
        )
        self._uni_re = re.compile("|".join(map(re.escape, uni_emo))) if uni_emo else None

    def __call__(self, text: str) -> list[str]:
        text = _HTML_TAG.sub(" ", html.unescape(text))
        if self._ascii_re is not None:
            text = self._ascii_re.sub(lambda m: f" {self.emoji[m.group(0)]} ", text)
        if self._uni_re is not None:
            text = self._uni_re.sub(lambda m: f" {self.emoji[m.group(0)]} ", text)
        text = text.encode("ascii", "ignore").decode("ascii").lower()
        return _TOKEN.findall(text)


_default_tokenizer = Tokenizer()


def tokenize(text: str) -> list[str]:
    return _default_tokenizer(text)


def segment_hashtag(tag: str, wordlist: set[str] | frozenset[str]) -> list[str]:
    """Greedy longest-prefix split of ``tag``; ``[tag]`` if the split cannot consume it all."""
    if not tag or not wordlist:
        return [tag]
    longest = max(map(len, wordlist))
    parts: list[str] = []
    i = 0
    while i < len(tag):
        for j in range(min(len(tag), i + longest), i, -1):
            if tag[i:j] in wordlist:
                parts.append(tag[i:j])
                i = j
                break
        else:
            return [tag]
    return parts


def segmentation_wordlist(
    docs: Iterable[Sequence[str]], extra: Iterable[str] = (), min_count: int = 2
) -> frozenset[str]:
    """Plain words seen at least ``min_count`` times, plus ``extra`` words (keywords, place names)."""
    counts = Counter(tok for doc in docs for tok in doc if tok[0] not in "#@")
    words = {w for w, c in counts.items() if c >= min_count and len(w) >= 2}
    for phrase in extra:
        words.update(w for w in phrase.lower().split() if w)
    return frozenset(words)


def learning_tokens(text: str, wordlist: frozenset[str], tokenizer: Tokenizer | None = None) -> list[str]:
    """Tokens for the learned classifiers: hashtags lose '#' and are segmented where possible."""
    out: list[str] = []
    for tok in (tokenizer or _default_tokenizer)(text):
        if tok.startswith("#"):
            out.extend(segment_hashtag(tok[1:], wordlist))
        else:
            out.append(tok)
    return out


def hashtags(tokens: Iterable[str]) -> list[str]:
    return [tok[1:] for tok in tokens if tok.startswith("#") and len(tok) > 1]


def build_hashtag_dict(corpus: Iterable[Tweet]) -> dict[str, int]:
    counts: Counter[str] = Counter()
    for t in corpus:
        counts.update(hashtags(tokenize(t.text)))
    return dict(counts)


# ---------------------------------------------------------------------------
# spam


def spam_users(corpus: Corpus, threshold: int = DEFAULT_SPAM_THRESHOLD) -> set[str]:
    """Users whose tweet count on any single UTC day is strictly above ``threshold``."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    per_day: Counter[tuple[str, date]] = Counter((t.user_id, t.day) for t in corpus)
    return {user for (user, _), n in per_day.items() if n > threshold}


def remove_spam(corpus: Corpus, threshold: int = DEFAULT_SPAM_THRESHOLD) -> tuple[Corpus, SpamStats]:
    spammers = spam_users(corpus, threshold)
    kept = Corpus(t for t in corpus if t.user_id not in spammers)
    stats = SpamStats(
        spam_user_count=len(spammers),
        total_user_count=len(corpus.by_user),
        spam_tweet_count=len(corpus) - len(kept),
        total_tweet_count=len(corpus),
    )
    return kept, stats

"""Keyword/hashtag matching classifier, hashtag review ledger and the conventional baseline."""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from triage.corpus import Corpus, Tweet, format_ts, hashtags, parse_ts, tokenize
from triage.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

CORE_KEYWORDS: dict[str, tuple[str, ...]] = {
    "earthquake": ("quake", "tremor", "foreshock", "aftershock"),
    "flood": ("flood", "storm", "typhoon", "tornado", "hurricane", "mudslide", "strong wind", "high water"),
    # verbatim, including "buring" and "framing"
    "wildfire": ("fire", "firing", "burn", "buring", "blaze", "blazing", "flame", "framing"),
}

STATUSES = ("candidate", "accepted", "rejected")
LEDGER_FIELDS = ["hashtag", "count", "status", "decided_at", "note"]
MATCH_MODES = ("substring", "token")


def keywords_for(types: Iterable[str], overrides: Sequence[str] | None = None) -> tuple[str, ...]:
    """Core keywords for one or more disaster types (a hybrid gets the union)."""
    if overrides:
        return tuple(dict.fromkeys(k.lower() for k in overrides))
    out: dict[str, None] = {}
    for t in sorted(types):
        try:
            out.update(dict.fromkeys(CORE_KEYWORDS[t]))
        except KeyError:
            raise ConfigError(f"no core keywords for disaster type {t!r}") from None
    return tuple(out)


def expand_candidates(keywords: Iterable[str], hashtag_dict: Mapping[str, int]) -> list[str]:
    """Hashtags containing any keyword (spaces removed) as a substring, by count desc then name."""
    compact = [k.replace(" ", "") for k in keywords]
    compact = [k for k in compact if k]
    hits = [tag for tag in hashtag_dict if any(k in tag for k in compact)]
    return sorted(hits, key=lambda tag: (-hashtag_dict[tag], tag))


# ---------------------------------------------------------------------------
# ledger


@dataclass
class LedgerEntry:
    hashtag: str
    count: int
    status: str = "candidate"
    decided_at: datetime | None = None
    note: str = ""


@dataclass
class HashtagLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen = set()
        for e in self.entries:
            if e.hashtag in seen:
                raise DataError(f"ledger lists hashtag {e.hashtag!r} twice")
            if e.status not in STATUSES:
                raise DataError(f"ledger entry {e.hashtag!r}: bad status {e.status!r}")
            if e.status != "candidate" and e.decided_at is None:
                raise DataError(f"ledger entry {e.hashtag!r}: decided entries need decided_at")
            seen.add(e.hashtag)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, tag: str) -> LedgerEntry | None:
        for e in self.entries:
            if e.hashtag == tag:
                return e
        return None

    def with_status(self, status: str) -> list[str]:
        return [e.hashtag for e in self.entries if e.status == status]

    @property
    def accepted(self) -> frozenset[str]:
        return frozenset(self.with_status("accepted"))

    @property
    def rejected(self) -> frozenset[str]:
        return frozenset(self.with_status("rejected"))

    def pending(self) -> list[LedgerEntry]:
        return [e for e in self.entries if e.status == "candidate"]

    def merge_candidates(self, candidates: Iterable[str], counts: Mapping[str, int]) -> int:
        """Append unseen candidates; existing entries keep their decisions. Returns number added."""
        known = {e.hashtag for e in self.entries}
        added = 0
        for tag in candidates:
            if tag not in known:
                self.entries.append(LedgerEntry(tag, int(counts.get(tag, 0))))
                known.add(tag)
                added += 1
        return added

    @classmethod
    def from_candidates(cls, candidates: Iterable[str], counts: Mapping[str, int]) -> "HashtagLedger":
        ledger = cls()
        ledger.merge_candidates(candidates, counts)
        return ledger


def ledger_to_csv(ledger: HashtagLedger) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LEDGER_FIELDS)
    for e in ledger.entries:
        w.writerow([e.hashtag, e.count, e.status, format_ts(e.decided_at) if e.decided_at else "", e.note])
    return buf.getvalue()


def save_ledger(ledger: HashtagLedger, path: str | Path) -> None:
    """Atomic write: a failed save leaves the previous file untouched."""
    path = Path(path)
    text = ledger_to_csv(ledger)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_ledger(path: str | Path) -> HashtagLedger:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read ledger {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return HashtagLedger()
    missing = set(LEDGER_FIELDS) - set(reader.fieldnames)
    if missing:
        raise DataError(f"{path}: ledger missing columns {sorted(missing)}")
    entries = []
    for row in reader:
        try:
            entries.append(
                LedgerEntry(
                    hashtag=row["hashtag"].lstrip("#").lower(),
                    count=int(row["count"]),
                    status=row["status"].strip().lower(),
                    decided_at=parse_ts(row["decided_at"]) if row["decided_at"] else None,
                    note=row["note"] or "",
                )
            )
        except ValueError as exc:
            raise DataError(f"{path}:{reader.line_num}: {exc}") from exc
    return HashtagLedger(entries)


@contextmanager
def ledger_lock(path: str | Path) -> Iterator[None]:
    """Exclusive advisory lock held for the whole review session."""
    import fcntl

    lock_path = Path(str(path) + ".lock")
    with open(lock_path, "w") as fh:
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise ConfigError(f"ledger {path} is locked by another review session") from None
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def sample_texts(corpus: Iterable[Tweet], tags: Iterable[str], k: int = 5) -> dict[str, list[str]]:
    """Up to ``k`` most recent tweet texts carrying each hashtag."""
    wanted = set(tags)
    found: dict[str, list[Tweet]] = {t: [] for t in wanted}
    for tw in corpus:
        for tag in set(hashtags(tokenize(tw.text))) & wanted:
            found[tag].append(tw)
    return {
        tag: [t.text for t in sorted(tws, key=lambda t: (t.timestamp, t.tweet_id), reverse=True)[:k]]
        for tag, tws in found.items()
    }


_KEYS = {"a": "accepted", "r": "rejected"}


def review(
    ledger: HashtagLedger,
    samples: Mapping[str, Sequence[str]],
    path: str | Path,
    prompt: Callable[[str], str] = input,
    echo: Callable[[str], None] = print,
    clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
) -> HashtagLedger:
    """Walk pending candidates, asking accept/reject/skip/quit for each.

    The ledger is written to ``path`` after every decision, so an interrupted
    session resumes at the first undecided candidate. ``prompt`` may be any
    callable returning one of ``a``, ``r``, ``s``, ``q``.
    """
    pending = ledger.pending()
    with ledger_lock(path):
        for i, entry in enumerate(pending, 1):
            echo(f"[{i}/{len(pending)}] #{entry.hashtag}  (count {entry.count})")
            for text in samples.get(entry.hashtag, ())[:5]:
                echo(f"    {text}")
            while True:
                try:
                    key = prompt("accept/reject/skip/quit [a/r/s/q]? ").strip().lower()[:1]
                except (EOFError, KeyboardInterrupt):
                    key = "q"
                if key in ("a", "r", "s", "q"):
                    break
                echo("please answer a, r, s or q")
            if key == "q":
                break
            if key == "s":
                continue
            entry.status = _KEYS[key]
            entry.decided_at = clock().replace(microsecond=0)
            save_ledger(ledger, path)
    return ledger


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class TermSet:
    keywords: tuple[str, ...]
    hashtags: frozenset[str] = frozenset()


def final_terms(keywords: Iterable[str], ledger: HashtagLedger | None) -> TermSet:
    accepted = ledger.accepted if ledger is not None else frozenset()
    return TermSet(tuple(k.lower() for k in keywords), accepted)


def _plain_tokens(tokens: Sequence[str]) -> list[str]:
    return [t for t in tokens if t[0] not in "#@"]


def _contains_phrase(tokens: Sequence[str], phrase: str) -> bool:
    words = phrase.split()
    n = len(words)
    return any(list(tokens[i : i + n]) == words for i in range(len(tokens) - n + 1))


def classify_matching(tweet: Tweet | str, terms: TermSet, mode: str = "substring") -> bool:
    text = tweet if isinstance(tweet, str) else tweet.text
    tokens = tokenize(text)
    if terms.hashtags and any(tag in terms.hashtags for tag in hashtags(tokens)):
        return True
    if mode == "substring":
        low = text.lower()
        return any(k in low for k in terms.keywords)
    if mode == "token":
        plain = _plain_tokens(tokens)
        return any(_contains_phrase(plain, k) for k in terms.keywords)
    raise ConfigError(f"keyword_match must be one of {MATCH_MODES}, got {mode!r}")


def match_corpus(corpus: Iterable[Tweet], terms: TermSet, mode: str = "substring") -> set[str]:
    return {t.tweet_id for t in corpus if classify_matching(t, terms, mode)}


def conventional_hashtags(types: Iterable[str], area_name: str | None, official_name: str | None) -> frozenset[str]:
    tags = set()
    for t in types:
        tags.add(t)
        if area_name:
            tags.add(f"{area_name}{t}")
    if official_name:
        tags.add(official_name)
    return frozenset(tags)


def classify_conventional(
    tweet: Tweet | str,
    manifest,
    area_name: str | None = None,
    official_name: str | None = None,
) -> bool:
    """Baseline: type / area+type / official-name hashtags, or a core keyword as a whole token."""
    text = tweet if isinstance(tweet, str) else tweet.text
    area_name = area_name if area_name is not None else manifest.area_name
    official_name = official_name if official_name is not None else manifest.official_name
    tags = conventional_hashtags(manifest.types, area_name, official_name)
    tokens = tokenize(text)
    if any(tag in tags for tag in hashtags(tokens)):
        return True
    plain = _plain_tokens(tokens)
    return any(_contains_phrase(plain, k) for k in keywords_for(manifest.types, manifest.keyword_overrides))


def conventional_corpus(corpus: Iterable[Tweet], manifest, area_name=None, official_name=None) -> set[str]:
    return {t.tweet_id for t in corpus if classify_conventional(t, manifest, area_name, official_name)}


def improvement(n_ours: int, n_conventional: int) -> float | None:
    """Percent gain of the improved matcher over the baseline; None when the baseline found nothing."""
    if n_conventional <= 0:
        return None
    return 100.0 * (n_ours - n_conventional) / n_conventional

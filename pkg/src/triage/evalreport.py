"""Comparison metrics (agreement set, recall, relevance ratio) and report files."""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from triage.errors import DataError, InvariantError

T = TypeVar("T")

METHODS = ("matching", "learning")
REGIONS = ("affected", "unaffected")
RESULT_FIELDS = [
    "disaster_id",
    "region",
    "n_matching",
    "n_learning",
    "n_agreement",
    "recall_matching",
    "recall_learning",
    "relevance_matching",
    "relevance_learning",
    "spam_ratio",
]
IMPROVEMENT_FIELDS = ["disaster_id", "region", "n_improved", "n_conventional", "improvement"]
NA = "n/a"
AVERAGE_ID = "average"

# Written next to every results file so nobody reads the recall column as standard recall.
RECALL_CONVENTION = (
    "recall_* = 100*|agreement|/|retrieved|, agreement = matching AND learning sets used as ground truth; "
    "precision under this convention is 1 by construction"
)


def agreement(a: Iterable[str], b: Iterable[str]) -> set[str]:
    return set(a) & set(b)


def paper_recall(retrieved: int | set, agreed: int | set) -> float | None:
    """Percentage of the retrieved tweets that fall in the agreement set; None when nothing was retrieved.

    Accepts either the sets themselves or their sizes.
    """
    if isinstance(retrieved, (set, frozenset)):
        if not isinstance(agreed, (set, frozenset)):
            raise TypeError("pass both sets or both counts")
        if not agreed <= retrieved:
            raise InvariantError("agreement set is not contained in the retrieved set")
        n_ret, n_agr = len(retrieved), len(agreed)
    else:
        n_ret, n_agr = int(retrieved), int(agreed)
        if not 0 <= n_agr <= n_ret:
            raise InvariantError(f"agreed count {n_agr} outside [0, {n_ret}]")
    if n_ret == 0:
        return None
    return 100.0 * n_agr / n_ret


def relevance_ratio(n_relevant: int, n_total: int) -> float | None:
    """Relevant tweets as a percentage of the despammed region total."""
    if n_total <= 0:
        return None
    if not 0 <= n_relevant <= n_total:
        raise InvariantError(f"{n_relevant} relevant tweets out of {n_total}")
    return 100.0 * n_relevant / n_total


def precision_recall(predicted: Iterable[str], truth: Iterable[str], universe: Iterable[str] | None = None):
    """Standard (precision, recall) as fractions; either is None when its denominator is empty."""
    predicted, truth = set(predicted), set(truth)
    if universe is not None:
        universe = set(universe)
        if not (predicted <= universe and truth <= universe):
            raise InvariantError("predicted and truth sets must lie inside the universe")
    hit = len(predicted & truth)
    precision = hit / len(predicted) if predicted else None
    recall = hit / len(truth) if truth else None
    return precision, recall


def split_labeled(examples: Sequence[T], ratio: float = 0.5, seed: int = 0) -> tuple[list[T], list[T]]:
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must lie in (0, 1), got {ratio}")
    items = list(examples)
    random.Random(seed).shuffle(items)
    cut = math.floor(ratio * len(items))
    return items[:cut], items[cut:]


@dataclass(frozen=True)
class MethodResult:
    method: str
    region: str
    relevant_ids: frozenset[str]
    total_in_region: int

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {REGIONS}")
        if len(self.relevant_ids) > self.total_in_region:
            raise InvariantError(f"{self.method}/{self.region}: more relevant tweets than tweets in the region")

    @property
    def relevance(self) -> float | None:
        return relevance_ratio(len(self.relevant_ids), self.total_in_region)


@dataclass(frozen=True)
class ComparisonRow:
    disaster_id: str
    region: str
    n_matching: int
    n_learning: int
    n_agreement: int
    recall_matching: float | None
    recall_learning: float | None
    relevance_matching: float | None
    relevance_learning: float | None
    spam_ratio: float | None

    def __post_init__(self) -> None:
        if self.n_agreement > min(self.n_matching, self.n_learning):
            raise InvariantError("agreement larger than one of the retrieved sets")
        for r in (self.recall_matching, self.recall_learning):
            if r is not None and not 0.0 <= r <= 100.0:
                raise InvariantError(f"recall {r} outside [0, 100]")


def compare(disaster_id: str, matching: MethodResult, learning: MethodResult, spam_ratio: float | None) -> ComparisonRow:
    if matching.region != learning.region or matching.total_in_region != learning.total_in_region:
        raise InvariantError("matching and learning results describe different regions")
    agreed = agreement(matching.relevant_ids, learning.relevant_ids)
    return ComparisonRow(
        disaster_id,
        matching.region,
        len(matching.relevant_ids),
        len(learning.relevant_ids),
        len(agreed),
        paper_recall(set(matching.relevant_ids), agreed),
        paper_recall(set(learning.relevant_ids), agreed),
        matching.relevance,
        learning.relevance,
        spam_ratio,
    )


# ---------------------------------------------------------------------------
# emission


def _fmt(v) -> str:
    if v is None:
        return NA
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mean(values) -> float | None:
    vals = [float(v) for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def average_row(rows: Sequence[ComparisonRow]) -> list:
    """Unweighted column means over all rows (n/a cells are skipped)."""
    out = [AVERAGE_ID, "all"]
    for name in RESULT_FIELDS[2:]:
        out.append(_mean(getattr(r, name) for r in rows))
    return out


def _write_csv(path: Path, header: list[str], rows: Iterable[Sequence]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def write_meta(path: str | Path, config_hash: str | None, **extra) -> Path:
    """Sidecar ``<file>.meta.json`` holding the config hash (no timestamps, so reruns stay identical)."""
    meta_path = Path(f"{path}.meta.json")
    meta = {"file": Path(path).name, "config_hash": config_hash, **extra}
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return meta_path


def emit_results(rows: Sequence[ComparisonRow], path: str | Path, config_hash: str | None = None) -> Path:
    """Results table (one line per disaster and region, plus the average line when non-empty)."""
    path = Path(path)
    body = [[getattr(r, f) for f in RESULT_FIELDS] for r in rows]
    if rows:
        body.append(average_row(rows))
    _write_csv(path, RESULT_FIELDS, body)
    write_meta(path, config_hash, recall_convention=RECALL_CONVENTION, averages="unweighted mean over rows")
    return path


def _int(v: str) -> int:
    return int(v)


def _opt_float(v: str) -> float | None:
    return None if v == NA else float(v)


def read_results(path: str | Path) -> tuple[list[ComparisonRow], dict | None]:
    """Parse a results CSV back into rows; the average line is returned separately as a dict."""
    rows, avg = [], None
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_FIELDS:
            raise DataError(f"{path}: unexpected results header {reader.fieldnames}")
        for rec in reader:
            if rec["disaster_id"] == AVERAGE_ID:
                avg = {k: (v if k in ("disaster_id", "region") else _opt_float(v)) for k, v in rec.items()}
                continue
            kw = {}
            for f in fields(ComparisonRow):
                v = rec[f.name]
                if f.name in ("disaster_id", "region"):
                    kw[f.name] = v
                elif f.name.startswith("n_"):
                    kw[f.name] = _int(v)
                else:
                    kw[f.name] = _opt_float(v)
            rows.append(ComparisonRow(**kw))
    return rows, avg


def emit_improvement(records: Sequence[tuple[str, str, int, int, float | None]], path: str | Path, config_hash=None) -> Path:
    """Bar-chart data: improved matching vs the conventional hashtag baseline, per disaster and region."""
    path = Path(path)
    _write_csv(path, IMPROVEMENT_FIELDS, records)
    write_meta(path, config_hash, improvement="100*(n_improved - n_conventional)/n_conventional")
    return path

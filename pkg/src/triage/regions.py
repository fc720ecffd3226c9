"""Affected/unaffected partition of a corpus by county geometry and disaster window."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

from triage.corpus import Corpus, Tweet
from triage.errors import ConfigError, DataError

DISASTER_TYPES = ("earthquake", "flood", "wildfire")

Ring = list[tuple[float, float]]


@dataclass(frozen=True)
class DisasterManifest:
    disaster_id: str
    fema_code: str
    types: frozenset[str]
    start_date: date
    duration_days: int
    affected_fips: frozenset[str]
    vicinity_fips: frozenset[str] | None = None
    keyword_overrides: tuple[str, ...] | None = None
    area_name: str | None = None
    official_name: str | None = None

    def __post_init__(self) -> None:
        if not self.types:
            raise ConfigError(f"{self.disaster_id}: manifest needs at least one disaster type")
        unknown = set(self.types) - set(DISASTER_TYPES)
        if unknown:
            raise ConfigError(f"{self.disaster_id}: unknown disaster types {sorted(unknown)}")
        if self.duration_days < 1:
            raise ConfigError(f"{self.disaster_id}: duration_days must be >= 1")
        if self.vicinity_fips is not None and not self.affected_fips <= self.vicinity_fips:
            raise ConfigError(f"{self.disaster_id}: affected counties must be part of the vicinity")

    @property
    def window(self) -> tuple[datetime, datetime]:
        start = datetime.combine(self.start_date, time(0), tzinfo=timezone.utc)
        return start, start + timedelta(days=self.duration_days)

    @property
    def states(self) -> set[str]:
        return {f[:2] for f in self.affected_fips}

    def with_vicinity(self, known_fips: Iterable[str]) -> "DisasterManifest":
        """Fill a missing vicinity with every known county in the affected counties' states."""
        if self.vicinity_fips is not None:
            return self
        states = self.states
        vicinity = frozenset(f for f in known_fips if f[:2] in states) | self.affected_fips
        return replace(self, vicinity_fips=vicinity)

    @classmethod
    def from_dict(cls, d: dict) -> "DisasterManifest":
        try:
            types = d["types"]
            if isinstance(types, str):
                types = [t.strip() for t in types.split("+")]
            vic = d.get("vicinity_fips")
            kw = d.get("keyword_overrides")
            return cls(
                disaster_id=str(d["disaster_id"]),
                fema_code=str(d["fema_code"]),
                types=frozenset(t.lower() for t in types),
                start_date=date.fromisoformat(str(d["start_date"])[:10]),
                duration_days=int(d["duration_days"]),
                affected_fips=frozenset(str(f) for f in d["affected_fips"]),
                vicinity_fips=None if vic is None else frozenset(str(f) for f in vic),
                keyword_overrides=None if kw is None else tuple(k.lower() for k in kw),
                area_name=d.get("area_name"),
                official_name=d.get("official_name"),
            )
        except KeyError as exc:
            raise ConfigError(f"manifest is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad manifest: {exc}") from None

    def to_dict(self) -> dict:
        d = {
            "disaster_id": self.disaster_id,
            "fema_code": self.fema_code,
            "types": sorted(self.types),
            "start_date": self.start_date.isoformat(),
            "duration_days": self.duration_days,
            "affected_fips": sorted(self.affected_fips),
        }
        if self.vicinity_fips is not None:
            d["vicinity_fips"] = sorted(self.vicinity_fips)
        if self.keyword_overrides is not None:
            d["keyword_overrides"] = list(self.keyword_overrides)
        for key in ("area_name", "official_name"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d


def load_manifest(path: str | Path) -> DisasterManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    return DisasterManifest.from_dict(data)


@dataclass
class CountyGeometry:
    """FIPS -> polygons; each polygon is a list of closed (lon, lat) rings (outer ring first)."""

    polygons: dict[str, list[list[Ring]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for fips, polys in self.polygons.items():
            for poly in polys:
                for ring in poly:
                    if len(set(ring)) < 3 or ring[0] != ring[-1]:
                        raise DataError(f"county {fips}: rings must be closed with >= 3 distinct vertices")
        self._order = sorted(self.polygons)
        self._bbox = {
            f: (
                min(x for poly in ps for x, _ in poly[0]),
                min(y for poly in ps for _, y in poly[0]),
                max(x for poly in ps for x, _ in poly[0]),
                max(y for poly in ps for _, y in poly[0]),
            )
            for f, ps in self.polygons.items()
            if ps
        }

    def __contains__(self, fips: object) -> bool:
        return fips in self.polygons

    def fips(self) -> list[str]:
        return list(self._order)


def _close(ring: Sequence[Sequence[float]]) -> Ring:
    pts = [(float(p[0]), float(p[1])) for p in ring]
    if pts and pts[0] != pts[-1]:
        pts.append(pts[0])
    return pts


def load_geometry(path: str | Path) -> CountyGeometry:
    """Read a GeoJSON FeatureCollection of Polygon/MultiPolygon features keyed by property ``FIPS``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read geometry {path}: {exc}") from exc
    polys: dict[str, list[list[Ring]]] = {}
    for feat in data.get("features", []):
        fips = str((feat.get("properties") or {}).get("FIPS", "")).zfill(5)
        geom = feat.get("geometry") or {}
        if geom.get("type") == "Polygon":
            parts = [geom["coordinates"]]
        elif geom.get("type") == "MultiPolygon":
            parts = geom["coordinates"]
        else:
            raise DataError(f"county {fips}: unsupported geometry {geom.get('type')!r}")
        polys.setdefault(fips, []).extend([_close(r) for r in part] for part in parts)
    return CountyGeometry(polys)


def _on_segment(x: float, y: float, a: tuple[float, float], b: tuple[float, float], eps: float = 1e-12) -> bool:
    (x1, y1), (x2, y2) = a, b
    cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
    scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
    if abs(cross) > eps * scale * scale:
        return False
    return min(x1, x2) - eps <= x <= max(x1, x2) + eps and min(y1, y2) - eps <= y <= max(y1, y2) + eps


def point_in_polygon(x: float, y: float, rings: Sequence[Ring]) -> bool:
    """Even-odd ray casting over all rings (holes included); points on an edge count as inside."""
    inside = False
    for ring in rings:
        for a, b in zip(ring, ring[1:]):
            if _on_segment(x, y, a, b):
                return True
            (x1, y1), (x2, y2) = a, b
            if (y1 > y) != (y2 > y) and x < (x2 - x1) * (y - y1) / (y2 - y1) + x1:
                inside = not inside
    return inside


def assign_county(lat: float, lon: float, geom: CountyGeometry) -> str | None:
    for fips in geom._order:
        box = geom._bbox.get(fips)
        if box is None or not (box[0] <= lon <= box[2] and box[1] <= lat <= box[3]):
            continue
        if any(point_in_polygon(lon, lat, poly) for poly in geom.polygons[fips]):
            return fips
    return None


@dataclass
class RegionPartition:
    affected: Corpus
    unaffected: Corpus
    dropped_outside: int
    dropped_out_of_window: int

    def summary(self) -> dict:
        return {
            "affected": len(self.affected),
            "unaffected": len(self.unaffected),
            "dropped_outside": self.dropped_outside,
            "dropped_out_of_window": self.dropped_out_of_window,
        }


def partition(corpus: Corpus, manifest: DisasterManifest, geom: CountyGeometry | None = None) -> RegionPartition:
    """Split in-window tweets into affected and nearby-unaffected counties.

    Output corpora are ordered by (timestamp, tweet_id) so that the result does
    not depend on input order.
    """
    geom = geom or CountyGeometry()
    manifest = manifest.with_vicinity(geom.fips() + sorted({t.county_fips for t in corpus if t.county_fips}))
    vicinity = manifest.vicinity_fips or frozenset()
    start, end = manifest.window

    needs_lookup = any(t.county_fips is None and t.lat is not None for t in corpus)
    missing = sorted(f for f in vicinity if f not in geom)
    if needs_lookup and missing:
        raise ConfigError(
            f"{manifest.disaster_id}: no geometry for counties {missing[:5]}"
            f"{'...' if len(missing) > 5 else ''} and some tweets carry no county FIPS"
        )

    affected: list[Tweet] = []
    unaffected: list[Tweet] = []
    outside = out_of_window = 0
    for t in corpus:
        if not start <= t.timestamp < end:
            out_of_window += 1
            continue
        county = t.county_fips
        if county is None and t.lat is not None:
            county = assign_county(t.lat, t.lon, geom)
        if county in manifest.affected_fips:
            affected.append(t)
        elif county in vicinity:
            unaffected.append(t)
        else:
            outside += 1

    def key(t: Tweet):
        return (t.timestamp, t.tweet_id)

    return RegionPartition(
        affected=Corpus(sorted(affected, key=key)),
        unaffected=Corpus(sorted(unaffected, key=key)),
        dropped_outside=outside,
        dropped_out_of_window=out_of_window,
    )

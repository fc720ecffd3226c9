from __future__ import annotations

import json
import math
import random
from datetime import timedelta

import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import T0
from triage.corpus import Corpus, Tweet
from triage.errors import ConfigError, DataError
from triage.regions import (
    CountyGeometry,
    DisasterManifest,
    assign_county,
    load_geometry,
    load_manifest,
    partition,
    point_in_polygon,
)

CA_FIPS = [f"06{i:03d}" for i in range(1, 116, 2)]  # the 58 California county codes


def square(x0, y0, size=1.0):
    return [(x0, y0), (x0 + size, y0), (x0 + size, y0 + size), (x0, y0 + size), (x0, y0)]


def napa(**over) -> DisasterManifest:
    d = {
        "disaster_id": "napa_earthquake",
        "fema_code": "4193",
        "types": ["earthquake"],
        "start_date": "2014-08-24",
        "duration_days": 16,
        "affected_fips": ["06055", "06097"],
    }
    d.update(over)
    return DisasterManifest.from_dict(d)


def tweet(i, ts=T0, lat=None, lon=None, fips=None):
    return Tweet(str(i), "u", ts, "x", lat, lon, False, fips)


# --- point in polygon ------------------------------------------------------


def test_unit_square_examples():
    geom = CountyGeometry({"06055": [[square(0, 0)]]})
    assert assign_county(0.5, 0.5, geom) == "06055"
    assert assign_county(0.5, 1.5, geom) is None
    assert assign_county(0.5, 1.0, geom) == "06055"  # lat 0.5, lon 1.0: on the east edge


def test_vertex_counts_as_inside():
    assert point_in_polygon(0.0, 0.0, [square(0, 0)])


def test_hole_excluded():
    rings = [square(0, 0, 4), square(1, 1, 2)]
    assert point_in_polygon(0.5, 0.5, rings)
    assert not point_in_polygon(2.0, 2.0, rings)
    assert point_in_polygon(1.0, 2.0, rings)  # on the hole's edge


def test_shared_edge_goes_to_lowest_fips():
    geom = CountyGeometry({"06097": [[square(1, 0)]], "06055": [[square(0, 0)]]})
    assert assign_county(0.5, 1.0, geom) == "06055"


def test_multipolygon_county():
    geom = CountyGeometry({"06001": [[square(0, 0)], [square(5, 5)]]})
    assert assign_county(5.5, 5.5, geom) == "06001"
    assert assign_county(3.0, 3.0, geom) is None


def test_unclosed_ring_rejected():
    with pytest.raises(DataError):
        CountyGeometry({"06001": [[[(0, 0), (1, 0), (1, 1)]]]})


def convex_polygon(rng: random.Random, n: int):
    cx, cy = rng.uniform(-5, 5), rng.uniform(-5, 5)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    pts = [(cx + rng.uniform(0.5, 3) * math.cos(a), cy + rng.uniform(0.5, 3) * math.sin(a)) for a in angles]
    # hull by gift wrapping keeps it convex even when radii vary
    hull = []
    start = min(pts)
    p = start
    while True:
        hull.append(p)
        q = pts[0] if pts[0] != p else pts[1]
        for r in pts:
            cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
            if cross < 0:
                q = r
        p = q
        if p == start:
            break
    return hull + [hull[0]]


@given(st.integers(0, 10_000))
def test_ray_casting_matches_winding_number(seed):
    rng = random.Random(seed)
    ring = convex_polygon(rng, rng.randint(3, 9))
    for _ in range(10):
        x, y = rng.uniform(-9, 9), rng.uniform(-9, 9)
        assert point_in_polygon(x, y, [ring]) == (oracles.winding_number(x, y, ring) != 0)


def test_geojson_loading(tmp_path):
    fc = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "properties": {"FIPS": "6055"},
             "geometry": {"type": "Polygon", "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1]]]}},
        ],
    }
    p = tmp_path / "g.geojson"
    p.write_text(json.dumps(fc))
    geom = load_geometry(p)
    assert geom.fips() == ["06055"]
    assert assign_county(0.5, 0.5, geom) == "06055"


# --- manifest and partition ------------------------------------------------


def test_napa_manifest_shape(tmp_path):
    m = napa(vicinity_fips=CA_FIPS, area_name="napa")
    assert m.fema_code == "4193"
    assert m.window == (T0, T0 + timedelta(days=16))
    assert len(m.affected_fips) == 2 and len(m.vicinity_fips) == 58
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m.to_dict()))
    assert load_manifest(p) == m


def test_vicinity_defaults_to_state_counties():
    m = napa().with_vicinity(CA_FIPS + ["32005", "41001"])
    assert m.vicinity_fips == frozenset(CA_FIPS)


@pytest.mark.parametrize(
    "over",
    [{"types": []}, {"types": ["volcano"]}, {"duration_days": 0}, {"vicinity_fips": ["06001"]}],
)
def test_bad_manifest(over):
    with pytest.raises(ConfigError):
        napa(**over)


def test_partition_examples():
    geom = CountyGeometry({"06055": [[square(0, 0)]], "06001": [[square(1, 0)]], "32005": [[square(2, 0)]]})
    tweets = Corpus(
        [
            tweet(1, T0 + timedelta(hours=1), 0.5, 0.5),  # affected
            tweet(2, T0 + timedelta(hours=1), 0.5, 1.5),  # vicinity
            tweet(3, T0 + timedelta(hours=1), 0.5, 2.5),  # other state
            tweet(4, T0 - timedelta(seconds=1), 0.5, 0.5),  # before window
            tweet(5, T0 + timedelta(days=16), 0.5, 0.5),  # window end is exclusive
            tweet(6, T0 + timedelta(hours=2), fips="06055"),  # pre-tagged, no coordinates
        ]
    )
    part = partition(tweets, napa(affected_fips=["06055"]), geom)
    assert [t.tweet_id for t in part.affected] == ["1", "6"]
    assert [t.tweet_id for t in part.unaffected] == ["2"]
    assert part.dropped_outside == 1 and part.dropped_out_of_window == 2


def test_missing_vicinity_geometry_is_config_error():
    geom = CountyGeometry({"06055": [[square(0, 0)]]})
    tweets = Corpus([tweet(1, T0, 0.5, 0.5)])
    with pytest.raises(ConfigError):
        partition(tweets, napa(affected_fips=["06055"], vicinity_fips=["06055", "06001"]), geom)


@given(st.lists(st.tuples(st.floats(-0.5, 3.5), st.floats(-0.5, 1.5), st.integers(-2, 18)), max_size=60),
       st.randoms())
def test_partition_conserves_and_ignores_order(rows, rnd):
    geom = CountyGeometry({"06055": [[square(0, 0)]], "06001": [[square(1, 0)]], "32005": [[square(2, 0)]]})
    tweets = [tweet(i, T0 + timedelta(days=d), lat, lon) for i, (lon, lat, d) in enumerate(rows)]
    man = napa(affected_fips=["06055"])
    a = partition(Corpus(tweets), man, geom)
    total = len(a.affected) + len(a.unaffected) + a.dropped_outside + a.dropped_out_of_window
    assert total == len(tweets)
    rnd.shuffle(tweets)
    b = partition(Corpus(tweets), man, geom)
    assert list(a.affected) == list(b.affected) and list(a.unaffected) == list(b.unaffected)

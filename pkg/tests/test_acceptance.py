"""Acceptance criteria 1-10 at their stated tolerances.

Run on their own with ``pytest tests/test_acceptance.py -v``; the terminal
summary lists one PASS/FAIL line per criterion.
"""
import csv
import filecmp
import json
import math
import os
import random
import shutil
import time
from datetime import timedelta

import numpy as np
import pytest

from ldit import cli
from ldit.catalog import CatalogEntry, load_ground_stations, read_tle_file
from ldit.config import load_config
from ldit.detectability import score_detectability
from ldit.identifiability import bisecting_kmeans, cluster_identifiability, score_identifiability
from ldit.ledger import Ledger, append_block, verify_bytes, verify_chain, HEADER
from ldit.orbit import MU_EARTH, StateVector, angular_momentum, propagate, propagate_minutes, semi_major_axis_from_mean_motion
from ldit.pipeline import momentum_points
from ldit.scoring import ROLES, ScoreCard, combine_dit, entity_scores
from ldit.trackability import TrackabilityConfig, combine_trackability, monte_carlo_trackability, predict_passes

from conftest import data_path
from test_orbit import kepler_state, rotate
from test_trackability import dense_oracle

CONFIG = os.path.join(os.path.dirname(__file__), "..", "configs", "fixture.toml")


def criterion(n, title):
    return pytest.mark.criterion(n, title)


# 1 -------------------------------------------------------------------------

@criterion(1, "detectability matches a one-line oracle; extremes exact; < 1 s")
def test_detectability_oracle():
    t0 = time.perf_counter()
    r = np.random.default_rng(1).uniform(-40.0, 40.0, 1000)
    scores = np.array([s.s_d for s in score_detectability([CatalogEntry(i, rcs_dbsm=float(v)) for i, v in enumerate(r)])])
    elapsed = time.perf_counter() - t0
    oracle = [(x - min(r)) / (max(r) - min(r)) for x in r]
    assert np.max(np.abs(scores - oracle)) <= 1e-12
    assert scores[np.argmax(r)] == 1.0 and scores[np.argmin(r)] == 0.0
    assert elapsed < 1.0


# 2 -------------------------------------------------------------------------

@criterion(2, "C_I formula; k = 60 on the fixture gives 60 clusters and S_I = 1 for the smallest")
def test_identifiability_formula_and_fixture():
    assert cluster_identifiability(1) == 0.5
    assert cluster_identifiability(4) == 1 / 3
    vals = [cluster_identifiability(n) for n in range(1, 10 ** 4 + 1)]
    assert all(a > b for a, b in zip(vals, vals[1:]))

    tles = read_tle_file(data_path("catalog_1000.tle")).records
    model = bisecting_kmeans(momentum_points(tles), 60, seed=42, ids=[t.norad_id for t in tles])
    assert len(set(model.labels.tolist())) == 60 and (model.sizes > 0).all()
    smallest = int(model.sizes.min())
    assert list(model.sizes).count(smallest) == 1
    target = int(np.argmin(model.sizes))
    for s in score_identifiability(model):
        if s.cluster == target:
            assert s.s_i == 1.0


# 3 -------------------------------------------------------------------------

@criterion(3, "bisecting k-means recovers three separated blobs over 10 seeds; < 5 s")
def test_clustering_oracle():
    t0 = time.perf_counter()
    for seed in range(10):
        rng = np.random.default_rng(seed)
        spread = 1.0
        means = rng.uniform(-1e4, 1e4, 3) + 150.0 * spread * np.eye(3)
        for a in range(3):
            for b in range(a):
                assert np.linalg.norm(means[a] - means[b]) >= 100 * spread
        truth = np.repeat(np.arange(3), 50)
        pts = means[truth] + rng.normal(0, spread, (150, 3))
        labels = bisecting_kmeans(pts, 3, seed=seed).labels
        mapping = {}
        for t, l in zip(truth, labels):
            mapping.setdefault(int(l), int(t))
        agreement = np.mean([mapping[int(l)] == t for t, l in zip(truth, labels)])
        assert agreement == 1.0 and len(mapping) == 3
    assert time.perf_counter() - t0 < 5.0


# 4 -------------------------------------------------------------------------

@criterion(4, "|l| conserved on a two-body e = 0.3 orbit; SGP4 |l| within 1% of elements")
def test_angular_momentum_conservation():
    a, e = 15000.0, 0.3
    mags = []
    for nu in np.linspace(0, 2 * math.pi, 100, endpoint=False):
        r, v = kepler_state(a, e, nu)
        mags.append(angular_momentum(StateVector(None, rotate(r, 0.5, 2.0, 1.0), rotate(v, 0.5, 2.0, 1.0))).magnitude)
    mags = np.array(mags)
    assert (mags.max() - mags.min()) / mags.mean() < 1e-9

    for t in read_tle_file(data_path("catalog_1000.tle")).records:
        h_sgp4 = angular_momentum(propagate(t, t.epoch)).magnitude
        a_el = semi_major_axis_from_mean_motion(t.mean_motion)
        h_el = math.sqrt(MU_EARTH * a_el * (1 - t.eccentricity ** 2))
        assert abs(h_sgp4 - h_el) / h_el < 0.01, t.norad_id


# 5 -------------------------------------------------------------------------

@criterion(5, "SGP4 verification vectors: position 1e-3 km, velocity 1e-6 km/s")
def test_propagator_verification():
    tles = {t.norad_id: t for t in read_tle_file(data_path("sgp4_verification.tle")).records}
    with open(data_path("sgp4_verification.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    for row in rows:
        r, v = propagate_minutes(tles[int(row["norad_id"])], float(row["tsince_min"]))
        assert np.max(np.abs(r - [float(row[k]) for k in ("x_km", "y_km", "z_km")])) <= 1e-3
        assert np.max(np.abs(v - [float(row[k]) for k in ("vx_km_s", "vy_km_s", "vz_km_s")])) <= 1e-6


# 6 -------------------------------------------------------------------------

@criterion(6, "five geostationary objects score D_T = 0.333333")
def test_geo_trackability_floor():
    stations = load_ground_stations(data_path("stations.csv"))
    tles = read_tle_file(data_path("geo5.tle")).records
    assert len(tles) == 5
    scores = combine_trackability(monte_carlo_trackability(tles, stations, TrackabilityConfig()))
    assert len(scores) == 5
    for s in scores:
        assert abs(s.d_t - 0.333333) <= 1e-6


# 7 -------------------------------------------------------------------------

@criterion(7, "LEO passes match the 10 s dense-sampling oracle; seeded metrics bit-identical")
def test_trackability_oracle():
    tles = read_tle_file(data_path("leo10.tle")).records
    stations = load_ground_stations(data_path("stations5.csv"))
    assert len(tles) == 10 and len(stations) == 5
    start = max(t.epoch for t in tles).replace(microsecond=0)
    end = start + timedelta(hours=24)
    total = 0
    for t in tles:
        for s in stations:
            passes = predict_passes(t, s, (start, end))
            oracle = dense_oracle(t, s, start, 86400.0)
            assert len(passes) == len(oracle), (t.norad_id, s.station_id)
            for p, (a, b) in zip(passes, oracle):
                assert abs((p.rise - start).total_seconds() - a) <= 10.0
                assert abs((p.set - start).total_seconds() - b) <= 10.0
            total += len(passes)
    assert total > 0
    cfg = TrackabilityConfig(window_days=1.0, start=start, seed=42)
    a = monte_carlo_trackability(tles, stations, cfg)
    b = monte_carlo_trackability(tles, stations, cfg)
    assert a == b


# 8 -------------------------------------------------------------------------

@criterion(8, "S_DIT is the mean to 1e-12; entity mass balance on the fixture")
def test_fusion(fixture_runs):
    rng = np.random.default_rng(8)
    triples = rng.random((10 ** 5, 3))
    got = np.array([combine_dit(*map(float, t)) for t in triples])
    assert np.max(np.abs(got - triples.mean(axis=1))) <= 1e-12

    out = fixture_runs[0]
    with open(out / "catalog.json") as fh:
        catalog = [CatalogEntry.from_dict(d) for d in json.load(fh)["entries"]]
    cards = Ledger(out / "ledger.ldit").blocks()[-1].scorecards()
    scored = [c for c in cards if c.s_dit is not None]
    assert scored
    for role in ROLES:
        ents = entity_scores(cards, catalog, role)
        lhs = math.fsum(e.mean_s_dit * e.asset_count for e in ents)
        rhs = math.fsum(c.s_dit for c in scored)
        assert sum(e.asset_count for e in ents) == len(scored)
        assert abs(lhs - rhs) <= 1e-12 * rhs


# 9 -------------------------------------------------------------------------

@criterion(9, "ledger: 200 single-byte mutations of a 100-block chain all detected; < 5 s")
def test_ledger_tamper_detection(tmp_path):
    import struct

    path = tmp_path / "chain.ldit"
    for i in range(100):
        cards = [ScoreCard(n, f"OBJ {n}", 0.5, 0.25, i / 100, combine_dit(0.5, 0.25, i / 100)) for n in range(3)]
        append_block(path, cards, {"seed": 42}, timestamp=1_700_000_000 + i)
    t0 = time.perf_counter()
    assert verify_chain(path).valid
    data = path.read_bytes()
    spans, pos = [], len(HEADER)
    while pos < len(data):
        (length,) = struct.unpack_from("<I", data, pos)
        spans.append((pos, pos + 4 + length))
        pos += 4 + length
    assert len(spans) == 100
    rnd = random.Random(9)
    for _ in range(200):
        at = rnd.randrange(len(data))
        mutated = bytearray(data)
        mutated[at] = (mutated[at] + rnd.randrange(1, 256)) % 256
        report = verify_bytes(bytes(mutated))
        owner = next((i for i, (a, b) in enumerate(spans) if a <= at < b), 0)
        assert not report.valid
        assert report.first_bad_index <= owner
    assert time.perf_counter() - t0 < 5.0


# 10 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fixture_runs(tmp_path_factory):
    """Ingest the 1000-object fixture once, then score it twice into separate directories."""
    cfg = load_config(CONFIG)
    first, second = tmp_path_factory.mktemp("run1"), tmp_path_factory.mktemp("run2")
    cfg.out = str(first)
    cli.cmd_ingest(cfg)
    for name in os.listdir(first):
        shutil.copy(first / name, second / name)
    timings = []
    for out in (first, second):
        cfg.out = str(out)
        t0 = time.perf_counter()
        cli.cmd_score(cfg)
        timings.append(time.perf_counter() - t0)
    return first, second, timings


@criterion(10, "cmd_score on 1000 objects under 5 min; two runs byte-identical")
def test_end_to_end(fixture_runs):
    first, second, timings = fixture_runs
    assert max(timings) < 300.0
    with open(first / "scores.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 1000
    assert len(Ledger(first / "ledger.ldit")) == 1
    names = sorted(p for p in os.listdir(first) if p.endswith((".csv", ".json")))
    assert "scores.csv" in names
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    assert not mismatch and not errors
    spiders = sorted(os.listdir(first / "spider"))
    assert spiders == sorted(os.listdir(second / "spider"))
    _, mismatch, errors = filecmp.cmpfiles(first / "spider", second / "spider", spiders, shallow=False)
    assert not mismatch and not errors


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

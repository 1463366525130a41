from ldit.catalog import build_catalog, load_ground_stations, load_rcs_csv, read_tle_file
from ldit.pipeline import momentum_points, score_catalog, snapshot_id
from ldit.trackability import TrackabilityConfig

from conftest import data_path


def small():
    tles = read_tle_file(data_path("catalog_1000.tle")).records[:30]
    return build_catalog(tles, load_rcs_csv(data_path("rcs_1000.csv"))), tles


def test_snapshot_id_is_order_independent():
    cat, tles = small()
    assert snapshot_id(cat, tles) == snapshot_id(list(reversed(cat)), list(reversed(tles)))
    assert snapshot_id(cat[:-1], tles[:-1]) != snapshot_id(cat, tles)


def test_momentum_points_shape():
    _, tles = small()
    assert momentum_points(tles).shape == (30, 3)


def test_score_catalog_run():
    cat, tles = small()
    run = score_catalog(cat, tles, load_ground_stations(data_path("stations5.csv")), k=5,
                        track_config=TrackabilityConfig(window_days=0.5, trials=2))
    assert len(run.scorecards) == 30
    missing = {d["norad_id"] for d in run.diagnostics if d["kind"] == "rcs-missing"}
    for c in run.scorecards:
        assert (c.s_dit is None) == (c.norad_id in missing)
    assert run.fingerprint["trackability"]["start"] is not None
    assert run.fingerprint["clustering"] == {"k": 5, "seed": 42}

"""End-to-end scores for a slice of the catalog, with entity rankings."""
from _common import data
from ldit.catalog import build_catalog, load_entity_csv, load_ground_stations, load_rcs_csv, read_tle_file
from ldit.pipeline import score_catalog
from ldit.scoring import entity_scores, rank
from ldit.trackability import TrackabilityConfig

tles = read_tle_file(data("catalog_1000.tle")).records[:120]
catalog = build_catalog(tles, load_rcs_csv(data("rcs_1000.csv")), load_entity_csv(data("entities_1000.csv")))
run = score_catalog(catalog, tles, load_ground_stations(data("stations.csv")), k=12,
                    track_config=TrackabilityConfig(window_days=1, trials=10))

print("top 5 by S_DIT")
for c in rank(run.scorecards, "s_dit", top_n=5):
    print(f"  {c.norad_id} {c.name:<18} D {c.s_d:.3f}  I {c.s_i:.3f}  T {c.s_t:.3f}  DIT {c.s_dit:.6f}")
print("operators")
for e in entity_scores(run.scorecards, catalog, "operator"):
    print(f"  {e.entity_name:<20} {e.mean_s_dit:.6f} over {e.asset_count}")

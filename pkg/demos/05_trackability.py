"""Ground-station passes and the Monte Carlo trackability score."""
from datetime import timedelta

from _common import data
from ldit.catalog import load_ground_stations, read_tle_file
from ldit.trackability import (
    TrackabilityConfig, catalog_start, combine_trackability, monte_carlo_trackability, predict_passes,
)

leo = read_tle_file(data("leo10.tle")).records
geo = read_tle_file(data("geo5.tle")).records
stations = load_ground_stations(data("stations.csv"))
start = catalog_start(leo + geo)

site = next(s for s in stations if s.station_id == "MADRID")
for p in predict_passes(leo[0], site, (start, start + timedelta(hours=12))):
    print(f"{p.station_id} {p.rise:%H:%M:%S} -> {p.set:%H:%M:%S}  {p.duration / 60:5.1f} min  peak {p.max_elevation:4.1f} deg")

cfg = TrackabilityConfig(window_days=2, trials=20, subset_fraction=0.5, seed=42, start=start)
metrics = monte_carlo_trackability(leo + geo, stations, cfg)
for m, s in zip(metrics, combine_trackability(metrics)):
    avg = "-" if m.avg_pass_duration is None else f"{m.avg_pass_duration:6.0f} s"
    print(f"{m.norad_id}  passes {m.n_events:4d}  avg pass {avg:>8}  coverage {m.coverage:.2f}  D_T {s.d_t:.6f}")

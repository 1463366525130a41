"""Cluster angular-momentum vectors and score how distinguishable each object is."""
import numpy as np

from _common import data
from ldit.catalog import read_tle_file
from ldit.identifiability import assign_observation, bisecting_kmeans, score_identifiability
from ldit.orbit import angular_momentum, propagate
from ldit.pipeline import momentum_points

tles = read_tle_file(data("catalog_1000.tle")).records
model = bisecting_kmeans(momentum_points(tles), 60, seed=42, ids=[t.norad_id for t in tles])
print("cluster sizes, smallest first:", sorted(model.sizes.tolist())[:10], "...", sorted(model.sizes.tolist())[-3:])

names = {t.norad_id: t.name for t in tles}
scores = score_identifiability(model)
top = [s for s in scores if s.s_i == 1.0]
print("S_I = 1 (smallest cluster):", [names[s.norad_id] for s in top])

# a new observation is matched to its nearest cluster
t = tles[123]
idx, c_i = assign_observation(angular_momentum(propagate(t, t.epoch)), model)
print(f"observation of {t.name} -> cluster {idx} (size {model.sizes[idx]}, C_I = {c_i:.4f}); "
      f"catalog label {model.assignments[t.norad_id]}")

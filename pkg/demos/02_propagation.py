"""Propagate a few objects with SGP4 and compare two routes to angular momentum."""
from datetime import timedelta

import numpy as np

from _common import data
from ldit.catalog import read_tle_file
from ldit.orbit import angular_momentum, momentum_from_elements, propagate

tles = read_tle_file(data("catalog_1000.tle")).records
for t in sorted(tles, key=lambda t: t.mean_motion)[::250]:
    sv = propagate(t, t.epoch + timedelta(hours=6))
    h_state = angular_momentum(propagate(t, t.epoch))
    h_el = momentum_from_elements(t)
    angle = np.degrees(np.arccos(np.clip(h_state.direction @ h_el.direction, -1, 1)))
    print(f"{t.name:<16} {t.orbit_class.value:<4} |r|+6h = {sv.radius:9.1f} km  "
          f"|h| state {h_state.magnitude:9.1f}  elements {h_el.magnitude:9.1f} km^2/s  angle {angle:.3f} deg")

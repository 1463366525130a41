"""Detectability: min-max normalised radar cross section."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRange


@dataclass(frozen=True)
class DetectabilityScore:
    norad_id: int
    s_d: float


def minmax(values) -> np.ndarray:
    """(x - min) / (max - min); raises DegenerateRange on an empty or flat input."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise DegenerateRange(f"need at least 2 values, got {x.size}")
    lo, hi = x.min(), x.max()
    if hi == lo:
        raise DegenerateRange(f"all values equal ({lo})")
    return (x - lo) / (hi - lo)


def score_detectability(catalog) -> list:
    """S_D for every entry with a valid RCS, in input order.

    Entries without RCS are omitted; the population is the whole snapshot,
    not split by orbit class.
    """
    valid = [e for e in catalog if e.rcs_dbsm is not None and np.isfinite(e.rcs_dbsm)]
    if len(valid) < 2:
        raise DegenerateRange(f"detectability needs >= 2 objects with RCS, got {len(valid)}")
    scores = minmax([e.rcs_dbsm for e in valid])
    return [DetectabilityScore(e.norad_id, float(s)) for e, s in zip(valid, scores)]

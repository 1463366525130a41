"""Fusion of the three sub-scores, entity aggregation and rankings."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .errors import MissingComponent

SCORE_KEYS = ("s_d", "s_i", "s_t", "s_dit")
ROLES = ("owner", "operator", "manufacturer")
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ScoreCard:
    norad_id: int
    name: str
    s_d: Optional[float]
    s_i: Optional[float]
    s_t: Optional[float]
    s_dit: Optional[float]
    snapshot_id: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreCard":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class EntityScore:
    entity_name: str
    role: str
    mean_s_dit: float
    asset_count: int


def combine_dit(s_d, s_i, s_t) -> float:
    """Equal-weight mean of the three sub-scores.

    The sum is exactly rounded (fsum) so the result does not depend on
    argument order.
    """
    parts = (s_d, s_i, s_t)
    if any(p is None for p in parts):
        raise MissingComponent("S_DIT needs all of S_D, S_I and S_T")
    for p in parts:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"sub-score {p} outside [0, 1]")
    return math.fsum(parts) / 3.0


def build_scorecards(catalog, detect, ident, track, snapshot_id: str = "") -> list:
    """One card per catalog entry; S_DIT is left empty when any part is missing."""
    d = {s.norad_id: s.s_d for s in detect}
    i = {s.norad_id: s.s_i for s in ident}
    t = {s.norad_id: s.d_t for s in track}
    cards = []
    for e in sorted(catalog, key=lambda e: e.norad_id):
        sd, si, st = d.get(e.norad_id), i.get(e.norad_id), t.get(e.norad_id)
        try:
            dit = combine_dit(sd, si, st)
        except MissingComponent:
            dit = None
        cards.append(ScoreCard(e.norad_id, e.name, sd, si, st, dit, snapshot_id))
    return cards


def entity_scores(scorecards: Sequence[ScoreCard], catalog, role: str) -> list:
    """Mean S_DIT per owner/operator/manufacturer.

    Objects without the role's metadata are pooled under ``UNKNOWN``, which is
    always listed last. Known entities are ordered by score, then name.
    """
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}")
    meta = {e.norad_id: getattr(e, role) for e in catalog}
    groups: dict = {}
    for card in scorecards:
        if card.s_dit is None:
            continue
        name = meta.get(card.norad_id) or UNKNOWN
        groups.setdefault(name, []).append(card.s_dit)
    known = [
        EntityScore(name, role, math.fsum(vals) / len(vals), len(vals))
        for name, vals in groups.items()
        if name != UNKNOWN
    ]
    known.sort(key=lambda s: (-s.mean_s_dit, s.entity_name))
    if UNKNOWN in groups:
        vals = groups[UNKNOWN]
        known.append(EntityScore(UNKNOWN, role, math.fsum(vals) / len(vals), len(vals)))
    return known


def rank(scorecards: Sequence[ScoreCard], key: str = "s_dit", descending: bool = True,
         top_n: Optional[int] = None) -> list:
    """Cards with a value for ``key``, best first; ties go to the lower NORAD id."""
    if key not in SCORE_KEYS:
        raise ValueError(f"unknown key {key!r}; expected one of {SCORE_KEYS}")
    rows = [c for c in scorecards if getattr(c, key) is not None]
    sign = -1.0 if descending else 1.0
    rows.sort(key=lambda c: (sign * getattr(c, key), c.norad_id))
    return rows if top_n is None else rows[: max(top_n, 0)]


def spider_data(card: ScoreCard) -> dict:
    if card.s_d is None or card.s_i is None or card.s_t is None:
        raise MissingComponent(f"{card.norad_id}: spider plot needs all three sub-scores")
    return {
        "kind": "spider",
        "norad_id": card.norad_id,
        "name": card.name,
        "labels": ["S_D", "S_I", "S_T"],
        "axes": [card.s_d, card.s_i, card.s_t],
        "s_dit": card.s_dit,
    }

"""Trackability: pass prediction and a Monte Carlo over station subsets.

Passes are found on a fixed time grid (elevation above the mask), then
each rise/set crossing is refined by bisection. Local elevation maxima that
sit just below the mask between grid samples are refined too, so short
grazing passes are not lost to the grid step.

For the Monte Carlo, the full network's passes are computed once per object;
every trial only draws a station subset and re-aggregates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Optional, Sequence

import numpy as np

from .catalog import GroundStation, TLERecord
from .detectability import minmax
from .errors import DegenerateRange, EpochTooFar, LDITError, NoStations, PropagationError
from .orbit import MAX_EPOCH_DAYS, julian_date, propagate_array, station_frame, teme_to_ecef

log = logging.getLogger(__name__)

REFINE_TOLERANCE_S = 1.0
GRAZE_MARGIN_DEG = 3.0


@dataclass(frozen=True)
class PassEvent:
    norad_id: int
    station_id: str
    rise: datetime
    set: datetime
    max_elevation: float
    rise_observed: bool = True
    set_observed: bool = True

    @property
    def duration(self) -> float:
        return (self.set - self.rise).total_seconds()

    @property
    def is_event(self) -> bool:
        """False for an object that stays above the mask for the whole window."""
        return self.rise_observed or self.set_observed


@dataclass(frozen=True)
class TrackabilityConfig:
    trials: int = 20
    subset_fraction: float = 0.5
    window_days: float = 7.0
    step_s: float = 30.0
    mask_deg: Optional[float] = 10.0
    seed: int = 42
    start: Optional[datetime] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0.0 < self.subset_fraction <= 1.0:
            raise ValueError("subset_fraction must be in (0, 1]")
        if self.window_days <= 0:
            raise ValueError("window_days must be > 0")
        if not 1.0 <= self.step_s <= 300.0:
            raise ValueError("step_s must be in [1, 300]")
        if self.mask_deg is not None and not -90.0 <= self.mask_deg <= 90.0:
            raise ValueError("mask_deg must be in [-90, 90]")

    def fingerprint(self) -> dict:
        d = asdict(self)
        d["start"] = self.start.isoformat() if self.start else None
        return d


@dataclass(frozen=True)
class TrackabilityMetrics:
    norad_id: int
    avg_pass_duration: Optional[float]
    avg_interval: Optional[float]
    coverage: float
    trials: int
    n_events: int = 0


@dataclass(frozen=True)
class TrackabilityScore:
    norad_id: int
    d_t: float
    pass_component: float
    interval_component: float
    coverage_component: float

    @property
    def s_t(self) -> float:
        return self.d_t


# ---------------------------------------------------------------------------
# Pass prediction
# ---------------------------------------------------------------------------

class _Geometry:
    """Elevation of one object seen from a set of stations, times in seconds from t0."""

    def __init__(self, tle: TLERecord, stations: Sequence[GroundStation], t0: datetime):
        self.tle = tle
        self.jd0, self.fr0 = julian_date(t0)
        frames = [station_frame(s) for s in stations]
        self.sites = np.array([f[0] for f in frames]).reshape(-1, 3)
        self.ups = np.array([f[1] for f in frames]).reshape(-1, 3)

    def _ecef(self, secs):
        secs = np.asarray(secs, float)
        fr = self.fr0 + secs / 86400.0
        err, r, _ = propagate_array(self.tle, np.full(secs.shape, self.jd0), fr)
        if np.any(err):
            bad = int(err[np.nonzero(err)[0][0]])
            raise PropagationError(f"{self.tle.norad_id}: SGP4 error {bad} inside the window")
        return teme_to_ecef(r, self.jd0 + fr)

    def grid(self, secs):
        """Elevation (deg) on a grid, shape (n_stations, n_times)."""
        ecef = self._ecef(secs)
        rho = ecef[None, :, :] - self.sites[:, None, :]
        s = np.einsum("stk,sk->st", rho, self.ups) / np.linalg.norm(rho, axis=2)
        return np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))

    def at(self, secs, station_idx):
        """Elevation (deg) at paired (time, station) samples."""
        secs = np.asarray(secs, float)
        if secs.size == 0:
            return np.empty(0)
        ecef = self._ecef(secs)
        rho = ecef - self.sites[station_idx]
        s = np.einsum("nk,nk->n", rho, self.ups[station_idx]) / np.linalg.norm(rho, axis=1)
        return np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))


def _bisect(geo, lo, hi, st, masks, rising):
    """Vectorised crossing refinement; f(lo) and f(hi) straddle the mask."""
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    while lo.size and np.max(hi - lo) > REFINE_TOLERANCE_S:
        mid = 0.5 * (lo + hi)
        above = geo.at(mid, st) > masks[st]
        # rising: above at mid -> crossing is earlier; setting: the opposite
        move_hi = above == rising
        hi = np.where(move_hi, mid, hi)
        lo = np.where(move_hi, lo, mid)
    return 0.5 * (lo + hi)


def _peaks(geo, lo, hi, st, iters=25):
    """Golden-section search for the elevation maximum inside [lo, hi]."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.astype(float).copy(), hi.astype(float).copy()
    for _ in range(iters):
        c = b - g * (b - a)
        d = a + g * (b - a)
        left = geo.at(c, st) > geo.at(d, st)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    t = 0.5 * (a + b)
    return t, geo.at(t, st)


def _station_passes(tle, stations, t0, window_s, step_s, masks):
    """All passes over the full window at every station: {station index: [(rise, set, max_el, rise_obs, set_obs)]}."""
    geo = _Geometry(tle, stations, t0)
    n = max(2, int(math.ceil(window_s / step_s)) + 1)
    secs = np.linspace(0.0, window_s, n)
    el = geo.grid(secs)
    f = el - masks[:, None]
    above = f > 0

    s_idx, t_idx = np.nonzero(~above[:, :-1] & above[:, 1:])
    rises = (s_idx, secs[t_idx], secs[t_idx + 1])
    s_idx2, t_idx2 = np.nonzero(above[:, :-1] & ~above[:, 1:])
    sets = (s_idx2, secs[t_idx2], secs[t_idx2 + 1])

    # local maxima sitting just below the mask: possible short passes between samples
    mid = f[:, 1:-1]
    cand = (~above[:, 1:-1]) & (mid >= f[:, :-2]) & (mid >= f[:, 2:]) & (mid > -GRAZE_MARGIN_DEG)
    gs, gt = np.nonzero(cand)
    gt = gt + 1
    graze_rise = graze_set = (np.empty(0, int), np.empty(0), np.empty(0))
    graze_peaks = {}
    if gs.size:
        tpk, epk = _peaks(geo, secs[gt - 1], secs[gt + 1], gs)
        ok = epk > masks[gs]
        if ok.any():
            gs, gt, tpk, epk = gs[ok], gt[ok], tpk[ok], epk[ok]
            graze_rise = (gs, secs[gt - 1], tpk)
            graze_set = (gs, tpk, secs[gt + 1])
            for s, t, e in zip(gs, tpk, epk):
                graze_peaks.setdefault(int(s), []).append((float(t), float(e)))

    r_st = np.concatenate([rises[0], graze_rise[0]]).astype(int)
    r_t = _bisect(geo, np.concatenate([rises[1], graze_rise[1]]), np.concatenate([rises[2], graze_rise[2]]),
                  r_st, masks, True)
    s_st = np.concatenate([sets[0], graze_set[0]]).astype(int)
    s_t = _bisect(geo, np.concatenate([sets[1], graze_set[1]]), np.concatenate([sets[2], graze_set[2]]),
                  s_st, masks, False)

    out = {}
    for s in range(len(stations)):
        evs = [(t, 1) for t in r_t[r_st == s]] + [(t, -1) for t in s_t[s_st == s]]
        evs.sort()
        passes = []
        start = 0.0 if above[s, 0] else None
        start_obs = False
        for t, kind in evs:
            if kind == 1:
                start, start_obs = t, True
            elif start is not None:
                passes.append((start, t, start_obs, True))
                start = None
        if start is not None:
            passes.append((start, window_s, start_obs, False))
        rows = []
        for a, b, ro, so in passes:
            i0, i1 = np.searchsorted(secs, a, "left"), np.searchsorted(secs, b, "right")
            peak = float(el[s, i0:i1].max()) if i1 > i0 else -90.0
            for pt, pe in graze_peaks.get(s, ()):
                if a <= pt <= b:
                    peak = max(peak, pe)
            rows.append((a, b, peak, ro, so))
        out[s] = rows
    return out


def _mask_array(stations, mask):
    return np.array([s.min_elevation if mask is None else mask for s in stations], dtype=float)


def _check_epoch(tle, t0, window_s, max_epoch_days):
    if max_epoch_days is None:
        return
    lo = (t0 - tle.epoch).total_seconds() / 86400.0
    hi = lo + window_s / 86400.0
    worst = max(abs(lo), abs(hi))
    if worst > max_epoch_days:
        raise EpochTooFar(f"{tle.norad_id}: window reaches {worst:.2f} days from TLE epoch")


def _utc(t: datetime) -> datetime:
    return t.replace(tzinfo=timezone.utc) if t.tzinfo is None else t.astimezone(timezone.utc)


def predict_passes(
    tle: TLERecord,
    station: GroundStation,
    window,
    step: float = 30.0,
    mask: Optional[float] = None,
    max_epoch_days: float = MAX_EPOCH_DAYS,
) -> list:
    """Passes of ``tle`` over ``station`` inside ``window = (start, end)``.

    ``mask`` defaults to the station's own minimum elevation. Passes already
    in progress at a window edge are clipped to it and flagged as not
    observed on that side.
    """
    start, end = (_utc(t) for t in window)
    window_s = (end - start).total_seconds()
    if window_s <= 0:
        raise ValueError("window must have positive length")
    if not 1.0 <= step <= 300.0:
        raise ValueError("step must be in [1, 300] s")
    _check_epoch(tle, start, window_s, max_epoch_days)
    masks = _mask_array([station], mask)
    rows = _station_passes(tle, [station], start, window_s, step, masks)[0]
    return [
        PassEvent(tle.norad_id, station.station_id, start + timedelta(seconds=a), start + timedelta(seconds=b),
                  pk, ro, so)
        for a, b, pk, ro, so in rows
        if b > a
    ]


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def catalog_start(tles: Sequence[TLERecord]) -> datetime:
    """Default window start: the most recent TLE epoch in the catalog, floored to the second."""
    t = max(t.epoch for t in tles)
    return t.replace(microsecond=0)


@dataclass
class _PassStats:
    # per-station sums over the full window, events only
    dur_sum: np.ndarray
    dur_n: np.ndarray
    gap_sum: np.ndarray
    gap_n: np.ndarray


def _pass_stats(rows_by_station, n_stations) -> _PassStats:
    st = _PassStats(*(np.zeros(n_stations) for _ in range(4)))
    for s in range(n_stations):
        evs = [r for r in rows_by_station.get(s, []) if (r[3] or r[4]) and r[1] > r[0]]
        st.dur_sum[s] = sum(b - a for a, b, *_ in evs)
        st.dur_n[s] = len(evs)
        gaps = [evs[i + 1][0] - evs[i][1] for i in range(len(evs) - 1)]
        st.gap_sum[s] = sum(gaps)
        st.gap_n[s] = len(gaps)
    return st


def draw_subsets(n_stations: int, config: TrackabilityConfig) -> np.ndarray:
    """Boolean (trials, n_stations) selection; one child RNG per trial."""
    m = int(math.ceil(config.subset_fraction * n_stations - 1e-9))
    m = min(max(m, 1), n_stations)
    sel = np.zeros((config.trials, n_stations), dtype=bool)
    for t, child in enumerate(np.random.SeedSequence(config.seed).spawn(config.trials)):
        rng = np.random.default_rng(child)
        sel[t, rng.choice(n_stations, size=m, replace=False)] = True
    return sel


def _aggregate(norad_id, st: _PassStats, sel: np.ndarray) -> TrackabilityMetrics:
    w = sel.astype(float)
    dur_sum, dur_n = w @ st.dur_sum, w @ st.dur_n
    gap_sum, gap_n = w @ st.gap_sum, w @ st.gap_n
    has = w @ (st.dur_n > 0).astype(float)
    coverage = has / sel.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        pass_means = dur_sum / dur_n
        gap_means = gap_sum / gap_n
    pm = pass_means[dur_n > 0]
    gm = gap_means[gap_n > 0]
    return TrackabilityMetrics(
        norad_id=norad_id,
        avg_pass_duration=float(pm.mean()) if pm.size else None,
        avg_interval=float(gm.mean()) if gm.size else None,
        coverage=float(coverage.mean()),
        trials=int(sel.shape[0]),
        n_events=int(st.dur_n.sum()),
    )


def network_passes(tle, stations, start, config: TrackabilityConfig, max_epoch_days=MAX_EPOCH_DAYS):
    """Full-network pass rows for one object (seconds from ``start``)."""
    window_s = config.window_days * 86400.0
    _check_epoch(tle, start, window_s, max_epoch_days)
    return _station_passes(tle, stations, start, window_s, config.step_s, _mask_array(stations, config.mask_deg))


def monte_carlo_trackability(
    catalog: Sequence[TLERecord],
    stations: Sequence[GroundStation],
    config: TrackabilityConfig = TrackabilityConfig(),
    diagnostics: Optional[list] = None,
) -> list:
    """Average pass duration, revisit interval and station coverage per object.

    Raw quantities are averaged over trials (trials without a defined value
    are skipped for the two duration means). Objects whose propagation
    fails are left out and reported in ``diagnostics``.
    """
    if not stations:
        raise NoStations("at least one ground station is required")
    tles = list(catalog)
    if not tles:
        return []
    start = _utc(config.start) if config.start else catalog_start(tles)
    sel = draw_subsets(len(stations), config)
    out = []
    for tle in tles:
        try:
            rows = network_passes(tle, stations, start, config)
        except LDITError as exc:
            log.warning("trackability skipped for %s: %s", tle.norad_id, exc)
            if diagnostics is not None:
                diagnostics.append({"norad_id": tle.norad_id, "kind": exc.kind, "message": str(exc)})
            continue
        out.append(_aggregate(tle.norad_id, _pass_stats(rows, len(stations)), sel))
    return out


def combine_trackability(metrics: Sequence[TrackabilityMetrics], diagnostics: Optional[list] = None) -> list:
    """D_T = mean(normalised pass duration, inverted normalised interval, coverage).

    Objects with no rise/set event anywhere score (0, 1, 0) = 1/3. A
    single-pass object has no interval and gets the worst interval value.
    A component whose range collapses contributes 0 for every object.
    """
    metrics = list(metrics)
    if len(metrics) < 2:
        raise DegenerateRange(f"trackability needs >= 2 objects, got {len(metrics)}")

    def note(msg):
        log.info(msg)
        if diagnostics is not None:
            diagnostics.append({"kind": "degenerate-component", "message": msg})

    active = [m for m in metrics if m.avg_pass_duration is not None]
    pass_c = {}
    try:
        for m, v in zip(active, minmax([m.avg_pass_duration for m in active])):
            pass_c[m.norad_id] = float(v)
    except DegenerateRange as exc:
        note(f"pass duration: {exc}")
        pass_c = {m.norad_id: _raw_or_zero(m.avg_pass_duration) for m in active}

    with_int = [m for m in active if m.avg_interval is not None]
    int_c = {}
    try:
        for m, v in zip(with_int, minmax([m.avg_interval for m in with_int])):
            int_c[m.norad_id] = 1.0 - float(v)
    except DegenerateRange as exc:
        note(f"interval: {exc}")
        int_c = {m.norad_id: _raw_or_zero(m.avg_interval) for m in with_int}

    scores = []
    for m in metrics:
        if m.avg_pass_duration is None:
            p, i, c = 0.0, 1.0, 0.0
        else:
            p = pass_c[m.norad_id]
            i = int_c.get(m.norad_id, 0.0)
            c = float(m.coverage)
        scores.append(TrackabilityScore(m.norad_id, (p + i + c) / 3.0, p, i, c))
    return scores


def _raw_or_zero(v):
    return float(v) if 0.0 <= v <= 1.0 else 0.0


def distribution_plot_data(scores: Sequence[TrackabilityScore], bins: int = 20) -> dict:
    vals = np.array([s.d_t for s in scores], float)
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return {
        "kind": "histogram",
        "metric": "s_t",
        "bin_edges": edges.tolist(),
        "counts": counts.tolist(),
        "n": int(vals.size),
    }

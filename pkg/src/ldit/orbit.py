"""Orbit mechanics: SGP4 propagation, frame rotation and angular momentum.

States are in the TEME frame the TLE elements are defined in (km, km/s).
Earth-fixed coordinates use a GMST-only rotation; polar motion and the
UT1-UTC difference are ignored, which is well below the pass-timing
tolerance used for trackability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache

import numpy as np
from sgp4.api import Satrec, jday

from .catalog import GroundStation, TLERecord
from .errors import DecayedOrbit, EpochTooFar, PropagationError

MU_EARTH = 398600.4418  # km^3/s^2, WGS-84
EARTH_RADIUS = 6378.137  # km, WGS-84 equatorial
WGS84_F = 1.0 / 298.257223563
MAX_EPOCH_DAYS = 30.0

_SGP4_ERRORS = {
    1: "mean eccentricity out of range",
    2: "mean motion below zero",
    3: "perturbed eccentricity out of range",
    4: "semi-latus rectum below zero",
    6: "orbit decayed",
}


@dataclass(frozen=True)
class StateVector:
    epoch: datetime
    position: np.ndarray
    velocity: np.ndarray

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.position))

    def semi_major_axis(self, mu: float = MU_EARTH) -> float:
        """Osculating semi-major axis from the vis-viva relation."""
        v2 = float(self.velocity @ self.velocity)
        return 1.0 / (2.0 / self.radius - v2 / mu)


@dataclass(frozen=True)
class AngularMomentumVector:
    l: np.ndarray
    mass_assumed: bool = True

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.l))

    @property
    def direction(self) -> np.ndarray:
        return self.l / np.linalg.norm(self.l)


@lru_cache(maxsize=4096)
def satrec_for(tle: TLERecord) -> Satrec:
    from .catalog import format_tle

    l1, l2 = (tle.line1, tle.line2) if tle.line1 else format_tle(tle)
    return Satrec.twoline2rv(l1, l2)


def _as_utc(t: datetime) -> datetime:
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def julian_date(t: datetime):
    """(whole, fraction) Julian date pair for a UTC datetime."""
    t = _as_utc(t)
    return jday(t.year, t.month, t.day, t.hour, t.minute, t.second + t.microsecond * 1e-6)


def _check(err, r, tle):
    if err == 6 or (err == 0 and float(np.linalg.norm(r)) < EARTH_RADIUS):
        raise DecayedOrbit(f"{tle.norad_id}: propagated position is below the Earth's surface")
    if err:
        raise PropagationError(f"{tle.norad_id}: SGP4 error {err} ({_SGP4_ERRORS.get(err, 'unknown')})")


def propagate(tle: TLERecord, t: datetime, max_epoch_days: float = MAX_EPOCH_DAYS) -> StateVector:
    """TEME state of ``tle`` at UTC time ``t``."""
    t = _as_utc(t)
    dt_days = (t - tle.epoch).total_seconds() / 86400.0
    if max_epoch_days is not None and abs(dt_days) > max_epoch_days:
        raise EpochTooFar(f"{tle.norad_id}: {dt_days:.2f} days from TLE epoch (limit {max_epoch_days})")
    jd, fr = julian_date(t)
    err, r, v = satrec_for(tle).sgp4(jd, fr)
    r = np.array(r)
    _check(err, r, tle)
    return StateVector(t, r, np.array(v))


def propagate_minutes(tle: TLERecord, tsince: float):
    """Raw SGP4 call at ``tsince`` minutes from epoch; returns (r, v) arrays."""
    err, r, v = satrec_for(tle).sgp4_tsince(tsince)
    r = np.array(r)
    _check(err, r, tle)
    return r, np.array(v)


def propagate_array(tle: TLERecord, jd: np.ndarray, fr: np.ndarray):
    """Vectorised propagation; returns (err, r, v) with r, v of shape (n, 3)."""
    err, r, v = satrec_for(tle).sgp4_array(np.ascontiguousarray(jd, float), np.ascontiguousarray(fr, float))
    return err, r, v


def angular_momentum(state: StateVector, mass: float | None = None) -> AngularMomentumVector:
    """l = r x (m v); unit mass (specific angular momentum) when ``mass`` is None."""
    m = 1.0 if mass is None else float(mass)
    return AngularMomentumVector(np.cross(state.position, m * state.velocity), mass is None)


def semi_major_axis_from_mean_motion(mean_motion: float, mu: float = MU_EARTH) -> float:
    n = mean_motion * 2.0 * math.pi / 86400.0
    return (mu / (n * n)) ** (1.0 / 3.0)


def momentum_from_elements(tle: TLERecord, mu: float = MU_EARTH) -> AngularMomentumVector:
    """Specific angular momentum from the mean elements: |h| = sqrt(mu a (1-e^2)) along the orbit normal."""
    a = semi_major_axis_from_mean_motion(tle.mean_motion, mu)
    h = math.sqrt(mu * a * (1.0 - tle.eccentricity ** 2))
    i = math.radians(tle.inclination)
    node = math.radians(tle.raan)
    if tle.inclination == 0.0:
        normal = np.array([0.0, 0.0, 1.0])
    else:
        normal = np.array([math.sin(i) * math.sin(node), -math.sin(i) * math.cos(node), math.cos(i)])
    return AngularMomentumVector(h * normal, True)


# ---------------------------------------------------------------------------
# Earth-fixed geometry
# ---------------------------------------------------------------------------

def gmst(jd_ut1):
    """Greenwich mean sidereal time in radians (IAU-82), array-friendly."""
    t = (np.asarray(jd_ut1, float) - 2451545.0) / 36525.0
    sec = -6.2e-6 * t ** 3 + 0.093104 * t ** 2 + (876600.0 * 3600.0 + 8640184.812866) * t + 67310.54841
    return np.mod(np.deg2rad(sec / 240.0), 2.0 * math.pi)


def teme_to_ecef(r: np.ndarray, jd_ut1) -> np.ndarray:
    """Rotate TEME positions (n, 3) into the Earth-fixed frame."""
    g = gmst(jd_ut1)
    c, s = np.cos(g), np.sin(g)
    r = np.asarray(r, float)
    out = np.empty_like(r)
    out[..., 0] = c * r[..., 0] + s * r[..., 1]
    out[..., 1] = -s * r[..., 0] + c * r[..., 1]
    out[..., 2] = r[..., 2]
    return out


def geodetic_to_ecef(lat_deg: float, lon_deg: float, alt_m: float = 0.0) -> np.ndarray:
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    e2 = WGS84_F * (2.0 - WGS84_F)
    n = EARTH_RADIUS / math.sqrt(1.0 - e2 * math.sin(lat) ** 2)
    h = alt_m / 1000.0
    return np.array([
        (n + h) * math.cos(lat) * math.cos(lon),
        (n + h) * math.cos(lat) * math.sin(lon),
        (n * (1.0 - e2) + h) * math.sin(lat),
    ])


def station_frame(station: GroundStation):
    """(ECEF position, local up unit vector) of a station."""
    lat, lon = math.radians(station.latitude), math.radians(station.longitude)
    up = np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])
    return geodetic_to_ecef(station.latitude, station.longitude, station.altitude), up


def elevation_deg(r_ecef: np.ndarray, site: np.ndarray, up: np.ndarray) -> np.ndarray:
    rho = np.asarray(r_ecef) - site
    s = (rho @ up) / np.linalg.norm(rho, axis=-1)
    return np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))

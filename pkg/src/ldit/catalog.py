"""Catalog ingest: TLE parsing, RCS merging, ground stations and magnitudes.

All readers are pure functions of their input text/files. Malformed TLE
groups are never dropped silently: :func:`scan_tle` returns them as
diagnostics, :func:`parse_tle` raises the first one.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    ChecksumMismatch,
    CoordinateOutOfRange,
    DegenerateVariance,
    DuplicateStation,
    FieldOutOfRange,
    InputFormatError,
    InsufficientOverlap,
    TLEError,
    TruncatedGroup,
)

TLE_LINE_LENGTH = 69


# ---------------------------------------------------------------------------
# TLE records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TLERecord:
    """One parsed two-line element set.

    Angles are degrees, mean motion is rev/day, ``bstar`` is 1/earth-radii.
    The epoch is kept as (two-digit-year-expanded year, fractional day of
    year) exactly as encoded so that formatting round-trips bit-for-bit.
    """

    norad_id: int
    name: str
    classification: str
    intl_designator: str
    epoch_year: int
    epoch_day: float
    ndot: float
    nddot: float
    bstar: float
    ephemeris_type: int
    element_set: int
    inclination: float
    raan: float
    eccentricity: float
    arg_perigee: float
    mean_anomaly: float
    mean_motion: float
    rev_number: int
    line1_checksum: int
    line2_checksum: int
    line1: str = field(default="", compare=False, repr=False)
    line2: str = field(default="", compare=False, repr=False)

    @property
    def epoch(self) -> datetime:
        start = datetime(self.epoch_year, 1, 1, tzinfo=timezone.utc)
        return start + timedelta(days=self.epoch_day - 1.0)

    @property
    def period_minutes(self) -> float:
        return 1440.0 / self.mean_motion

    @property
    def orbit_class(self) -> "OrbitClass":
        return classify_orbit(self.mean_motion, self.eccentricity)

    @property
    def label(self) -> str:
        return self.name or str(self.norad_id)


@dataclass
class TLEDiagnostic:
    error: TLEError
    lines: tuple

    @property
    def kind(self) -> str:
        return self.error.kind

    def __str__(self):
        return str(self.error)


@dataclass
class TLEParseReport:
    records: list = field(default_factory=list)
    record_lines: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def tle_checksum(line: str) -> int:
    """Mod-10 checksum over the first 68 columns (digits count their value, '-' counts 1)."""
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _parse_implied(text: str, field_name: str, line_no: int) -> float:
    # "+12345-6" style: implied leading decimal point and a one-digit exponent
    s = text.strip()
    if not s:
        return 0.0
    sign = ""
    if s[0] in "+-":
        sign, s = ("-" if s[0] == "-" else ""), s[1:]
    s = s.replace(" ", "")
    if len(s) < 2 or s[-2] not in "+-":
        # some producers omit the exponent on zero values
        if s.isdigit():
            return float(f"{sign}0.{s}")
        raise FieldOutOfRange(field_name, line_no, f"bad exponent field {text!r}")
    mant, exp = s[:-2], s[-2:]
    if not mant.isdigit() or not exp[1].isdigit():
        raise FieldOutOfRange(field_name, line_no, f"bad exponent field {text!r}")
    return float(f"{sign}0.{mant}e{exp}")


def _format_implied(value: float, field_name: str) -> str:
    if value == 0.0:
        return " 00000+0"
    digits, exp = f"{abs(value):.4e}".split("e")
    mant = digits.replace(".", "")
    exp = int(exp) + 1
    if exp < -9:
        # below the field's resolution
        return " 00000+0"
    if exp > 9:
        raise FieldOutOfRange(field_name, detail=f"{value!r} not representable")
    sign = "-" if value < 0 else " "
    esign = "-" if exp < 0 else "+"
    return f"{sign}{mant}{esign}{abs(exp)}"


def _float(text: str, field_name: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FieldOutOfRange(field_name, line_no, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise FieldOutOfRange(field_name, line_no, "not finite")
    return value


def _int(text: str, field_name: str, line_no: int, blank=0) -> int:
    text = text.strip()
    if not text:
        return blank
    if not text.isdigit():
        raise FieldOutOfRange(field_name, line_no, f"not an integer: {text!r}")
    return int(text)


def _check_range(value, lo, hi, field_name, line_no, hi_open=False):
    bad = value < lo or (value >= hi if hi_open else value > hi)
    if bad:
        bracket = ")" if hi_open else "]"
        raise FieldOutOfRange(field_name, line_no, f"{value} not in [{lo}, {hi}{bracket}")


def _parse_group(name: str, l1: str, l2: str, n1: int, n2: int) -> TLERecord:
    for line, no in ((l1, n1), (l2, n2)):
        if len(line) < TLE_LINE_LENGTH:
            raise TruncatedGroup(f"line shorter than {TLE_LINE_LENGTH} columns", no)
    l1 = l1[:TLE_LINE_LENGTH]
    l2 = l2[:TLE_LINE_LENGTH]
    for line, no, tag in ((l1, n1, "line1_checksum"), (l2, n2, "line2_checksum")):
        if not line[68].isdigit():
            raise FieldOutOfRange(tag, no, "checksum column is not a digit")
        if int(line[68]) != tle_checksum(line):
            raise ChecksumMismatch(
                f"stored checksum {line[68]} != computed {tle_checksum(line)}", no
            )

    norad = _int(l1[2:7], "norad_id", n1, blank=-1)
    norad2 = _int(l2[2:7], "norad_id", n2, blank=-1)
    if norad <= 0:
        raise FieldOutOfRange("norad_id", n1, "must be a positive integer")
    if norad != norad2:
        raise FieldOutOfRange("norad_id", n2, f"line 2 id {norad2} != line 1 id {norad}")

    epoch_text = l1[18:32]
    yy = _int(epoch_text[:2], "epoch", n1)
    epoch_day = _float(epoch_text[2:], "epoch", n1)
    _check_range(epoch_day, 1.0, 367.0, "epoch", n1, hi_open=True)
    year = 2000 + yy if yy < 57 else 1900 + yy

    ndot = _float(l1[33:43].replace(" ", "") or "0", "ndot", n1)
    nddot = _parse_implied(l1[44:52], "nddot", n1)
    bstar = _parse_implied(l1[53:61], "bstar", n1)
    eph = _int(l1[62], "ephemeris_type", n1)
    elset = _int(l1[64:68], "element_set", n1)

    inc = _float(l2[8:16], "inclination", n2)
    _check_range(inc, 0.0, 180.0, "inclination", n2)
    raan = _float(l2[17:25], "raan", n2)
    _check_range(raan, 0.0, 360.0, "raan", n2, hi_open=True)
    ecc_text = l2[26:33].strip()
    if not ecc_text.isdigit():
        raise FieldOutOfRange("eccentricity", n2, f"not digits: {ecc_text!r}")
    ecc = float("0." + ecc_text)
    argp = _float(l2[34:42], "arg_perigee", n2)
    _check_range(argp, 0.0, 360.0, "arg_perigee", n2, hi_open=True)
    ma = _float(l2[43:51], "mean_anomaly", n2)
    _check_range(ma, 0.0, 360.0, "mean_anomaly", n2, hi_open=True)
    mm = _float(l2[52:63], "mean_motion", n2)
    if mm <= 0.0:
        raise FieldOutOfRange("mean_motion", n2, "must be > 0")
    rev = _int(l2[63:68], "rev_number", n2)

    return TLERecord(
        norad_id=norad,
        name=name,
        classification=l1[7],
        intl_designator=l1[9:17].rstrip(),
        epoch_year=year,
        epoch_day=epoch_day,
        ndot=ndot,
        nddot=nddot,
        bstar=bstar,
        ephemeris_type=eph,
        element_set=elset,
        inclination=inc,
        raan=raan,
        eccentricity=ecc,
        arg_perigee=argp,
        mean_anomaly=ma,
        mean_motion=mm,
        rev_number=rev,
        line1_checksum=int(l1[68]),
        line2_checksum=int(l2[68]),
        line1=l1,
        line2=l2,
    )


def _is_line1(line: str) -> bool:
    return line.startswith("1 ")


def _is_line2(line: str) -> bool:
    return line.startswith("2 ")


def scan_tle(text) -> TLEParseReport:
    """Parse 2-line and 3-line (name + 2) groups, collecting every failure.

    Every non-blank input line ends up either in a record or in a diagnostic.
    Line numbers are 1-based.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    lines = [ln.rstrip("\r\n").rstrip() for ln in text.splitlines()]
    report = TLEParseReport()
    n = len(lines)
    i = 0
    while i < n:
        line = lines[i]
        if not line.strip():
            i += 1
            continue
        if _is_line1(line):
            if i + 1 < n and _is_line2(lines[i + 1]):
                group = (None, i, i + 1)
            else:
                report.diagnostics.append(
                    TLEDiagnostic(TruncatedGroup("line 1 without a following line 2", i + 1), (i + 1,))
                )
                i += 1
                continue
        elif _is_line2(line):
            report.diagnostics.append(
                TLEDiagnostic(TruncatedGroup("line 2 without a preceding line 1", i + 1), (i + 1,))
            )
            i += 1
            continue
        elif i + 2 < n and _is_line1(lines[i + 1]) and _is_line2(lines[i + 2]):
            group = (i, i + 1, i + 2)
        else:
            report.diagnostics.append(
                TLEDiagnostic(TruncatedGroup("name line without element lines", i + 1), (i + 1,))
            )
            i += 1
            continue

        name_idx, a, b = group
        name = ""
        if name_idx is not None:
            name = lines[name_idx].strip()
            if name.startswith("0 "):
                name = name[2:].strip()
        member_lines = tuple(x + 1 for x in group if x is not None)
        try:
            rec = _parse_group(name, lines[a], lines[b], a + 1, b + 1)
        except TLEError as exc:
            report.diagnostics.append(TLEDiagnostic(exc, member_lines))
        else:
            report.records.append(rec)
            report.record_lines.append(member_lines)
        i = b + 1
    return report


def parse_tle(text) -> list:
    """Parse TLE text; raise the first malformed group's error."""
    report = scan_tle(text)
    if report.diagnostics:
        raise report.diagnostics[0].error
    return report.records


def read_tle_file(path) -> TLEParseReport:
    with open(path, "rb") as fh:
        return scan_tle(fh.read())


def format_tle(rec: TLERecord, include_name: bool = False) -> list:
    """Render a record back to standard TLE lines (checksums recomputed)."""
    yy = rec.epoch_year % 100
    ndot = f"{abs(rec.ndot):.8f}"[1:]
    if abs(rec.ndot) >= 1.0:
        raise FieldOutOfRange("ndot", detail="|ndot| must be < 1")
    ndot = ("-" if rec.ndot < 0 else " ") + ndot
    l1 = (
        f"1 {rec.norad_id:05d}{rec.classification or 'U'} {rec.intl_designator:<8s} "
        f"{yy:02d}{rec.epoch_day:012.8f} {ndot} "
        f"{_format_implied(rec.nddot, 'nddot')} {_format_implied(rec.bstar, 'bstar')} "
        f"{rec.ephemeris_type:1d} {rec.element_set:4d}"
    )
    ecc = int(round(rec.eccentricity * 1e7))
    l2 = (
        f"2 {rec.norad_id:05d} {rec.inclination:8.4f} {rec.raan:8.4f} {ecc:07d} "
        f"{rec.arg_perigee:8.4f} {rec.mean_anomaly:8.4f} {rec.mean_motion:11.8f}"
        f"{rec.rev_number % 100000:5d}"
    )
    for line in (l1, l2):
        if len(line) != 68:
            raise FieldOutOfRange("format", detail=f"rendered line has {len(line)} columns")
    l1 += str(tle_checksum(l1))
    l2 += str(tle_checksum(l2))
    lines = [l1, l2]
    if include_name:
        lines.insert(0, rec.name or str(rec.norad_id))
    return lines


def make_tle(
    norad_id: int,
    name: str,
    epoch: datetime,
    inclination: float,
    raan: float,
    eccentricity: float,
    arg_perigee: float,
    mean_anomaly: float,
    mean_motion: float,
    bstar: float = 0.0,
    ndot: float = 0.0,
    intl_designator: str = "",
) -> TLERecord:
    """Build a valid record from elements by formatting and re-parsing it."""
    epoch = epoch.astimezone(timezone.utc)
    start = datetime(epoch.year, 1, 1, tzinfo=timezone.utc)
    day = 1.0 + (epoch - start).total_seconds() / 86400.0
    draft = TLERecord(
        norad_id=norad_id, name=name, classification="U", intl_designator=intl_designator,
        epoch_year=epoch.year, epoch_day=round(day, 8), ndot=round(ndot, 8), nddot=0.0,
        bstar=bstar, ephemeris_type=0, element_set=999, inclination=round(inclination, 4),
        raan=round(raan % 360.0, 4) % 360.0, eccentricity=round(eccentricity, 7),
        arg_perigee=round(arg_perigee % 360.0, 4) % 360.0,
        mean_anomaly=round(mean_anomaly % 360.0, 4) % 360.0,
        mean_motion=round(mean_motion, 8), rev_number=0, line1_checksum=0, line2_checksum=0,
    )
    return parse_tle("\n".join(format_tle(draft, include_name=True)))[0]


# ---------------------------------------------------------------------------
# Orbit classes and catalog entries
# ---------------------------------------------------------------------------

class OrbitClass(str, Enum):
    LEO = "LEO"
    MEO = "MEO"
    GEO = "GEO"
    HEO = "HEO"
    OTHER = "OTHER"


def classify_orbit(mean_motion: float, eccentricity: float) -> OrbitClass:
    period = 1440.0 / mean_motion
    if period < 128.0 and eccentricity < 0.25:
        return OrbitClass.LEO
    # checked before MEO so that Molniya-type orbits are not labelled MEO
    if eccentricity >= 0.25 and period > 128.0:
        return OrbitClass.HEO
    if 128.0 <= period < 1300.0:
        return OrbitClass.MEO
    if 1300.0 <= period <= 1500.0 and eccentricity < 0.05:
        return OrbitClass.GEO
    return OrbitClass.OTHER


@dataclass(frozen=True)
class CatalogEntry:
    norad_id: int
    name: str = ""
    rcs_dbsm: Optional[float] = None
    rcs_sources: tuple = ()
    owner: Optional[str] = None
    operator: Optional[str] = None
    manufacturer: Optional[str] = None
    orbit_class: Optional[OrbitClass] = None

    @property
    def rcs_missing(self) -> bool:
        return self.rcs_dbsm is None

    def to_dict(self) -> dict:
        return {
            "norad_id": self.norad_id,
            "name": self.name,
            "rcs_dbsm": self.rcs_dbsm,
            "rcs_sources": [[s, v] for s, v in self.rcs_sources],
            "owner": self.owner,
            "operator": self.operator,
            "manufacturer": self.manufacturer,
            "orbit_class": self.orbit_class.value if self.orbit_class else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CatalogEntry":
        oc = d.get("orbit_class")
        return cls(
            norad_id=int(d["norad_id"]),
            name=d.get("name") or "",
            rcs_dbsm=d.get("rcs_dbsm"),
            rcs_sources=tuple((s, v) for s, v in d.get("rcs_sources", [])),
            owner=d.get("owner"),
            operator=d.get("operator"),
            manufacturer=d.get("manufacturer"),
            orbit_class=OrbitClass(oc) if oc else None,
        )


def rcs_to_dbsm(value: float, unit: str) -> float:
    unit = unit.strip().lower()
    if unit == "dbsm":
        return float(value)
    if unit in ("m2", "m^2", "sqm"):
        if value <= 0:
            raise InputFormatError(f"RCS of {value} m2 cannot be expressed in dBsm")
        return 10.0 * math.log10(value)
    raise InputFormatError(f"unknown RCS unit {unit!r}")


def merge_rcs(entries: Iterable[CatalogEntry]) -> list:
    """Merge per-source entries into one entry per NORAD id.

    RCS takes the most optimistic (largest) value across sources. Text fields
    come from the lexicographically first source that has a value.
    """
    groups: dict = {}
    for e in entries:
        groups.setdefault(e.norad_id, []).append(e)
    merged = []
    for norad in sorted(groups):
        members = sorted(groups[norad], key=lambda e: tuple(s for s, _ in e.rcs_sources))
        sources = []
        for e in members:
            sources.extend(e.rcs_sources)
        sources.sort(key=lambda sv: (sv[0], -math.inf if sv[1] is None else sv[1]))
        values = [v for _, v in sources if v is not None]

        def first(attr):
            for e in members:
                val = getattr(e, attr)
                if val:
                    return val
            return None

        merged.append(
            CatalogEntry(
                norad_id=norad,
                name=first("name") or "",
                rcs_dbsm=max(values) if values else None,
                rcs_sources=tuple(sources),
                owner=first("owner"),
                operator=first("operator"),
                manufacturer=first("manufacturer"),
                orbit_class=first("orbit_class"),
            )
        )
    return merged


def _read_csv(path, required: Sequence[str]) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise InputFormatError(f"{os.fspath(path)}: missing columns {missing}")
        return list(reader)


def load_rcs_csv(path) -> list:
    """Read ``norad_id,source,rcs,unit`` rows into per-source entries (dBsm)."""
    out = []
    for lineno, row in enumerate(_read_csv(path, ("norad_id", "source", "rcs", "unit")), start=2):
        try:
            norad = int(row["norad_id"])
        except (TypeError, ValueError):
            raise InputFormatError(f"{path}:{lineno}: bad norad_id {row['norad_id']!r}") from None
        raw = (row["rcs"] or "").strip()
        value = None
        if raw:
            try:
                value = rcs_to_dbsm(float(raw), row["unit"] or "dbsm")
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: bad rcs {raw!r}") from None
        out.append(CatalogEntry(norad_id=norad, rcs_sources=((row["source"].strip(), value),)))
    return out


@dataclass(frozen=True)
class EntityInfo:
    norad_id: int
    name: str = ""
    owner: Optional[str] = None
    operator: Optional[str] = None
    manufacturer: Optional[str] = None


def load_entity_csv(path) -> dict:
    """Read ``norad_id,name,owner,operator,manufacturer``; blank cells mean unknown."""
    cols = ("norad_id", "name", "owner", "operator", "manufacturer")
    out = {}
    for row in _read_csv(path, cols):
        norad = int(row["norad_id"])
        out[norad] = EntityInfo(
            norad_id=norad,
            name=(row["name"] or "").strip(),
            **{k: ((row[k] or "").strip() or None) for k in cols[2:]},
        )
    return out


def build_catalog(tles: Sequence[TLERecord], rcs_entries=(), entities=None) -> list:
    """Join TLEs, per-source RCS rows and entity metadata into one entry per TLE.

    RCS rows for objects without a TLE are ignored: the TLE set defines the
    catalog population.
    """
    entities = entities or {}
    by_id = {}
    for t in tles:
        by_id.setdefault(t.norad_id, t)
    seeds = []
    for norad, t in by_id.items():
        info = entities.get(norad)
        seeds.append(
            CatalogEntry(
                norad_id=norad,
                name=t.name or (info.name if info else ""),
                owner=info.owner if info else None,
                operator=info.operator if info else None,
                manufacturer=info.manufacturer if info else None,
                orbit_class=t.orbit_class,
            )
        )
    rows = [e for e in rcs_entries if e.norad_id in by_id]
    return merge_rcs(seeds + rows)


# ---------------------------------------------------------------------------
# Ground stations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundStation:
    station_id: str
    latitude: float
    longitude: float
    altitude: float = 0.0
    min_elevation: float = 10.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise CoordinateOutOfRange(f"{self.station_id}: latitude {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise CoordinateOutOfRange(f"{self.station_id}: longitude {self.longitude}")


STATION_COLUMNS = ("station_id", "latitude_deg", "longitude_deg", "altitude_m", "min_elevation_deg")


def load_ground_stations(path) -> list:
    stations = []
    seen = set()
    for lineno, row in enumerate(_read_csv(path, STATION_COLUMNS), start=2):
        sid = (row["station_id"] or "").strip()
        if not sid:
            raise InputFormatError(f"{path}:{lineno}: empty station_id")
        if sid in seen:
            raise DuplicateStation(f"{path}:{lineno}: duplicate station {sid!r}")
        seen.add(sid)
        try:
            lat = float(row["latitude_deg"])
            lon = float(row["longitude_deg"])
            alt = float(row["altitude_m"] or 0.0)
            mask = float(row["min_elevation_deg"] or 10.0)
        except ValueError:
            raise InputFormatError(f"{path}:{lineno}: non-numeric station field") from None
        stations.append(GroundStation(sid, lat, lon, alt, mask))
    return stations


def default_stations_path() -> str:
    return os.path.join(os.path.dirname(__file__), "data", "stations.csv")


# ---------------------------------------------------------------------------
# Visual magnitudes and the RCS/magnitude check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MagnitudeObservation:
    norad_id: int
    std_magnitude: float

    def __post_init__(self):
        if not math.isfinite(self.std_magnitude):
            raise InputFormatError(f"{self.norad_id}: non-finite magnitude")


def load_magnitudes(path) -> list:
    return [
        MagnitudeObservation(int(r["norad_id"]), float(r["std_mag"]))
        for r in _read_csv(path, ("norad_id", "std_mag"))
    ]


@dataclass
class CorrelationReport:
    r: float
    n: int
    slope: float
    intercept: float
    rcs_dbsm: list
    std_magnitude: list
    norad_ids: list

    def to_plot_data(self) -> dict:
        return {
            "kind": "rcs_magnitude",
            "pearson_r": self.r,
            "n": self.n,
            "fit": {"slope": self.slope, "intercept": self.intercept},
            "points": [
                {"norad_id": k, "rcs_dbsm": x, "std_mag": y}
                for k, x, y in zip(self.norad_ids, self.rcs_dbsm, self.std_magnitude)
            ],
        }


def correlate_rcs_magnitude(catalog: Sequence[CatalogEntry], mags: Sequence[MagnitudeObservation]) -> CorrelationReport:
    """Pearson r and least-squares line of std magnitude against RCS (dBsm).

    Repeated magnitude observations of one object are averaged first.
    """
    acc: dict = {}
    for m in mags:
        acc.setdefault(m.norad_id, []).append(m.std_magnitude)
    ids, xs, ys = [], [], []
    for e in sorted(catalog, key=lambda e: e.norad_id):
        if e.rcs_dbsm is None or e.norad_id not in acc or not math.isfinite(e.rcs_dbsm):
            continue
        ids.append(e.norad_id)
        xs.append(float(e.rcs_dbsm))
        ys.append(float(np.mean(acc[e.norad_id])))
    if len(xs) < 3:
        raise InsufficientOverlap(f"only {len(xs)} objects have both RCS and magnitude")
    x = np.asarray(xs)
    y = np.asarray(ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateVariance("RCS or magnitude values are all equal")
    sxy = float(dx @ dy)
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    slope = sxy / sxx
    return CorrelationReport(
        r=r, n=len(xs), slope=slope, intercept=float(y.mean() - slope * x.mean()),
        rcs_dbsm=xs, std_magnitude=ys, norad_ids=ids,
    )


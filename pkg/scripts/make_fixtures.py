"""Regenerate the bundled fixtures under src/ldit/data/.

    python scripts/make_fixtures.py

Everything is synthesised from a fixed seed, except the SGP4 verification
vectors which are converted from the files shipped with the ``sgp4``
package (Vallado's SGP4-VER.TLE / tcppver.out).
"""
import csv
import json
import math
import os
from datetime import datetime, timedelta, timezone

import numpy as np
import sgp4

from ldit.catalog import format_tle, make_tle, scan_tle

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "ldit", "data")
EPOCH = datetime(2024, 3, 1, tzinfo=timezone.utc)
MU = 398600.4418
RE = 6378.137

STATIONS = [
    ("KIRUNA", 67.857, 20.964, 390), ("TROMSO", 69.662, 18.940, 100), ("FAIRBANKS", 64.859, -147.849, 200),
    ("FYLINGDALES", 54.362, -0.670, 260), ("CAPE_COD", 41.752, -70.538, 80), ("MADRID", 40.431, -4.248, 830),
    ("GOLDSTONE", 35.426, -116.890, 1000), ("MITAKA", 35.676, 139.540, 60), ("VANDENBERG", 34.742, -120.572, 110),
    ("EGLIN", 30.572, -86.215, 30), ("MAUI", 20.708, -156.257, 3050), ("GUAM", 13.444, 144.794, 90),
    ("BANGALORE", 13.034, 77.512, 900), ("KWAJALEIN", 9.395, 167.479, 5), ("KOUROU", 5.251, -52.805, 10),
    ("SINGAPORE", 1.352, 103.820, 20), ("MALINDI", -2.996, 40.195, 10), ("ASCENSION", -7.907, -14.402, 100),
    ("DIEGO_GARCIA", -7.412, 72.452, 5), ("ALICE_SPRINGS", -23.759, 133.882, 550),
    ("HARTEBEESTHOEK", -25.890, 27.685, 1400), ("PERTH", -31.802, 115.885, 20), ("SANTIAGO", -33.151, -70.668, 720),
    ("CANBERRA", -35.402, 148.981, 680), ("USHUAIA", -54.801, -68.303, 20),
]


def mean_motion_for(alt_km=None, a_km=None):
    a = a_km if a_km is not None else RE + alt_km
    n = math.sqrt(MU / a ** 3)
    return n * 86400.0 / (2 * math.pi)


def write_stations():
    with open(os.path.join(DATA, "stations.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["station_id", "latitude_deg", "longitude_deg", "altitude_m", "min_elevation_deg"])
        for sid, lat, lon, alt in STATIONS:
            w.writerow([sid, lat, lon, alt, 10.0])


def geo_raan_for_longitude(lon_deg, epoch):
    """RAAN that puts a zero-inclination, M=0, argp=0 GEO object over ``lon_deg`` at ``epoch``."""
    from ldit.orbit import gmst, julian_date

    jd, fr = julian_date(epoch)
    return (math.degrees(float(gmst(jd + fr))) + lon_deg) % 360.0


def synth_catalog(rng):
    objs = []  # (kind, elements dict, true rcs dBsm, owner, operator, manufacturer)

    def add(kind, name, inc, raan, ecc, argp, ma, mm, rcs, bstar=0.0):
        objs.append(dict(kind=kind, name=name, inc=inc, raan=raan, ecc=ecc, argp=argp, ma=ma, mm=mm,
                         rcs=rcs, bstar=bstar))

    # LEO broadband shell: 6 planes x 20
    for p in range(6):
        for s in range(20):
            add("LEO", f"NETSAT-{p * 20 + s + 1:04d}", 53.0 + rng.normal(0, 0.01), p * 60.0 + rng.normal(0, 0.2),
                1.2e-4, 90.0, s * 18.0, mean_motion_for(550 + rng.normal(0, 0.5)), rng.normal(2.0, 1.0), 2e-5)
    # sun-synchronous imagers and weather satellites
    for i in range(200):
        alt = rng.uniform(480, 900)
        inc = 180.0 - math.degrees(math.acos(min(1.0, 0.0989 * ((RE + alt) / RE) ** 3.5)))
        add("LEO", f"SSO-SAT {i + 1}", inc, rng.uniform(0, 360), rng.uniform(1e-4, 2e-3), rng.uniform(0, 360),
            rng.uniform(0, 360), mean_motion_for(alt), rng.normal(0.0, 4.0), 3e-5)
    # general LEO population
    for i in range(200):
        alt = rng.uniform(350, 1500)
        add("LEO", f"LEO-OBJ {i + 1}", rng.uniform(0, 100), rng.uniform(0, 360), rng.uniform(1e-4, 0.02),
            rng.uniform(0, 360), rng.uniform(0, 360), mean_motion_for(alt), rng.normal(-2.0, 6.0), 5e-5)
    # crewed-station neighbourhood
    for i in range(20):
        add("LEO", f"STATION-ASSOC {i + 1}", 51.64 + rng.normal(0, 0.01), 120.0 + rng.normal(0, 1.0),
            rng.uniform(2e-4, 9e-4), rng.uniform(0, 360), rng.uniform(0, 360), mean_motion_for(415 + rng.normal(0, 5)),
            rng.normal(5.0, 3.0), 1e-4)
    # fragmentation debris cloud
    for i in range(80):
        add("LEO", f"FRAG DEB {i + 1}", 86.4 + rng.normal(0, 0.3), 210.0 + rng.normal(0, 3.0),
            abs(rng.normal(0.004, 0.003)), rng.uniform(0, 360), rng.uniform(0, 360),
            mean_motion_for(780 + rng.normal(0, 40)), rng.normal(-15.0, 4.0), 1e-4)
    # navigation MEO: three constellations
    for i in range(100):
        if i < 40:
            a, inc, planes, tag = 26560.0, 55.0, 6, "NAVSAT"
        elif i < 70:
            a, inc, planes, tag = 29600.0, 56.0, 3, "GALSAT"
        else:
            a, inc, planes, tag = 25510.0, 64.8, 3, "GLOSAT"
        add("MEO", f"{tag} {i + 1}", inc + rng.normal(0, 0.2), (i % planes) * 360.0 / planes + rng.normal(0, 0.5),
            rng.uniform(1e-4, 0.01), rng.uniform(0, 360), rng.uniform(0, 360), mean_motion_for(a_km=a + rng.normal(0, 5)),
            rng.normal(9.0, 2.0))
    # geostationary belt
    for i in range(170):
        lon = rng.uniform(-180, 180)
        inc = abs(rng.normal(0.03, 0.02))
        add("GEO", f"GEOCOM {i + 1}", inc, None, rng.uniform(1e-5, 4e-4), 0.0, 0.0, 1.00273791, rng.normal(14.0, 3.0))
        objs[-1]["lon"] = lon
    # inclined geosynchronous, no longer station-kept
    for i in range(30):
        add("GEO", f"GEOSYNC-INCL {i + 1}", rng.uniform(2.0, 14.0), rng.uniform(0, 360), rng.uniform(1e-4, 3e-3),
            rng.uniform(0, 360), rng.uniform(0, 360), 1.0027 + rng.normal(0, 0.0005), rng.normal(12.0, 3.0))
    # Molniya and transfer orbits
    for i in range(50):
        add("HEO", f"MOLNIYA {i + 1}", 63.4 + rng.normal(0, 0.5), rng.uniform(0, 360), 0.72 + rng.normal(0, 0.01),
            270.0 + rng.normal(0, 2), rng.uniform(0, 360), 2.0059 + rng.normal(0, 0.001), rng.normal(10.0, 2.0))
    for i in range(27):
        add("HEO", f"GTO R/B {i + 1}", rng.uniform(6, 28), rng.uniform(0, 360), 0.73 + rng.normal(0, 0.005),
            rng.uniform(0, 360), rng.uniform(0, 360), 2.25 + rng.normal(0, 0.02), rng.normal(11.0, 2.0), 1e-4)
    # three retrograde high-LEO research satellites sharing one unusual orbit
    for i in range(3):
        add("LEO", f"RETRO-SCI {i + 1}", 143.0 + rng.normal(0, 0.05), 300.0 + rng.normal(0, 0.3), 1e-3,
            rng.uniform(0, 360), rng.uniform(0, 360), mean_motion_for(1700 + rng.normal(0, 2)), rng.normal(1.0, 1.0))
    return objs


OWNERS = ["ALPHA SPACE AGENCY", "BOREAL SATCOM", "CORVUS DEFENCE", "DELTA IMAGING", "EQUINOX NAVIGATION",
          "FALCON BROADBAND", "GALACTIC WEATHER", "HORIZON RESEARCH"]
MANUFACTURERS = ["ORBITAL WORKS", "STELLAR DYNAMICS", "APEX AEROSPACE", "NOVA SYSTEMS", "ZENITH BUS CO"]


def build_main_fixture():
    rng = np.random.default_rng(20240301)
    objs = synth_catalog(rng)
    assert len(objs) == 1000, len(objs)
    order = rng.permutation(len(objs))
    records = []
    meta = []
    for k, idx in enumerate(order):
        o = objs[idx]
        norad = 30001 + k
        epoch = EPOCH - timedelta(seconds=float(rng.uniform(0, 2 * 86400)))
        epoch = epoch.replace(microsecond=0)
        raan = o["raan"] if o["raan"] is not None else geo_raan_for_longitude(o["lon"], epoch)
        rec = make_tle(norad, o["name"], epoch, o["inc"], raan, o["ecc"], o["argp"], o["ma"], o["mm"],
                       bstar=o["bstar"], intl_designator=f"{epoch.year % 100:02d}{(k % 300) + 1:03d}A")
        records.append(rec)
        owner = OWNERS[int(rng.integers(len(OWNERS)))] if rng.random() > 0.08 else None
        operator = owner if rng.random() < 0.6 else (OWNERS[int(rng.integers(len(OWNERS)))] if rng.random() > 0.1 else None)
        manu = MANUFACTURERS[int(rng.integers(len(MANUFACTURERS)))] if rng.random() > 0.12 else None
        meta.append((norad, o["name"], owner, operator, manu, o["rcs"]))

    lines = []
    for rec in records:
        lines.extend(format_tle(rec, include_name=True))
    # two deliberately malformed groups exercise the diagnostics path
    bad = format_tle(records[0], include_name=False)
    l1 = bad[0][:-1] + str((int(bad[0][-1]) + 1) % 10)
    lines += ["BROKEN CHECKSUM", l1.replace(f"{records[0].norad_id:05d}", "39990", 1), bad[1].replace(f"{records[0].norad_id:05d}", "39990", 1)]
    lines += ["TRUNCATED GROUP", bad[0]]
    lines += [bad[1][:40]]
    text = "\n".join(lines) + "\n"
    with open(os.path.join(DATA, "catalog_1000.tle"), "w") as fh:
        fh.write(text)
    report = scan_tle(text)

    sources = [("celestrak", "dbsm"), ("jsr", "dbsm"), ("spacetrack", "m2")]
    rows = []
    none_count = 0
    for norad, _, _, _, _, true in meta:
        drop_all = rng.random() < 0.03
        for src, unit in sources:
            present = (not drop_all) and rng.random() < 0.7
            if not present:
                rows.append([norad, src, "", unit])
                continue
            v = true + rng.normal(0, 1.5)
            rows.append([norad, src, f"{v:.3f}" if unit == "dbsm" else f"{10 ** (v / 10):.6g}", unit])
        if drop_all:
            none_count += 1
    with open(os.path.join(DATA, "rcs_1000.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["norad_id", "source", "rcs", "unit"])
        w.writerows(rows)

    with open(os.path.join(DATA, "entities_1000.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["norad_id", "name", "owner", "operator", "manufacturer"])
        for norad, name, owner, op, manu, _ in meta:
            w.writerow([norad, name, owner or "", op or "", manu or ""])

    with open(os.path.join(DATA, "magnitudes_1000.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["norad_id", "std_mag"])
        for j in sorted(rng.choice(len(meta), size=300, replace=False)):
            norad, *_, true = meta[j]
            w.writerow([norad, f"{7.5 - 0.35 * true + rng.normal(0, 0.6):.3f}"])

    manifest = {
        "tle_groups": len(report.records) + len(report.diagnostics),
        "valid_records": len(report.records),
        "rejected_groups": len(report.diagnostics),
        "rejected_kinds": sorted(d.kind for d in report.diagnostics),
        "objects_without_rcs": sum(1 for norad, *_ in meta if all(
            r[2] == "" for r in rows if r[0] == norad)),
        "orbit_classes": {c: sum(1 for r in report.records if r.orbit_class.value == c)
                          for c in ("LEO", "MEO", "GEO", "HEO", "OTHER")},
    }
    with open(os.path.join(DATA, "catalog_1000_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("main fixture:", manifest)


def build_geo5():
    lons = [-100.5, -45.0, 13.0, 83.0, 160.0]
    lines = []
    for i, lon in enumerate(lons):
        epoch = EPOCH - timedelta(hours=6 * i)
        rec = make_tle(41001 + i, f"GEOSTAT {lon:+.1f}", epoch, 0.02, geo_raan_for_longitude(lon, epoch),
                       0.0002, 0.0, 0.0, 1.00273791)
        lines.extend(format_tle(rec, include_name=True))
    with open(os.path.join(DATA, "geo5.tle"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def build_leo10():
    rng = np.random.default_rng(7)
    lines = []
    for i in range(10):
        alt = rng.uniform(400, 1200)
        rec = make_tle(42001 + i, f"LEO-TEST {i + 1}", EPOCH - timedelta(hours=float(rng.uniform(0, 12))),
                       rng.uniform(20, 100), rng.uniform(0, 360), rng.uniform(1e-4, 5e-3), rng.uniform(0, 360),
                       rng.uniform(0, 360), mean_motion_for(alt), bstar=2e-5)
        lines.extend(format_tle(rec, include_name=True))
    with open(os.path.join(DATA, "leo10.tle"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    picks = ["FYLINGDALES", "GOLDSTONE", "KWAJALEIN", "HARTEBEESTHOEK", "CANBERRA"]
    with open(os.path.join(DATA, "stations5.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["station_id", "latitude_deg", "longitude_deg", "altitude_m", "min_elevation_deg"])
        for sid, lat, lon, alt in STATIONS:
            if sid in picks:
                w.writerow([sid, lat, lon, alt, 10.0])


def build_sgp4_verification():
    base = os.path.dirname(sgp4.__file__)
    with open(os.path.join(base, "SGP4-VER.TLE")) as fh:
        raw = [ln.rstrip("\n") for ln in fh if not ln.startswith("#") and ln.strip()]
    tle_lines = {}
    for i in range(0, len(raw) - 1):
        if raw[i].startswith("1 ") and raw[i + 1].startswith("2 "):
            tle_lines[int(raw[i][2:7])] = (raw[i][:69], raw[i + 1][:69])
    report = scan_tle("\n".join(l for pair in tle_lines.values() for l in pair))
    usable = {r.norad_id for r in report.records}

    rows = []
    current = None
    with open(os.path.join(base, "tcppver.out")) as fh:
        for ln in fh:
            parts = ln.split()
            if not parts:
                continue
            if len(parts) == 2 and parts[1] == "xx":
                current = int(parts[0])
                continue
            if current in usable and len(parts) >= 7:
                rows.append([current] + parts[:7])
    kept = sorted({r[0] for r in rows})
    with open(os.path.join(DATA, "sgp4_verification.tle"), "w") as fh:
        for norad in kept:
            fh.write(tle_lines[norad][0] + "\n" + tle_lines[norad][1] + "\n")
    with open(os.path.join(DATA, "sgp4_verification.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["norad_id", "tsince_min", "x_km", "y_km", "z_km", "vx_km_s", "vy_km_s", "vz_km_s"])
        w.writerows(rows)
    print(f"sgp4 vectors: {len(rows)} rows over {len(kept)} satellites "
          f"({len(tle_lines) - len(usable)} TLEs rejected by the parser: "
          f"{[str(d) for d in report.diagnostics]})")


if __name__ == "__main__":
    os.makedirs(DATA, exist_ok=True)
    write_stations()
    build_main_fixture()
    build_geo5()
    build_leo10()
    build_sgp4_verification()

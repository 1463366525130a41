"""Optional fetchers for public catalog endpoints, with an on-disk cache.

Nothing here is needed for the bundled fixtures. With ``offline=True`` only
cached payloads are served and a cache miss raises :class:`OfflineError`.
Space-Track credentials come from ``LDIT_ST_USER`` / ``LDIT_ST_PASS``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
import urllib.parse
import urllib.request
from http.cookiejar import CookieJar

from .catalog import CatalogEntry, rcs_to_dbsm
from .errors import InputFormatError, OfflineError

log = logging.getLogger(__name__)

CELESTRAK_GP = "https://celestrak.org/NORAD/elements/gp.php?GROUP={group}&FORMAT=tle"
CELESTRAK_SATCAT = "https://celestrak.org/pub/satcat.csv"
SPACETRACK_LOGIN = "https://www.space-track.org/ajaxauth/login"
SPACETRACK_QUERY = (
    "https://www.space-track.org/basicspacedata/query/class/gp/decay_date/null-val/"
    "epoch/%3Enow-30/orderby/norad_cat_id/format/3le"
)


class CachedFetcher:
    def __init__(self, cache_dir, offline: bool = True, opener=None, timeout: float = 60.0):
        self.cache_dir = os.fspath(cache_dir)
        self.offline = offline
        self.timeout = timeout
        self._opener = opener

    def cache_path(self, url: str) -> str:
        key = hashlib.sha256(url.encode()).hexdigest()[:24]
        return os.path.join(self.cache_dir, key + ".bin")

    def is_cached(self, url: str) -> bool:
        return os.path.exists(self.cache_path(url))

    def get(self, url: str, data: bytes | None = None) -> bytes:
        path = self.cache_path(url)
        if os.path.exists(path):
            with open(path, "rb") as fh:
                return fh.read()
        if self.offline:
            raise OfflineError(f"offline mode and no cached copy of {url}")
        log.info("fetching %s", url)
        opener = self._opener or urllib.request.build_opener()
        with opener.open(url, data=data, timeout=self.timeout) as resp:
            body = resp.read()
        os.makedirs(self.cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(body)
        os.replace(tmp, path)
        return body


def fetch_celestrak_tle(fetcher: CachedFetcher, group: str = "active") -> bytes:
    return fetcher.get(CELESTRAK_GP.format(group=urllib.parse.quote(group)))


def parse_satcat_rcs(text: str, source: str = "celestrak") -> list:
    """Per-source entries from a CelesTrak SATCAT CSV (RCS column in m^2)."""
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or "NORAD_CAT_ID" not in reader.fieldnames:
        raise InputFormatError("SATCAT CSV lacks a NORAD_CAT_ID column")
    out = []
    for row in reader:
        raw = (row.get("RCS") or "").strip()
        value = None
        if raw:
            try:
                value = rcs_to_dbsm(float(raw), "m2")
            except (ValueError, InputFormatError):
                value = None
        out.append(CatalogEntry(
            norad_id=int(row["NORAD_CAT_ID"]),
            name=(row.get("OBJECT_NAME") or "").strip(),
            rcs_sources=((source, value),),
            owner=(row.get("OWNER") or "").strip() or None,
        ))
    return out


def fetch_celestrak_satcat(fetcher: CachedFetcher) -> list:
    return parse_satcat_rcs(fetcher.get(CELESTRAK_SATCAT).decode("utf-8", errors="replace"))


def spacetrack_credentials():
    user, password = os.environ.get("LDIT_ST_USER"), os.environ.get("LDIT_ST_PASS")
    if not user or not password:
        return None
    return user, password


def fetch_spacetrack_tle(fetcher: CachedFetcher) -> bytes:
    """Recent 3LE set from Space-Track (login via environment credentials)."""
    if fetcher.is_cached(SPACETRACK_QUERY) or fetcher.offline:
        return fetcher.get(SPACETRACK_QUERY)
    creds = spacetrack_credentials()
    if creds is None:
        raise InputFormatError("LDIT_ST_USER / LDIT_ST_PASS are not set")
    if fetcher._opener is None:
        fetcher._opener = urllib.request.build_opener(urllib.request.HTTPCookieProcessor(CookieJar()))
    form = urllib.parse.urlencode({"identity": creds[0], "password": creds[1]}).encode()
    with fetcher._opener.open(SPACETRACK_LOGIN, data=form, timeout=fetcher.timeout) as resp:
        resp.read()
    return fetcher.get(SPACETRACK_QUERY)

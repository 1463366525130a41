"""Run configuration: a TOML file plus command-line overrides.

Example file::

    out = "out"
    ledger = "out/ledger.ldit"
    offline = true
    cache_dir = ".ldit-cache"

    [inputs]
    tle = "catalog.tle"
    rcs = ["rcs_celestrak.csv", "rcs_spacetrack.csv"]
    entities = "entities.csv"
    stations = "stations.csv"
    magnitudes = "magnitudes.csv"

    [remote]
    celestrak_groups = []
    celestrak_satcat = false
    spacetrack = false

    [clustering]
    k = 60
    seed = 42

    [trackability]
    window_days = 7.0
    step_s = 30.0
    mask_deg = 10.0
    trials = 20
    subset_fraction = 0.5
    seed = 42

Relative paths are resolved against the config file's directory.
"""
from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .catalog import default_stations_path

DEFAULT_SEED = 42


@dataclass
class Inputs:
    tle: Optional[str] = None
    rcs: list = field(default_factory=list)
    entities: Optional[str] = None
    stations: Optional[str] = None
    magnitudes: Optional[str] = None


@dataclass
class Remote:
    celestrak_groups: list = field(default_factory=list)
    celestrak_satcat: bool = False
    spacetrack: bool = False

    @property
    def any(self) -> bool:
        return bool(self.celestrak_groups or self.celestrak_satcat or self.spacetrack)


@dataclass
class Clustering:
    k: int = 60
    seed: int = DEFAULT_SEED


@dataclass
class Trackability:
    window_days: float = 7.0
    step_s: float = 30.0
    mask_deg: float = 10.0
    trials: int = 20
    subset_fraction: float = 0.5
    seed: int = DEFAULT_SEED


@dataclass
class RunConfig:
    inputs: Inputs = field(default_factory=Inputs)
    remote: Remote = field(default_factory=Remote)
    clustering: Clustering = field(default_factory=Clustering)
    trackability: Trackability = field(default_factory=Trackability)
    out: str = "out"
    ledger: Optional[str] = None
    offline: bool = True
    cache_dir: str = ".ldit-cache"

    @property
    def ledger_path(self) -> str:
        return self.ledger or os.path.join(self.out, "ledger.ldit")

    @property
    def stations_path(self) -> str:
        return self.inputs.stations or default_stations_path()

    def validate(self):
        c, t = self.clustering, self.trackability
        if c.k < 1:
            raise ValueError("clustering.k must be >= 1")
        if t.trials < 1:
            raise ValueError("trackability.trials must be >= 1")
        if not 0.0 < t.subset_fraction <= 1.0:
            raise ValueError("trackability.subset_fraction must be in (0, 1]")
        if not 1.0 <= t.step_s <= 300.0:
            raise ValueError("trackability.step_s must be in [1, 300]")
        if t.window_days <= 0:
            raise ValueError("trackability.window_days must be > 0")
        if not -90.0 <= t.mask_deg <= 90.0:
            raise ValueError("trackability.mask_deg must be in [-90, 90]")
        return self


def _fill(obj, data: dict, where: str):
    known = {f.name for f in fields(obj)}
    for key, value in data.items():
        if key not in known:
            raise ValueError(f"unknown config key {where}{key!r}")
        setattr(obj, key, value)


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    cfg = RunConfig()
    for section in ("inputs", "remote", "clustering", "trackability"):
        _fill(getattr(cfg, section), data.pop(section, {}), f"{section}.")
    _fill(cfg, data, "")

    def rel(p):
        return p if p is None or os.path.isabs(p) else os.path.join(base, p)

    inp = cfg.inputs
    if isinstance(inp.rcs, str):
        inp.rcs = [inp.rcs]
    inp.tle, inp.entities, inp.stations, inp.magnitudes = map(rel, (inp.tle, inp.entities, inp.stations, inp.magnitudes))
    inp.rcs = [rel(p) for p in inp.rcs]
    cfg.out, cfg.ledger, cfg.cache_dir = rel(cfg.out), rel(cfg.ledger), rel(cfg.cache_dir)
    return cfg.validate()

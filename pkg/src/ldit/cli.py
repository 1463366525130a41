"""Command-line entry point: ingest -> score -> rank, plus ledger verification.

Exit codes: 0 success, 1 ledger verification failure, 2 input error,
3 offline/network conflict, 4 degenerate data.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import fcntl
import json
import logging
import os
import sys

from . import __version__
from .catalog import (
    CatalogEntry,
    build_catalog,
    correlate_rcs_magnitude,
    load_entity_csv,
    load_ground_stations,
    load_magnitudes,
    load_rcs_csv,
    parse_tle,
    scan_tle,
)
from .config import RunConfig, load_config
from .errors import DegenerateRange, LDITError, OfflineError, TooFewPoints, InsufficientOverlap, DegenerateVariance
from .fetch import CachedFetcher, fetch_celestrak_satcat, fetch_celestrak_tle, fetch_spacetrack_tle
from .ledger import append_block, verify_chain
from .outputs import fmt, write_csv, write_json, write_run_artifacts
from .pipeline import score_catalog, snapshot_id
from .scoring import ROLES, SCORE_KEYS, ScoreCard, rank
from .trackability import TrackabilityConfig

log = logging.getLogger("ldit")

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_OFFLINE, EXIT_DEGENERATE = 0, 1, 2, 3, 4
CATALOG_FILE = "catalog.json"


class CLIError(Exception):
    def __init__(self, code, kind, message, **extra):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra


def _fail(err: CLIError) -> int:
    doc = {"error": err.kind, "message": str(err), "exit_code": err.code, **err.extra}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return err.code


@contextlib.contextmanager
def _out_lock(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    fh = open(os.path.join(out_dir, ".ldit.lock"), "w")
    try:
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise CLIError(EXIT_INPUT, "locked", f"another ldit process is using {out_dir}") from None
        yield
    finally:
        fh.close()


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _run_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("inputs")
    g.add_argument("--config", help="TOML run configuration")
    g.add_argument("--tle", help="TLE / 3LE file")
    g.add_argument("--rcs", action="append", help="RCS catalog CSV (repeatable, one per source)")
    g.add_argument("--entities", help="entity metadata CSV")
    g.add_argument("--stations", help="ground station CSV (default: bundled network)")
    g.add_argument("--magnitudes", help="visual magnitude CSV")
    g.add_argument("--out", help="output directory")
    g.add_argument("--ledger", help="ledger file (default: OUT/ledger.ldit)")
    g.add_argument("--cache-dir")
    net = g.add_mutually_exclusive_group()
    net.add_argument("--offline", dest="offline", action="store_true", default=None)
    net.add_argument("--online", dest="offline", action="store_false")
    g.add_argument("--celestrak-group", action="append", help="fetch a CelesTrak GP group")
    g.add_argument("--celestrak-satcat", action="store_true", default=None)
    g.add_argument("--spacetrack", action="store_true", default=None)
    c = p.add_argument_group("clustering")
    c.add_argument("--k", type=int)
    c.add_argument("--cluster-seed", type=int)
    t = p.add_argument_group("trackability")
    t.add_argument("--window-days", type=float)
    t.add_argument("--step", type=float, dest="step_s")
    t.add_argument("--mask", type=float, dest="mask_deg")
    t.add_argument("--trials", type=int)
    t.add_argument("--subset-fraction", type=float)
    t.add_argument("--track-seed", type=int)


def resolve_config(args) -> RunConfig:
    try:
        cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    except FileNotFoundError:
        raise CLIError(EXIT_INPUT, "input-missing", f"config file {args.config} not found") from None
    except ValueError as exc:
        raise CLIError(EXIT_INPUT, "bad-config", str(exc)) from None
    inp = cfg.inputs
    for name in ("tle", "entities", "stations", "magnitudes"):
        if getattr(args, name, None):
            setattr(inp, name, getattr(args, name))
    if getattr(args, "rcs", None):
        inp.rcs = list(args.rcs)
    for name in ("out", "ledger", "cache_dir", "offline"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "celestrak_group", None):
        cfg.remote.celestrak_groups = list(args.celestrak_group)
    if getattr(args, "celestrak_satcat", None):
        cfg.remote.celestrak_satcat = True
    if getattr(args, "spacetrack", None):
        cfg.remote.spacetrack = True
    if getattr(args, "k", None) is not None:
        cfg.clustering.k = args.k
    if getattr(args, "cluster_seed", None) is not None:
        cfg.clustering.seed = args.cluster_seed
    tr = cfg.trackability
    for name in ("window_days", "step_s", "mask_deg", "trials", "subset_fraction"):
        if getattr(args, name, None) is not None:
            setattr(tr, name, getattr(args, name))
    if getattr(args, "track_seed", None) is not None:
        tr.seed = args.track_seed
    try:
        return cfg.validate()
    except ValueError as exc:
        raise CLIError(EXIT_INPUT, "bad-config", str(exc)) from None


def _require(path, what):
    if not path or not os.path.exists(path):
        raise CLIError(EXIT_INPUT, "input-missing", f"{what} not found: {path!r}")
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig) -> dict:
    """Parse and merge all inputs into OUT/catalog.json."""
    remote_tle, remote_rcs = [], []
    if cfg.remote.any:
        fetcher = CachedFetcher(cfg.cache_dir, offline=cfg.offline)
        try:
            for group in cfg.remote.celestrak_groups:
                remote_tle.append(fetch_celestrak_tle(fetcher, group))
            if cfg.remote.spacetrack:
                remote_tle.append(fetch_spacetrack_tle(fetcher))
            if cfg.remote.celestrak_satcat:
                remote_rcs.extend(fetch_celestrak_satcat(fetcher))
        except OfflineError as exc:
            raise CLIError(EXIT_OFFLINE, exc.kind, str(exc)) from None
        except OSError as exc:
            raise CLIError(EXIT_OFFLINE, "network-error", str(exc)) from None
    if not cfg.inputs.tle and not remote_tle:
        raise CLIError(EXIT_INPUT, "input-missing", "no TLE input configured")

    texts = []
    if cfg.inputs.tle:
        with open(_require(cfg.inputs.tle, "TLE file"), "rb") as fh:
            texts.append(("file", fh.read()))
    texts.extend(("remote", blob) for blob in remote_tle)

    records, diagnostics = {}, []
    for origin, blob in texts:
        report = scan_tle(blob)
        for rec in report.records:
            records.setdefault(rec.norad_id, rec)
        diagnostics.extend({"origin": origin, "kind": d.kind, "lines": list(d.lines), "message": str(d)}
                           for d in report.diagnostics)
    if not records:
        raise CLIError(EXIT_INPUT, "no-valid-tle", "no TLE group passed validation",
                       diagnostics=diagnostics[:50])
    tles = sorted(records.values(), key=lambda t: t.norad_id)

    try:
        rcs_rows = list(remote_rcs)
        for path in cfg.inputs.rcs:
            rcs_rows.extend(load_rcs_csv(_require(path, "RCS catalog")))
        entities = load_entity_csv(_require(cfg.inputs.entities, "entity file")) if cfg.inputs.entities else {}
        mags = load_magnitudes(_require(cfg.inputs.magnitudes, "magnitude file")) if cfg.inputs.magnitudes else []
    except LDITError as exc:
        raise CLIError(EXIT_INPUT, exc.kind, str(exc)) from None

    catalog = build_catalog(tles, rcs_rows, entities)
    snap = snapshot_id(catalog, tles)
    os.makedirs(cfg.out, exist_ok=True)
    counts = {
        "parsed": len(tles),
        "rejected": len(diagnostics),
        "rcs_missing": sum(1 for e in catalog if e.rcs_missing),
    }
    doc = {
        "snapshot_id": snap,
        "counts": counts,
        "entries": [e.to_dict() for e in catalog],
        "tles": [[t.name, t.line1, t.line2] for t in tles],
    }
    write_json(os.path.join(cfg.out, CATALOG_FILE), doc)
    if mags:
        try:
            report = correlate_rcs_magnitude(catalog, mags)
        except (InsufficientOverlap, DegenerateVariance) as exc:
            diagnostics.append({"origin": "magnitudes", "kind": exc.kind, "message": str(exc)})
        else:
            write_json(os.path.join(cfg.out, "rcs_magnitude.json"), report.to_plot_data())
    write_json(os.path.join(cfg.out, "ingest_diagnostics.json"), {"counts": counts, "diagnostics": diagnostics})
    return {"snapshot_id": snap, **counts}


def load_catalog_file(out_dir):
    path = os.path.join(out_dir, CATALOG_FILE)
    if not os.path.exists(path):
        raise CLIError(EXIT_INPUT, "catalog-missing", f"{path} not found; run `ldit ingest` first")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    tles = parse_tle("\n".join("\n".join(group) for group in doc["tles"]))
    catalog = [CatalogEntry.from_dict(d) for d in doc["entries"]]
    return doc, catalog, tles


def cmd_score(cfg: RunConfig) -> dict:
    """Score the ingested catalog, write all artifacts and append one ledger block."""
    _, catalog, tles = load_catalog_file(cfg.out)
    try:
        stations = load_ground_stations(_require(cfg.stations_path, "station file"))
    except LDITError as exc:
        raise CLIError(EXIT_INPUT, exc.kind, str(exc)) from None
    tr = cfg.trackability
    track_cfg = TrackabilityConfig(trials=tr.trials, subset_fraction=tr.subset_fraction, window_days=tr.window_days,
                                   step_s=tr.step_s, mask_deg=tr.mask_deg, seed=tr.seed)
    try:
        run = score_catalog(catalog, tles, stations, k=cfg.clustering.k, cluster_seed=cfg.clustering.seed,
                            track_config=track_cfg)
    except (DegenerateRange, TooFewPoints) as exc:
        raise CLIError(EXIT_DEGENERATE, exc.kind, str(exc)) from None
    except LDITError as exc:
        raise CLIError(EXIT_INPUT, exc.kind, str(exc)) from None
    write_run_artifacts(run, catalog, cfg.out)
    write_json(os.path.join(cfg.out, "run.json"), {"fingerprint": run.fingerprint, "diagnostics": run.diagnostics})
    block = append_block(cfg.ledger_path, run.scorecards, run.fingerprint)
    scored = sum(1 for c in run.scorecards if c.s_dit is not None)
    return {"snapshot_id": run.snapshot_id, "objects": len(run.scorecards), "scored": scored,
            "ledger_index": block.index, "block_hash": block.block_hash.hex()}


def _read_scores(out_dir) -> list:
    path = os.path.join(out_dir, "scores.csv")
    if not os.path.exists(path):
        raise CLIError(EXIT_INPUT, "scores-missing", f"{path} not found; run `ldit score` first")

    def num(x):
        return float(x) if x != "" else None

    with open(path, newline="", encoding="utf-8") as fh:
        return [ScoreCard(int(r["norad_id"]), r["name"], num(r["s_d"]), num(r["s_i"]), num(r["s_t"]), num(r["s_dit"]))
                for r in csv.DictReader(fh)]


def cmd_rank(out_dir, key="s_dit", top_n=10, role=None, descending=True, stream=None) -> list:
    """Print a ranking table and save it next to the scores."""
    stream = stream or sys.stdout
    if role:
        path = os.path.join(out_dir, f"entities_{role}.csv")
        if not os.path.exists(path):
            raise CLIError(EXIT_INPUT, "scores-missing", f"{path} not found; run `ldit score` first")
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        rows = rows[: max(top_n, 0)] if top_n is not None else rows
        header = ["entity_name", "role", "mean_s_dit", "asset_count"]
        table = [[r[h] for h in header] for r in rows]
        write_csv(os.path.join(out_dir, f"rank_entities_{role}.csv"), header, table)
    else:
        cards = rank(_read_scores(out_dir), key=key, descending=descending, top_n=top_n)
        header = ["rank", "norad_id", "name", key]
        table = [[i + 1, c.norad_id, c.name, fmt(getattr(c, key))] for i, c in enumerate(cards)]
        write_csv(os.path.join(out_dir, f"rank_{key}.csv"), header, table)
    widths = [max(len(str(h)), *(len(str(r[i])) for r in table)) if table else len(str(h))
              for i, h in enumerate(header)]
    print("  ".join(str(h).ljust(w) for h, w in zip(header, widths)), file=stream)
    for r in table:
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)), file=stream)
    return table


def cmd_verify_ledger(path, stream=None) -> int:
    stream = stream or sys.stdout
    if not os.path.exists(path):
        raise CLIError(EXIT_INPUT, "input-missing", f"ledger {path} not found")
    report = verify_chain(path)
    print(str(report), file=stream)
    return EXIT_OK if report.valid else EXIT_INVALID


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldit", description="L-DIT scoring for space object catalogs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and merge inputs into OUT/catalog.json")
    _run_options(p)
    p = sub.add_parser("score", help="score the ingested catalog and append a ledger block")
    _run_options(p)
    p = sub.add_parser("run", help="ingest followed by score")
    _run_options(p)

    p = sub.add_parser("rank", help="print a ranking from OUT/scores.csv")
    p.add_argument("--out", default=None)
    p.add_argument("--config")
    p.add_argument("--key", default="s_dit", choices=SCORE_KEYS)
    p.add_argument("--top", type=int, default=10, dest="top_n")
    p.add_argument("--role", choices=ROLES)
    p.add_argument("--ascending", action="store_true")

    p = sub.add_parser("verify-ledger", help="check every hash and link of a ledger file")
    p.add_argument("path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify-ledger":
            return cmd_verify_ledger(args.path)
        cfg = resolve_config(args)
        if args.command == "rank":
            cmd_rank(cfg.out, args.key, args.top_n, args.role, not args.ascending)
            return EXIT_OK
        with _out_lock(cfg.out):
            if args.command in ("ingest", "run"):
                print(json.dumps({"ingest": cmd_ingest(cfg)}, sort_keys=True))
            if args.command in ("score", "run"):
                print(json.dumps({"score": cmd_score(cfg)}, sort_keys=True))
        return EXIT_OK
    except CLIError as err:
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())

"""CSV and plot-data JSON writers for score artifacts."""
from __future__ import annotations

import csv
import json
import os

import numpy as np

from .scoring import ROLES, entity_scores, spider_data
from .identifiability import cluster_plot_data
from .trackability import distribution_plot_data


def fmt(value) -> str:
    """Six decimals, blank for missing values."""
    return "" if value is None else f"{value:.6f}"


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def histogram(values, metric: str, bins: int = 20) -> dict:
    vals = np.asarray(list(values), float)
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return {"kind": "histogram", "metric": metric, "bin_edges": edges.tolist(),
            "counts": counts.tolist(), "n": int(vals.size)}


def write_run_artifacts(run, catalog, out_dir) -> list:
    """Write every per-module CSV/JSON for a ScoreRun; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    names = {e.norad_id: e.name for e in catalog}
    paths = []

    def p(name):
        path = os.path.join(out_dir, name)
        paths.append(path)
        return path

    write_csv(p("detectability.csv"), ["norad_id", "name", "s_d"],
              [[s.norad_id, names.get(s.norad_id, ""), fmt(s.s_d)] for s in run.detectability])
    write_json(p("detectability_hist.json"), histogram((s.s_d for s in run.detectability), "s_d"))

    write_csv(p("identifiability.csv"), ["norad_id", "name", "cluster", "c_i", "s_i"],
              [[s.norad_id, names.get(s.norad_id, ""), s.cluster, fmt(s.c_i), fmt(s.s_i)]
               for s in run.identifiability])
    write_json(p("clusters.json"), cluster_plot_data(run.cluster_model))

    metrics = {m.norad_id: m for m in run.track_metrics}
    rows = []
    for s in run.trackability:
        m = metrics[s.norad_id]
        rows.append([s.norad_id, names.get(s.norad_id, ""), fmt(m.avg_pass_duration), fmt(m.avg_interval),
                     fmt(m.coverage), fmt(s.d_t)])
    write_csv(p("trackability.csv"), ["norad_id", "name", "avg_pass_s", "avg_interval_s", "coverage", "s_t"], rows)
    write_json(p("trackability_hist.json"), distribution_plot_data(run.trackability))

    write_csv(p("scores.csv"), ["norad_id", "name", "s_d", "s_i", "s_t", "s_dit"],
              [[c.norad_id, c.name, fmt(c.s_d), fmt(c.s_i), fmt(c.s_t), fmt(c.s_dit)] for c in run.scorecards])

    for role in ROLES:
        write_csv(p(f"entities_{role}.csv"), ["entity_name", "role", "mean_s_dit", "asset_count"],
                  [[e.entity_name, e.role, fmt(e.mean_s_dit), e.asset_count]
                   for e in entity_scores(run.scorecards, catalog, role)])

    spider_dir = os.path.join(out_dir, "spider")
    os.makedirs(spider_dir, exist_ok=True)
    for card in run.scorecards:
        if card.s_dit is not None:
            write_json(p(os.path.join("spider", f"spider_{card.norad_id}.json")), spider_data(card))
    return paths

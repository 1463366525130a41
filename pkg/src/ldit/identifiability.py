"""Identifiability: bisecting k-means in angular-momentum space.

Every object is represented by one specific angular momentum vector
(km^2/s). Clusters are grown by repeatedly splitting the cluster with the
largest within-cluster sum of squares using seeded 2-means, then all
objects are attached to their nearest center. Smaller matched clusters mean
an observation is easier to attribute, hence a higher score.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .detectability import minmax
from .errors import DegenerateRange, TooFewPoints

DEFAULT_K = 60
DEFAULT_RESTARTS = 5
MAX_LLOYD_ITER = 100


@dataclass
class ClusterModel:
    k: int
    centers: np.ndarray
    labels: np.ndarray
    sizes: np.ndarray
    seed: int
    ids: list
    # SSE after every Lloyd step of the winning 2-means run, one list per bisection
    sse_history: list = field(default_factory=list, repr=False)

    @property
    def assignments(self) -> dict:
        return {i: int(c) for i, c in zip(self.ids, self.labels)}

    def sse(self, points) -> float:
        d = np.asarray(points, float) - self.centers[self.labels]
        return float(np.sum(d * d))


@dataclass(frozen=True)
class IdentifiabilityScore:
    norad_id: int
    cluster: int
    c_i: float
    s_i: float


def _nearest(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    # argmin returns the first minimum, i.e. the lowest cluster index on ties
    return np.argmin(d, axis=1)


def _sse(points, centers, labels) -> float:
    d = points - centers[labels]
    return float(np.sum(d * d))


def _fill_empty(points, centers, labels):
    for j in range(len(centers)):
        if not (labels == j).any():
            resid = ((points - centers[labels]) ** 2).sum(axis=1)
            # only take points from clusters that keep at least one member
            counts = np.bincount(labels, minlength=len(centers))
            resid[counts[labels] < 2] = -1.0
            far = int(np.argmax(resid))
            centers[j] = points[far]
            labels[far] = j


def lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int = MAX_LLOYD_ITER):
    """Plain Lloyd iterations from ``centers``.

    Returns (centers, labels, sse_trace). Stops when assignments stop
    changing. An emptied cluster is re-seeded at the point farthest from its
    current centroid.
    """
    centers = np.array(centers, dtype=float, copy=True)
    k = len(centers)
    labels = _nearest(points, centers)
    trace = [_sse(points, centers, labels)]
    for _ in range(max_iter):
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = points[members].mean(axis=0)
        _fill_empty(points, centers, labels)
        trace.append(_sse(points, centers, labels))
        new = _nearest(points, centers)
        if np.array_equal(new, labels):
            break
        labels = new
        trace.append(_sse(points, centers, labels))
    _fill_empty(points, centers, labels)
    for j in range(k):
        members = labels == j
        if members.any():
            centers[j] = points[members].mean(axis=0)
    return centers, labels, trace


def _two_means(points: np.ndarray, rng: np.random.Generator, restarts: int):
    best = None
    for _ in range(restarts):
        init = points[rng.choice(len(points), size=2, replace=False)]
        centers, labels, trace = lloyd(points, init)
        sse = _sse(points, centers, labels)
        if best is None or sse < best[0]:
            best = (sse, labels, trace)
    return best[1], best[2]


def bisecting_kmeans(
    points,
    k: int,
    seed: int = 42,
    ids: Optional[Sequence] = None,
    restarts: int = DEFAULT_RESTARTS,
    refine: bool = True,
) -> ClusterModel:
    """Divisive k-means down to exactly ``k`` non-empty clusters.

    With ``refine`` the bisection result is polished by global Lloyd
    iterations so that every point ends up assigned to its nearest center.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    n = len(X)
    if k < 1 or n < k:
        raise TooFewPoints(f"cannot form {k} clusters from {n} points")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    ids = list(range(n)) if ids is None else list(ids)
    rng = np.random.default_rng(seed)

    clusters = [np.arange(n)]
    history = []
    while len(clusters) < k:
        sses = []
        for idx in clusters:
            c = X[idx] - X[idx].mean(axis=0)
            sses.append(float(np.sum(c * c)) if len(idx) > 1 else -1.0)
        j = int(np.argmax(sses))
        idx = clusters[j]
        sub = X[idx]
        if sses[j] == 0.0:
            # identical points: peel one off deterministically
            left, right = idx[:1], idx[1:]
            history.append([0.0, 0.0])
        else:
            labels, trace = _two_means(sub, rng, restarts)
            left, right = idx[labels == 0], idx[labels == 1]
            history.append(trace)
        clusters[j] = left
        clusters.append(right)

    labels = np.empty(n, dtype=int)
    for c, idx in enumerate(clusters):
        labels[idx] = c
    centers = np.array([X[idx].mean(axis=0) for idx in clusters])
    if refine and k > 1:
        centers, labels, _ = lloyd(X, centers)
    sizes = np.bincount(labels, minlength=k)
    return ClusterModel(k=k, centers=centers, labels=labels, sizes=sizes, seed=seed, ids=ids, sse_history=history)


def cluster_identifiability(n: int) -> float:
    """Raw score of a cluster with n members: 1 / (sqrt(n) + 1)."""
    if n < 1:
        raise ValueError("cluster size must be >= 1")
    return 1.0 / (math.sqrt(n) + 1.0)


def score_identifiability(model: ClusterModel) -> list:
    c = np.array([cluster_identifiability(int(model.sizes[lab])) for lab in model.labels])
    if len(set(int(model.sizes[lab]) for lab in model.labels)) < 2:
        raise DegenerateRange("all clusters have the same size")
    s = minmax(c)
    return [
        IdentifiabilityScore(i, int(lab), float(ci), float(si))
        for i, lab, ci, si in zip(model.ids, model.labels, c, s)
    ]


def assign_observation(l, model: ClusterModel):
    """Nearest center (lowest index on ties) and that cluster's raw score."""
    vec = np.asarray(getattr(l, "l", l), dtype=float).reshape(1, 3)
    j = int(_nearest(vec, model.centers)[0])
    return j, cluster_identifiability(int(model.sizes[j]))


def cluster_plot_data(model: ClusterModel) -> dict:
    norms = np.linalg.norm(model.centers, axis=1, keepdims=True)
    dirs = np.divide(model.centers, norms, out=np.zeros_like(model.centers), where=norms > 0)
    counts = np.bincount(model.sizes, minlength=int(model.sizes.max()) + 1)
    return {
        "kind": "clusters",
        "k": model.k,
        "seed": model.seed,
        "clusters": [
            {"index": j, "size": int(model.sizes[j]), "direction": dirs[j].tolist(),
             "center": model.centers[j].tolist()}
            for j in range(model.k)
        ],
        "size_histogram": [
            {"size": s, "count": int(c)} for s, c in enumerate(counts) if c
        ],
    }

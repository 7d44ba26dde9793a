"""Markov-time sweep: Louvain ensembles per time, cross-time re-selection,
robustness analysis via VI, and on-disk persistence of scan results.

Per time t: `runs` seeded Louvain optimisations of B(t); the best partition
is stored and VI(t) is the mean pairwise VI over the `top_m` best. After
the sweep every stored optimum is re-evaluated at every other time and
replaces the stored one wherever it scores strictly higher (single pass),
then the full VI(t, t') matrix between stored optima is computed.

Robust levels are times where VI(t) has a local dip (at or below a quantile
of the trace) and the partition stays essentially unchanged — VI(t, t')
below a threshold — over a wide contiguous log-time window. Trivial
partitions (one cluster, or all singletons) are excluded by default: both
bookend every scan for long stretches and neither is a clustering.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .diffusion import DiffusionOperator
from .louvain import louvain_dense
from .partition import canonicalize, variation_of_information


class ScanError(ValueError):
    pass


def time_grid(t_min: float = 0.01, t_max: float = 100.0, points: int = 400) -> np.ndarray:
    """Logarithmically spaced Markov times, inclusive of both ends."""
    if t_min <= 0 or t_max <= t_min or points < 1:
        raise ScanError("need 0 < t_min < t_max and points >= 1")
    return np.logspace(np.log10(t_min), np.log10(t_max), points)


@dataclass
class TimePoint:
    index: int
    t: float
    labels: np.ndarray
    stability: float
    vi_ensemble: float

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1


@dataclass
class ScanResult:
    times: np.ndarray
    points: list[TimePoint]
    vi_matrix: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.points[0].labels.size


def _partition_stability(b: np.ndarray, groups: list[np.ndarray]) -> float:
    if len(groups) == 1:
        return 0.0
    return float(sum(b[np.ix_(idx, idx)].sum() for idx in groups))


def _groups(labels: np.ndarray) -> list[np.ndarray]:
    return [np.nonzero(labels == c)[0] for c in range(int(labels.max()) + 1)]


def _mean_pairwise_vi(members: list[np.ndarray]) -> float:
    if len(members) < 2:
        return 0.0
    total = 0.0
    for a, b in combinations(members, 2):
        total += variation_of_information(a, b)
    return total / (len(members) * (len(members) - 1) / 2)


def scan(
    op: DiffusionOperator,
    times,
    runs: int = 500,
    top_m: int = 50,
    seed: int = 0,
    run_seeds: list[int] | None = None,
    persist_dir: str | None = None,
) -> ScanResult:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ScanError("times must be a non-empty 1-d grid")
    if not np.all(np.diff(times) > 0):
        raise ScanError("time grid must be sorted strictly ascending")
    if not (runs >= top_m >= 2):
        raise ScanError(f"need runs >= top_m >= 2, got runs={runs} top_m={top_m}")
    if run_seeds is not None and len(run_seeds) != runs:
        raise ScanError("run_seeds must have one entry per run")

    if persist_dir is not None:
        os.makedirs(os.path.join(persist_dir, "partitions"), exist_ok=True)
        open(os.path.join(persist_dir, "progress.jsonl"), "w").close()

    points: list[TimePoint] = []
    for ti, t in enumerate(times):
        b = op.quality_matrix(t)
        ensemble: list[tuple[float, int, np.ndarray]] = []
        for run in range(runs):
            entropy = (seed, ti, run) if run_seeds is None else (run_seeds[run], ti)
            labels, value = louvain_dense(b, np.random.default_rng(entropy))
            ensemble.append((value, run, labels))
        ensemble.sort(key=lambda item: (-item[0], item[1]))
        top = ensemble[:top_m]
        best_value, _, best_labels = top[0]
        vi_t = _mean_pairwise_vi([labels for _, _, labels in top])
        point = TimePoint(
            index=ti,
            t=float(t),
            labels=canonicalize(best_labels),
            stability=best_value,
            vi_ensemble=vi_t,
        )
        points.append(point)
        if persist_dir is not None:
            _write_partition_csv(persist_dir, point)
            with open(os.path.join(persist_dir, "progress.jsonl"), "a", encoding="utf-8") as fh:
                fh.write(json.dumps({
                    "index": ti, "t": point.t, "C": point.n_clusters,
                    "stability": point.stability, "vi": point.vi_ensemble,
                }) + "\n")

    _reselect_across_times(op, times, points)

    n_times = times.size
    vi_matrix = np.zeros((n_times, n_times))
    for i in range(n_times):
        for j in range(i + 1, n_times):
            v = variation_of_information(points[i].labels, points[j].labels)
            vi_matrix[i, j] = vi_matrix[j, i] = v

    params = {"runs": runs, "top_m": top_m, "seed": seed}
    if run_seeds is not None:
        params["run_seeds"] = [int(s) for s in run_seeds]
    result = ScanResult(times=times, points=points, vi_matrix=vi_matrix, params=params)
    if persist_dir is not None:
        save_scan(result, persist_dir)
    return result


def _reselect_across_times(op: DiffusionOperator, times: np.ndarray, points: list[TimePoint]) -> None:
    """Single pass: any stored optimum that scores higher at another time
    replaces the stored optimum there. Stored stability never decreases."""
    candidates: dict[tuple, np.ndarray] = {}
    for point in points:
        candidates.setdefault(tuple(point.labels), point.labels)
    candidate_groups = {key: _groups(labels) for key, labels in candidates.items()}
    for point in points:
        b = op.quality_matrix(point.t)
        own_key = tuple(point.labels)
        for key, labels in candidates.items():
            if key == own_key:
                continue
            value = _partition_stability(b, candidate_groups[key])
            if value > point.stability:
                point.stability = value
                point.labels = labels
                own_key = key


def _plateau_bounds(vi_matrix: np.ndarray, i: int, eps: float) -> tuple[int, int]:
    lo = i
    while lo > 0 and vi_matrix[i, lo - 1] < eps:
        lo -= 1
    hi = i
    n = vi_matrix.shape[0]
    while hi < n - 1 and vi_matrix[i, hi + 1] < eps:
        hi += 1
    return lo, hi


def _plateau_extent(times: np.ndarray, lo: int, hi: int) -> tuple[float, float]:
    """Continuous-time extent of a plateau sampled at grid indices [lo, hi].

    The true boundary lies between the last in-plateau point and the first
    out-of-plateau point; the geometric midpoint is the unbiased estimate on
    a log grid. At grid ends the extent clamps to the scanned window.
    """
    t_lo = float(np.sqrt(times[lo - 1] * times[lo])) if lo > 0 else float(times[0])
    last = len(times) - 1
    t_hi = float(np.sqrt(times[hi] * times[hi + 1])) if hi < last else float(times[last])
    return t_lo, t_hi


@dataclass
class SelectedLevel:
    index: int
    t: float
    n_clusters: int
    vi: float
    stability: float
    plateau_t_lo: float
    plateau_t_hi: float
    plateau_span: float  # decades of log-time
    labels: np.ndarray


def select_robust(
    sr: ScanResult,
    min_plateau: float = 0.5,
    vi_dip_quantile: float = 0.5,
    eps_plateau: float | None = None,
    exclude_trivial: bool = True,
) -> list[SelectedLevel]:
    """Pick the robust levels of a completed scan.

    A time index qualifies when its VI(t) is a local minimum (flat regions
    count) at or below the given quantile of the VI(t) trace, and the
    contiguous region around it where VI(t, t') < eps_plateau spans at
    least `min_plateau` decades. Qualifying times that carry the same
    partition collapse into one selected level.
    """
    points = sr.points
    n_times = len(points)
    n_nodes = sr.n_nodes
    if eps_plateau is None:
        eps_plateau = 0.05 * float(np.log(n_nodes))
    vi = np.array([p.vi_ensemble for p in points])
    threshold = float(np.quantile(vi, vi_dip_quantile))

    chosen: list[SelectedLevel] = []
    for i, point in enumerate(points):
        if exclude_trivial and point.n_clusters in (1, n_nodes):
            continue
        if vi[i] > threshold:
            continue
        if i > 0 and vi[i] > vi[i - 1]:
            continue
        if i < n_times - 1 and vi[i] > vi[i + 1]:
            continue
        lo, hi = _plateau_bounds(sr.vi_matrix, i, eps_plateau)
        t_lo, t_hi = _plateau_extent(sr.times, lo, hi)
        span = float(np.log10(t_hi / t_lo)) if t_hi > t_lo else 0.0
        if n_times > 1 and span < min_plateau:
            continue
        chosen.append(
            SelectedLevel(
                index=i,
                t=point.t,
                n_clusters=point.n_clusters,
                vi=float(vi[i]),
                stability=point.stability,
                plateau_t_lo=t_lo,
                plateau_t_hi=t_hi,
                plateau_span=span,
                labels=point.labels,
            )
        )

    best_by_partition: dict[tuple, SelectedLevel] = {}
    for level in chosen:
        key = tuple(level.labels)
        kept = best_by_partition.get(key)
        if kept is None or (level.vi, -level.plateau_span, level.index) < (
            kept.vi, -kept.plateau_span, kept.index
        ):
            best_by_partition[key] = level
    return sorted(best_by_partition.values(), key=lambda lv: lv.index)


def _write_partition_csv(directory: str, point: TimePoint) -> None:
    path = os.path.join(directory, "partitions", f"t_{point.index}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node,cluster\n")
        for node, cluster in enumerate(point.labels):
            fh.write(f"{node},{int(cluster)}\n")


def save_scan(sr: ScanResult, directory: str) -> None:
    os.makedirs(os.path.join(directory, "partitions"), exist_ok=True)
    payload = {
        "params": sr.params,
        "times": [float(t) for t in sr.times],
        "points": [
            {
                "index": p.index,
                "t": p.t,
                "C": p.n_clusters,
                "stability": p.stability,
                "vi": p.vi_ensemble,
            }
            for p in sr.points
        ],
    }
    with open(os.path.join(directory, "scan.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for point in sr.points:
        _write_partition_csv(directory, point)
    sr.vi_matrix.astype(np.float64).tofile(os.path.join(directory, "vi_matrix.bin"))
    with open(os.path.join(directory, "vi_matrix.json"), "w", encoding="utf-8") as fh:
        json.dump({"shape": list(sr.vi_matrix.shape), "dtype": "float64", "order": "C"}, fh)
        fh.write("\n")


def load_scan(directory: str) -> ScanResult:
    with open(os.path.join(directory, "scan.json"), encoding="utf-8") as fh:
        payload = json.load(fh)
    times = np.array(payload["times"], dtype=float)
    points = []
    for entry in payload["points"]:
        path = os.path.join(directory, "partitions", f"t_{entry['index']}.csv")
        labels = np.loadtxt(path, delimiter=",", skiprows=1, dtype=int, ndmin=2)[:, 1]
        points.append(
            TimePoint(
                index=entry["index"],
                t=entry["t"],
                labels=labels,
                stability=entry["stability"],
                vi_ensemble=entry["vi"],
            )
        )
    with open(os.path.join(directory, "vi_matrix.json"), encoding="utf-8") as fh:
        sidecar = json.load(fh)
    vi_matrix = np.fromfile(
        os.path.join(directory, "vi_matrix.bin"), dtype=np.float64
    ).reshape(sidecar["shape"])
    return ScanResult(times=times, points=points, vi_matrix=vi_matrix, params=payload["params"])

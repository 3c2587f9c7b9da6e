"""Experiment driver: seed grids, reports, and the space comparison.

One experiment is (dataset, algorithm, encoding, mode, d, q) swept over an
inclusive seed range. Every seed is an independent run that owns all of its
state, so runs may execute on worker threads; only wall time is allowed to
differ from a serial execution. Reports order records by seed and carry
aggregate statistics ready for boxplots.
"""

from __future__ import annotations

import enum
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .classic import ApConfig, affinity_propagation, hierarchical, kmeans
from .datasets import RawDataset
from .encoding import EncodedDataset, EncodingConfig, EncodingKind, encode_dataset
from .errors import ConfigError, EmptyInput, HdclustError
from .hdc_clustering import (
    RefinementConfig,
    init_bin_height,
    init_bin_width,
    init_hdcluster,
    init_sb_affinity,
    init_sb_kmeans,
    refine,
    regenerate,
)
from .hv import Mode, pairwise_cosine, pairwise_hamming
from .metrics import RunStats, accuracy_with_method, aggregate
from .rng import ALGO, REGEN_TIES, RngStream


class Algorithm(enum.Enum):
    HDCLUSTER = "hdcluster"
    SB_KMEANS = "sb-kmeans"
    BIN_WIDTH = "bin-width"
    BIN_HEIGHT = "bin-height"
    SB_AFFINITY = "sb-affinity"
    KMEANS_RAW = "kmeans-raw"
    HIERARCHICAL_RAW = "hierarchical-raw"
    AFFINITY_RAW = "affinity-raw"
    KMEANS_ENCODED = "kmeans-encoded"
    HIERARCHICAL_ENCODED = "hierarchical-encoded"
    AFFINITY_ENCODED = "affinity-encoded"


HDC_ALGORITHMS = {
    Algorithm.HDCLUSTER,
    Algorithm.SB_KMEANS,
    Algorithm.BIN_WIDTH,
    Algorithm.BIN_HEIGHT,
    Algorithm.SB_AFFINITY,
}
RAW_ALGORITHMS = {
    Algorithm.KMEANS_RAW,
    Algorithm.HIERARCHICAL_RAW,
    Algorithm.AFFINITY_RAW,
}
ENCODED_ALGORITHMS = {
    Algorithm.KMEANS_ENCODED,
    Algorithm.HIERARCHICAL_ENCODED,
    Algorithm.AFFINITY_ENCODED,
}
ONE_PASS_ALGORITHMS = {Algorithm.SB_KMEANS, Algorithm.BIN_WIDTH, Algorithm.BIN_HEIGHT}

# Choices the source material leaves open, surfaced in every report.
REPORT_NOTES = [
    "binary majority ties resolve to seeded per-call random bits",
    "anchor sample participates in its own similarity profile",
    "accuracy uses optimal matching, or majority mapping when clusters exceed k",
]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    algorithm: Algorithm
    encoding: EncodingKind = EncodingKind.RECORD
    mode: Mode = Mode.BINARY
    dim: int = 10000
    q: int = 16
    seeds: tuple[int, int] = (0, 499)
    refinement: RefinementConfig = field(default_factory=RefinementConfig)
    ap: ApConfig = field(default_factory=ApConfig)
    threads: int = 1

    def __post_init__(self):
        lo, hi = self.seeds
        if lo > hi or lo < 0:
            raise ConfigError(f"seed range {lo}..{hi} is not a valid inclusive range")
        if self.dim < 1 or self.q < 2:
            raise ConfigError(f"need dim >= 1 and q >= 2, got dim={self.dim}, q={self.q}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.refinement.one_pass and self.algorithm not in ONE_PASS_ALGORITHMS:
            raise ConfigError(
                f"one-pass mode applies only to {sorted(a.value for a in ONE_PASS_ALGORITHMS)}"
            )

    @property
    def seed_list(self) -> list[int]:
        return list(range(self.seeds[0], self.seeds[1] + 1))

    @property
    def uses_encoding(self) -> bool:
        return self.algorithm not in RAW_ALGORITHMS


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one seed. ``error`` is set when the run aborted."""

    seed: int
    accuracy: float | None = None
    accuracy_method: str | None = None
    iterations: int | None = None
    wall_time_seconds: float | None = None
    converged: bool | None = None
    n_clusters_found: int | None = None
    error: str | None = None


@dataclass(frozen=True)
class RunReport:
    config: dict
    records: list[RunRecord]
    aggregates: dict[str, RunStats]
    notes: list[str] = field(default_factory=lambda: list(REPORT_NOTES))

    @property
    def failed_records(self) -> list[RunRecord]:
        return [r for r in self.records if r.error is not None]

    def accuracies(self) -> np.ndarray:
        return np.array([r.accuracy for r in self.records if r.error is None])

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [asdict(r) for r in self.records],
            "aggregates": {name: asdict(s) for name, s in self.aggregates.items()},
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RunReport":
        return cls(
            config=payload["config"],
            records=[RunRecord(**r) for r in payload["records"]],
            aggregates={
                name: RunStats(**s) for name, s in payload["aggregates"].items()
            },
            notes=list(payload["notes"]),
        )


def _config_echo(config: ExperimentConfig) -> dict:
    echo = {
        "dataset": config.dataset,
        "algorithm": config.algorithm.value,
        "encoding": config.encoding.value if config.uses_encoding else None,
        "mode": config.mode.value if config.uses_encoding else None,
        "dim": config.dim if config.uses_encoding else None,
        "q": config.q if config.uses_encoding else None,
        "seeds": list(config.seeds),
        "max_iterations": config.refinement.max_iterations,
        "one_pass": config.refinement.one_pass,
        "cosine_threshold": config.refinement.cosine_threshold,
        "hamming_threshold": config.refinement.hamming_threshold,
        "ap_damping": config.ap.damping,
        "ap_preference": config.ap.preference,
    }
    return echo


def _encoded_points(encoded: EncodedDataset) -> np.ndarray:
    """Vector-space view of encoded queries for the traditional algorithms.

    Binary bits are used as-is: squared Euclidean distance between 0/1
    vectors equals their unnormalized Hamming distance. Integer queries are
    L2-normalized so squared Euclidean becomes 2*(1 - cosine).
    """
    if encoded.mode is Mode.BINARY:
        return encoded.bit_matrix().astype(np.float64)
    values = encoded.query_matrix().astype(np.float64)
    norms = np.linalg.norm(values, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return values / norms


def _negative_sq_euclidean(points: np.ndarray) -> np.ndarray:
    p2 = np.einsum("nd,nd->n", points, points)
    d2 = p2[:, None] + p2[None, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    return -d2


def _run_hdc(config: ExperimentConfig, dataset: RawDataset, seed: int) -> RunRecord:
    start = time.perf_counter()
    enc_config = EncodingConfig(
        encoding=config.encoding, mode=config.mode, dim=config.dim, q=config.q, seed=seed
    )
    encoded = encode_dataset(dataset, enc_config)
    root = RngStream(seed)
    algo = root.child(ALGO)
    ties = root.child(REGEN_TIES)
    k = dataset.k
    algorithm = config.algorithm
    if algorithm is Algorithm.HDCLUSTER:
        centers = init_hdcluster(k, config.dim, config.mode, algo)
    else:
        if algorithm is Algorithm.SB_KMEANS:
            init_assignments = init_sb_kmeans(encoded, k, algo)
        elif algorithm is Algorithm.BIN_WIDTH:
            init_assignments, _ = init_bin_width(encoded, k, algo)
        elif algorithm is Algorithm.BIN_HEIGHT:
            init_assignments = init_bin_height(encoded, k, algo)
        else:  # SB_AFFINITY
            init_assignments, ap_result = init_sb_affinity(encoded, config.ap)
            k = len(ap_result.exemplars)
        centers = regenerate(encoded, init_assignments, k=k, ties=ties, fill=algo)
    model = refine(encoded, centers, config.refinement, ties=ties)
    elapsed = time.perf_counter() - start
    acc, method = accuracy_with_method(model.assignments, encoded.labels, dataset.k)
    return RunRecord(
        seed=seed,
        accuracy=acc,
        accuracy_method=method,
        iterations=model.iterations,
        wall_time_seconds=elapsed,
        converged=model.converged,
        n_clusters_found=int(len(np.unique(model.assignments))),
    )


def _run_traditional(config: ExperimentConfig, dataset: RawDataset, seed: int) -> RunRecord:
    start = time.perf_counter()
    algorithm = config.algorithm
    encoded = None
    if algorithm in RAW_ALGORITHMS:
        points = dataset.samples
    else:
        enc_config = EncodingConfig(
            encoding=config.encoding, mode=config.mode,
            dim=config.dim, q=config.q, seed=seed,
        )
        encoded = encode_dataset(dataset, enc_config)
        points = _encoded_points(encoded)
    rng = RngStream(seed).child(ALGO)
    converged = True
    if algorithm in (Algorithm.KMEANS_RAW, Algorithm.KMEANS_ENCODED):
        result = kmeans(points, dataset.k, rng)
        assignments, iterations = result.assignments, result.iterations
    elif algorithm in (Algorithm.HIERARCHICAL_RAW, Algorithm.HIERARCHICAL_ENCODED):
        assignments = hierarchical(points, dataset.k)
        iterations = 0  # single deterministic pass of N - k merges
    else:
        if algorithm is Algorithm.AFFINITY_RAW:
            sims = _negative_sq_euclidean(points)
        elif encoded.mode is Mode.BINARY:
            sims = -pairwise_hamming(encoded.query_matrix(), encoded.dim)
        else:
            sims = pairwise_cosine(encoded.query_matrix())
            np.fill_diagonal(sims, 1.0)
        ap = affinity_propagation(sims, config.ap)
        assignments, iterations = ap.assignments, ap.iterations
        converged = ap.converged
    elapsed = time.perf_counter() - start
    acc, method = accuracy_with_method(assignments, dataset.labels, dataset.k)
    return RunRecord(
        seed=seed,
        accuracy=acc,
        accuracy_method=method,
        iterations=iterations,
        wall_time_seconds=elapsed,
        converged=converged,
        n_clusters_found=int(len(np.unique(assignments))),
    )


def _single_run(config: ExperimentConfig, dataset: RawDataset, seed: int) -> RunRecord:
    try:
        if config.algorithm in HDC_ALGORITHMS:
            return _run_hdc(config, dataset, seed)
        return _run_traditional(config, dataset, seed)
    except HdclustError as exc:
        return RunRecord(seed=seed, error=f"{type(exc).__name__}: {exc}")


def run_experiment(config: ExperimentConfig, dataset: RawDataset) -> RunReport:
    """Execute every seed in the configured range and aggregate the results.

    Seeds run concurrently on ``config.threads`` workers; the report is
    ordered by seed and identical (wall time aside) to a serial run.
    """
    seeds = config.seed_list
    if config.threads == 1:
        records = [_single_run(config, dataset, s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(lambda s: _single_run(config, dataset, s), seeds))
    good = [r for r in records if r.error is None]
    aggregates: dict[str, RunStats] = {}
    if good:
        aggregates["accuracy"] = aggregate([r.accuracy for r in good])
        aggregates["iterations"] = aggregate([r.iterations for r in good])
        aggregates["wall_time_seconds"] = aggregate([r.wall_time_seconds for r in good])
    return RunReport(config=_config_echo(config), records=records, aggregates=aggregates)


@dataclass(frozen=True)
class SpaceComparison:
    """Raw-space vs hyperspace results for the three traditional algorithms."""

    raw: dict[str, RunReport]
    encoded: dict[str, RunReport]

    def summary(self) -> dict[str, dict[str, float]]:
        out = {}
        for name in self.raw:
            raw_mean = self.raw[name].aggregates["accuracy"].mean
            enc_mean = self.encoded[name].aggregates["accuracy"].mean
            out[name] = {
                "raw_mean_accuracy": raw_mean,
                "encoded_mean_accuracy": enc_mean,
                "delta": enc_mean - raw_mean,
            }
        return out


_SPACE_PAIRS = {
    "kmeans": (Algorithm.KMEANS_RAW, Algorithm.KMEANS_ENCODED),
    "hierarchical": (Algorithm.HIERARCHICAL_RAW, Algorithm.HIERARCHICAL_ENCODED),
    "affinity": (Algorithm.AFFINITY_RAW, Algorithm.AFFINITY_ENCODED),
}


def compare_spaces(
    dataset: RawDataset,
    seeds: tuple[int, int],
    base: ExperimentConfig | None = None,
    output: str | None = None,
) -> SpaceComparison:
    """Run k-means, hierarchical, and affinity propagation on both the raw
    features and the encoded queries with paired seeds."""
    if base is None:
        base = ExperimentConfig(dataset=dataset.name, algorithm=Algorithm.KMEANS_RAW, seeds=seeds)
    raw = {}
    encoded = {}
    for name, (raw_algo, enc_algo) in _SPACE_PAIRS.items():
        raw[name] = run_experiment(replace(base, algorithm=raw_algo, seeds=seeds), dataset)
        encoded[name] = run_experiment(replace(base, algorithm=enc_algo, seeds=seeds), dataset)
    comparison = SpaceComparison(raw=raw, encoded=encoded)
    if output is not None:
        payload = {
            "summary": comparison.summary(),
            "raw": {n: r.to_dict() for n, r in raw.items()},
            "encoded": {n: r.to_dict() for n, r in encoded.items()},
        }
        with open(output, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
    return comparison


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

_CSV_COLUMNS = [
    "seed",
    "accuracy_pct",
    "accuracy_method",
    "iterations",
    "wall_time_seconds",
    "converged",
    "n_clusters_found",
    "error",
]


def _whiskers(stats: RunStats) -> tuple[float, float]:
    iqr = stats.q3 - stats.q1
    return stats.q1 - 1.5 * iqr, stats.q3 + 1.5 * iqr


def emit_report(report: RunReport, fmt: str, path) -> None:
    """Write a report as CSV (rows plus trailing aggregate block) or JSON.

    CSV accuracy is a percentage with two decimals; JSON keeps raw values so
    that parsing an emitted report reconstructs the report exactly.
    """
    if not report.records:
        raise EmptyInput("refusing to emit a report with no records")
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        return
    if fmt != "csv":
        raise ConfigError(f"unknown report format {fmt!r}")
    lines = [",".join(_CSV_COLUMNS)]
    for r in report.records:
        if r.error is not None:
            row = [str(r.seed), "", "", "", "", "", "", f'"{r.error}"']
        else:
            row = [
                str(r.seed),
                f"{100.0 * r.accuracy:.2f}",
                r.accuracy_method,
                str(r.iterations),
                f"{r.wall_time_seconds:.6f}",
                str(r.converged).lower(),
                str(r.n_clusters_found),
                "",
            ]
        lines.append(",".join(row))
    lines.append(
        "aggregate,quantity,mean,std,median,q1,q3,min,max,whisker_lo,whisker_hi,count"
    )
    for name, stats in report.aggregates.items():
        scale = 100.0 if name == "accuracy" else 1.0
        label = "accuracy_pct" if name == "accuracy" else name
        lo, hi = _whiskers(stats)
        values = [
            stats.mean, stats.std, stats.median, stats.q1, stats.q3,
            stats.min, stats.max, lo, hi,
        ]
        formatted = [f"{scale * v:.2f}" if scale == 100.0 else f"{v:.6f}" for v in values]
        lines.append(",".join(["aggregate", label] + formatted + [str(stats.count)]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_report(path) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))

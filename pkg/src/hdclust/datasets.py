"""CSV dataset loading, registry parsing, and stratified subsampling.

Datasets are plain delimited text files with one label column; everything
else must parse as a finite number. A registry file (INI key-value format,
one section per dataset) declares where each file lives and what shape to
expect, so a benchmark run can refer to datasets by name. Labels of any
type are mapped to dense integers in order of first appearance.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyInput,
    InsufficientSamples,
    MissingLabel,
    NonFiniteFeature,
    ParseError,
    SchemaMismatch,
)
from .rng import RngStream


@dataclass(frozen=True)
class DatasetSpec:
    """Declared shape and location of one dataset."""

    name: str
    path: str
    k: int
    n_features: int
    label_column: int | str = "last"  # column index or "last"
    delimiter: str = ","
    has_header: bool = False
    subsample: tuple[int, int] | None = None  # (count, seed)

    def __post_init__(self):
        if self.k < 2:
            raise SchemaMismatch(f"{self.name}: k must be at least 2, got {self.k}")


@dataclass(frozen=True)
class RawDataset:
    """N samples by n finite features, with dense integer labels in [0, k).

    ``row_ids`` record each sample's position in the originally loaded
    file, surviving subsetting and subsampling, so a report row can be
    traced back to its source line.
    """

    name: str
    samples: np.ndarray
    labels: np.ndarray
    k: int
    row_ids: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "row_ids", np.asarray(self.row_ids, dtype=np.int64))
        if self.samples.ndim != 2 or len(self.labels) != self.samples.shape[0]:
            raise SchemaMismatch(f"{self.name}: samples/labels shapes disagree")
        if len(self.row_ids) != self.samples.shape[0]:
            raise SchemaMismatch(f"{self.name}: row_ids length disagrees")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_features(self) -> int:
        return self.samples.shape[1]

    def subset(self, indices) -> "RawDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return RawDataset(
            name=self.name,
            samples=self.samples[indices],
            labels=self.labels[indices],
            k=self.k,
            row_ids=self.row_ids[indices],
        )


def from_arrays(name: str, samples, labels, k: int) -> RawDataset:
    """Build a RawDataset directly from in-memory arrays."""
    samples = np.asarray(samples, dtype=np.float64)
    return RawDataset(
        name=name,
        samples=samples,
        labels=np.asarray(labels),
        k=k,
        row_ids=np.arange(samples.shape[0]),
    )


def load(spec: DatasetSpec) -> RawDataset:
    """Load, validate, and optionally subsample one dataset file.

    Raises ParseError with 1-based file row/column coordinates on any
    malformed cell, SchemaMismatch if the feature count or the number of
    distinct labels disagrees with the spec, and NonFiniteFeature for
    NaN/infinite values.
    """
    path = Path(spec.path)
    if not path.exists():
        raise ParseError(f"{spec.name}: dataset file not found: {path}")
    rows = []
    labels = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        for line_no, record in enumerate(reader, start=1):
            if spec.has_header and line_no == 1:
                continue
            if not record or all(cell.strip() == "" for cell in record):
                continue
            label_idx = len(record) - 1 if spec.label_column == "last" else int(spec.label_column)
            if label_idx >= len(record) or record[label_idx].strip() == "":
                raise MissingLabel(f"{spec.name}: row {line_no} has no label")
            features = []
            for col, cell in enumerate(record):
                if col == label_idx:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{spec.name}: cannot parse {cell!r} at row {line_no}, column {col + 1}",
                        row=line_no,
                        column=col + 1,
                    ) from None
                if not np.isfinite(value):
                    raise NonFiniteFeature(
                        f"{spec.name}: non-finite value at row {line_no}, column {col + 1}"
                    )
                features.append(value)
            rows.append(features)
            labels.append(record[label_idx].strip())
    if not rows:
        raise EmptyInput(f"{spec.name}: dataset file {path} has no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"{spec.name}: rows have inconsistent field counts {sorted(widths)}")
    samples = np.asarray(rows, dtype=np.float64)
    if samples.shape[1] != spec.n_features:
        raise SchemaMismatch(
            f"{spec.name}: expected {spec.n_features} features, file has {samples.shape[1]}"
        )
    label_ids, dense = _densify_labels(labels)
    if len(label_ids) > spec.k:
        raise SchemaMismatch(
            f"{spec.name}: file has {len(label_ids)} distinct labels, more than k={spec.k}"
        )
    dataset = RawDataset(
        name=spec.name,
        samples=samples,
        labels=dense,
        k=spec.k,
        row_ids=np.arange(samples.shape[0]),
    )
    if spec.subsample is not None:
        count, seed = spec.subsample
        dataset = stratified_subsample(dataset, count, seed)
    return dataset


def _densify_labels(labels: list[str]):
    """Map raw label strings to 0..m-1 in order of first appearance."""
    seen: dict[str, int] = {}
    dense = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        if lab not in seen:
            seen[lab] = len(seen)
        dense[i] = seen[lab]
    return list(seen), dense


def stratified_subsample(dataset: RawDataset, count: int, seed: int) -> RawDataset:
    """Deterministic per-class proportional subsample of ``count`` rows.

    Class quotas follow the largest-remainder rule, so each class keeps its
    share of the subsample to within one row. Selected rows keep their
    original row_ids and their original relative order.
    """
    if count < 1 or count > dataset.n_samples:
        raise InsufficientSamples(
            f"subsample count {count} outside [1, {dataset.n_samples}]"
        )
    rng = RngStream(seed)
    classes, class_counts = np.unique(dataset.labels, return_counts=True)
    shares = count * class_counts / dataset.n_samples
    quotas = np.floor(shares).astype(np.int64)
    remainder = count - int(quotas.sum())
    by_fraction = np.argsort(-(shares - quotas), kind="stable")
    for idx in by_fraction[:remainder]:
        quotas[idx] += 1
    chosen = []
    for cls, quota in zip(classes, quotas):
        members = np.flatnonzero(dataset.labels == cls)
        picks = rng.permutation(len(members))[:quota]
        chosen.append(members[picks])
    order = np.sort(np.concatenate(chosen))
    return dataset.subset(order)


def load_registry(path) -> dict[str, DatasetSpec]:
    """Parse the dataset registry (INI format, one section per dataset).

    Recognized keys: path (required), k (required), n_features (required),
    label_column, delimiter, has_header, subsample_count, subsample_seed.
    Relative paths resolve against the registry file's directory.
    """
    registry_path = Path(path)
    if not registry_path.exists():
        raise ParseError(f"registry file not found: {registry_path}")
    parser = configparser.ConfigParser()
    parser.read(registry_path, encoding="utf-8")
    specs: dict[str, DatasetSpec] = {}
    for section in parser.sections():
        sec = parser[section]
        missing = [key for key in ("path", "k", "n_features") if key not in sec]
        if missing:
            raise ParseError(f"registry [{section}]: missing {', '.join(missing)}")
        try:
            data_path = sec["path"]
            k = sec.getint("k")
            n_features = sec.getint("n_features")
        except ValueError as exc:
            raise ParseError(f"registry [{section}]: {exc}") from None
        label_column: int | str = sec.get("label_column", "last")
        if label_column != "last":
            label_column = int(label_column)
        subsample = None
        if "subsample_count" in sec:
            subsample = (sec.getint("subsample_count"), sec.getint("subsample_seed", 0))
        resolved = Path(data_path)
        if not resolved.is_absolute():
            resolved = registry_path.parent / resolved
        specs[section] = DatasetSpec(
            name=section,
            path=str(resolved),
            k=k,
            n_features=n_features,
            label_column=label_column,
            delimiter=sec.get("delimiter", ","),
            has_header=sec.getboolean("has_header", fallback=False),
            subsample=subsample,
        )
    return specs


__all__ = [
    "DatasetSpec",
    "RawDataset",
    "from_arrays",
    "load",
    "load_registry",
    "stratified_subsample",
]

"""Clustering accuracy against ground truth and multi-run statistics.

Accuracy is label-permutation invariant. With at most k predicted clusters
it is the maximum-weight one-to-one matching between predicted clusters and
true labels over the contingency table; with more than k predicted clusters
(affinity propagation can elect extra exemplars) each predicted cluster
maps to its majority label instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyInput, LengthMismatch


@dataclass(frozen=True)
class Contingency:
    """Counts of (predicted cluster, true label) pairs; rows are predictions."""

    table: np.ndarray
    n_pred: int
    n_true: int

    @classmethod
    def build(cls, assignments, labels) -> "Contingency":
        assignments = np.asarray(assignments, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if assignments.shape != labels.shape:
            raise LengthMismatch(
                f"assignments ({assignments.shape}) vs labels ({labels.shape})"
            )
        if assignments.size == 0:
            raise EmptyInput("no samples to score")
        _, pred_dense = np.unique(assignments, return_inverse=True)
        _, true_dense = np.unique(labels, return_inverse=True)
        n_pred = int(pred_dense.max()) + 1
        n_true = int(true_dense.max()) + 1
        table = np.zeros((n_pred, n_true), dtype=np.int64)
        np.add.at(table, (pred_dense, true_dense), 1)
        return cls(table=table, n_pred=n_pred, n_true=n_true)


def matching_accuracy(contingency: Contingency) -> float:
    """Best one-to-one mapping of predicted clusters to labels (Hungarian)."""
    rows, cols = linear_sum_assignment(-contingency.table)
    return float(contingency.table[rows, cols].sum()) / float(contingency.table.sum())


def majority_accuracy(contingency: Contingency) -> float:
    """Each predicted cluster counts its most frequent true label."""
    return float(contingency.table.max(axis=1).sum()) / float(contingency.table.sum())


def accuracy_with_method(assignments, labels, k: int) -> tuple[float, str]:
    """Accuracy in [0,1] plus which rule was applied ("matching"/"majority")."""
    contingency = Contingency.build(assignments, labels)
    if contingency.n_pred > k:
        return majority_accuracy(contingency), "majority"
    return matching_accuracy(contingency), "matching"


def accuracy(assignments, labels, k: int) -> float:
    return accuracy_with_method(assignments, labels, k)[0]


@dataclass(frozen=True)
class RunStats:
    """Summary statistics over one measured quantity across runs.

    Standard deviation uses the n-1 denominator; a singleton sample gets
    std 0.0 by convention. Quartiles interpolate linearly.
    """

    mean: float
    std: float
    median: float
    q1: float
    q3: float
    min: float
    max: float
    count: int


def aggregate(values) -> RunStats:
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("cannot aggregate zero values")
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    return RunStats(
        mean=float(values.mean()),
        std=std,
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        min=float(values.min()),
        max=float(values.max()),
        count=int(values.size),
    )

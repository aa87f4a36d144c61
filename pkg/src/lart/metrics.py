"""Partition comparison: normalised mutual information and Fowlkes-Mallows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BACKGROUND = -1


def expand_background(labels) -> np.ndarray:
    """Give every BACKGROUND element its own fresh label."""
    labels = np.asarray(labels, dtype=np.int64).copy()
    bg = labels == BACKGROUND
    if bg.any():
        start = labels.max(initial=-1) + 1
        labels[bg] = start + np.arange(int(bg.sum()))
    return labels


def _as_labels(p):
    return np.asarray(getattr(p, "labels", p))


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray

    @classmethod
    def from_labels(cls, a, b) -> "ContingencyTable":
        a, b = _as_labels(a), _as_labels(b)
        if a.shape != b.shape:
            raise ValueError(f"partitions cover different element sets: {a.shape} vs {b.shape}")
        _, ai = np.unique(expand_background(a), return_inverse=True)
        _, bi = np.unique(expand_background(b), return_inverse=True)
        counts = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
        np.add.at(counts, (ai, bi), 1)
        return cls(counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def rows(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cols(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _entropy(marg, n):
    p = marg[marg > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(p1, p2) -> float:
    """Mutual information normalised by the geometric mean of the entropies.

    Degenerate cases: identical partitions score 1 even when an entropy is
    zero; otherwise a zero entropy (no shared information) scores 0.
    """
    table = ContingencyTable.from_labels(p1, p2)
    n = table.n
    if n == 0:
        raise ValueError("cannot compare empty partitions")
    h1, h2 = _entropy(table.rows, n), _entropy(table.cols, n)
    if h1 == 0.0 or h2 == 0.0:
        return 1.0 if _identical(table) else 0.0
    c = table.counts
    nz = c > 0
    outer = np.outer(table.rows, table.cols)[nz]
    mi = float(np.sum(c[nz] / n * np.log(c[nz] * n / outer)))
    return float(min(1.0, max(0.0, mi / np.sqrt(h1 * h2))))


def fowlkes_mallows(p1, p2) -> float:
    """Pair-counting Fowlkes-Mallows index ``T / sqrt(P Q)``."""
    table = ContingencyTable.from_labels(p1, p2)
    n = table.n
    c = table.counts.astype(np.float64)
    T = float(np.sum(c * c)) - n
    P = float(np.sum(table.rows.astype(np.float64) ** 2)) - n
    Q = float(np.sum(table.cols.astype(np.float64) ** 2)) - n
    if P == 0 or Q == 0:
        return 1.0 if _identical(table) else 0.0
    return T / np.sqrt(P * Q)


def _identical(table: ContingencyTable) -> bool:
    # identical up to relabelling <=> each row and column has exactly one non-zero cell
    nz = table.counts > 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))

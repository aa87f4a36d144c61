"""Node-layer dissimilarities derived from the t-step walk."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import pairwise_dissimilarity
from .walk import TransitionPowers


@dataclass(frozen=True)
class DissimilarityMatrix:
    t: int
    values: np.ndarray


def _scaled_row(tp: TransitionPowers, x: int) -> np.ndarray:
    return tp.matrix[x] / np.sqrt(tp.degrees)


def same_layer_distance(tp: TransitionPowers, i: int, j: int, k: int) -> float:
    """Degree-weighted Euclidean distance between the rows of ``(i,k)`` and ``(j,k)``."""
    n = tp.num_nodes
    _check(tp, i, k)
    _check(tp, j, k)
    if i == j:
        return 0.0
    d = _scaled_row(tp, k * n + i) - _scaled_row(tp, k * n + j)
    return float(np.sqrt(d @ d))


def cross_layer_terms(tp: TransitionPowers, i: int, k: int, j: int, l: int):
    """The three squared components ``(s1, s2, s3)`` of a cross-layer distance.

    ``s1`` compares each node's own-layer block, ``s2`` the swapped blocks and
    ``s3`` every remaining layer.
    """
    if k == l:
        raise ValueError("cross_layer_distance needs k != l; use same_layer_distance")
    _check(tp, i, k)
    _check(tp, j, l)
    n, L = tp.num_nodes, tp.num_layers
    xa = _scaled_row(tp, k * n + i).reshape(L, n)
    xb = _scaled_row(tp, l * n + j).reshape(L, n)
    s1 = float(np.sum((xa[k] - xb[l]) ** 2))
    s2 = float(np.sum((xa[l] - xb[k]) ** 2))
    rest = [m for m in range(L) if m != k and m != l]
    s3 = float(np.sum((xa[rest] - xb[rest]) ** 2)) if rest else 0.0
    return s1, s2, s3


def cross_layer_distance(tp: TransitionPowers, i: int, k: int, j: int, l: int) -> float:
    return float(np.sqrt(sum(cross_layer_terms(tp, i, k, j, l))))


def distance(tp: TransitionPowers, i: int, k: int, j: int, l: int) -> float:
    if k == l:
        return same_layer_distance(tp, i, j, k)
    return cross_layer_distance(tp, i, k, j, l)


def dissimilarity_matrix(tp: TransitionPowers) -> DissimilarityMatrix:
    """All pairwise node-layer distances; exactly symmetric with a zero diagonal."""
    X = tp.matrix / np.sqrt(tp.degrees)[None, :]
    S = pairwise_dissimilarity(X, tp.num_nodes, tp.num_layers)
    return DissimilarityMatrix(t=tp.t, values=S)


def _check(tp, i, k):
    if not 0 <= i < tp.num_nodes:
        raise IndexError(f"node {i} out of range")
    if not 0 <= k < tp.num_layers:
        raise IndexError(f"layer {k} out of range")

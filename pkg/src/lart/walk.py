"""Random walk on the regularised supra-adjacency."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import SupraAdjacency

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransitionPowers:
    """The t-step transition matrix ``P^t`` (dense) and the degrees behind it."""

    t: int
    matrix: np.ndarray
    degrees: np.ndarray
    num_nodes: int
    num_layers: int


@dataclass(frozen=True)
class StationaryDistribution:
    probs: np.ndarray


def transition_matrix(sa: SupraAdjacency) -> sp.csr_matrix:
    """Row-stochastic one-step operator ``P = D^-1 A`` as CSR."""
    if np.any(sa.degrees <= 0):
        raise ValueError("supra-adjacency has a node-layer with non-positive degree")
    P = sp.diags(1.0 / sa.degrees) @ sa.regularized
    return P.tocsr()


def walk_power(P, t: int, *, degrees=None, num_nodes=None, num_layers=None) -> TransitionPowers:
    """Exact ``P^t`` by ``t - 1`` sparse-times-dense products.

    ``t = 0`` returns the identity and logs a warning, distances built from
    it carry no structure.
    """
    t = int(t)
    if t < 0:
        raise ValueError(f"walk length must be >= 0, got {t}")
    size = P.shape[0]
    if t == 0:
        log.warning("walk length t=0 gives the identity; dissimilarities will be meaningless")
        Pt = np.eye(size)
    else:
        Pt = P.toarray() if sp.issparse(P) else np.array(P, dtype=np.float64)
        Ps = sp.csr_matrix(P)
        for _ in range(t - 1):
            Pt = np.asarray(Ps @ Pt)
    if degrees is None:
        degrees = np.ones(size)
    if num_nodes is None:
        num_nodes, num_layers = size, 1
    return TransitionPowers(t=t, matrix=Pt, degrees=np.asarray(degrees, dtype=np.float64),
                            num_nodes=int(num_nodes), num_layers=int(num_layers))


def walk(sa: SupraAdjacency, t: int) -> TransitionPowers:
    """``P^t`` for the walk defined by ``sa``, carrying its degrees."""
    return walk_power(transition_matrix(sa), t, degrees=sa.degrees,
                      num_nodes=sa.num_nodes, num_layers=sa.num_layers)


def stationary(sa: SupraAdjacency) -> StationaryDistribution:
    """Degree-proportional stationary distribution."""
    kappa = np.asarray(sa.degrees, dtype=np.float64)
    return StationaryDistribution(probs=kappa / kappa.sum())


def reversibility_error(tp: TransitionPowers) -> float:
    """Max relative violation of ``kappa_x P^t[x,y] = kappa_y P^t[y,x]``."""
    F = tp.degrees[:, None] * tp.matrix
    scale = np.maximum(np.abs(F), np.abs(F.T))
    diff = np.abs(F - F.T)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, diff / scale, 0.0)
    return float(rel.max())


def dump_matrix_csv(M, path) -> None:
    """Write a dense matrix as CSV, row/column index = flat node-layer index."""
    np.savetxt(path, np.asarray(M), delimiter=",", fmt="%.17g")

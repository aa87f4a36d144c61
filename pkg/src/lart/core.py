"""Multiplex data model, inter-layer weights and supra-adjacency construction.

Node-layer pairs are flattened layer-major: ``(node i, layer k) -> k * N + i``.
Every matrix, partition and file in this package uses that convention.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp


class MultiplexFormatError(ValueError):
    """Raised when a multiplex or partition file cannot be parsed."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


def flat_index(node: int, layer: int, num_nodes: int) -> int:
    return layer * num_nodes + node


def unflat_index(x: int, num_nodes: int) -> tuple[int, int]:
    """Inverse of :func:`flat_index`, returns ``(node, layer)``."""
    layer, node = divmod(x, num_nodes)
    return node, layer


@dataclass(frozen=True)
class NodeLayer:
    node: int
    layer: int

    def flat(self, num_nodes: int) -> int:
        return flat_index(self.node, self.layer, num_nodes)


@dataclass(frozen=True)
class Multiplex:
    """N nodes replicated over L undirected, unweighted layers.

    Parameters
    ----------
    num_nodes : int
        Number of nodes N shared by every layer.
    num_layers : int
        Number of layers L.
    layers : sequence of edge iterables
        One iterable of ``(u, v)`` pairs per layer. Edges are stored
        canonically with ``u < v``; duplicates given in either orientation
        collapse to one edge.
    """

    num_nodes: int
    num_layers: int
    layers: tuple = field(default=())

    def __post_init__(self):
        n, L = int(self.num_nodes), int(self.num_layers)
        if n < 1 or L < 1:
            raise ValueError(f"need num_nodes >= 1 and num_layers >= 1, got {n}, {L}")
        if len(self.layers) != L:
            raise ValueError(f"expected {L} layers, got {len(self.layers)}")
        canon = []
        for k, edges in enumerate(self.layers):
            layer = set()
            for u, v in edges:
                u, v = int(u), int(v)
                if not (0 <= u < n and 0 <= v < n):
                    raise ValueError(f"edge ({u}, {v}) in layer {k} out of range [0, {n})")
                if u == v:
                    raise ValueError(f"self-loop on node {u} in layer {k}")
                layer.add((u, v) if u < v else (v, u))
            canon.append(frozenset(layer))
        object.__setattr__(self, "num_nodes", n)
        object.__setattr__(self, "num_layers", L)
        object.__setattr__(self, "layers", tuple(canon))

    @property
    def size(self) -> int:
        """Number of node-layer pairs, N * L."""
        return self.num_nodes * self.num_layers

    def num_edges(self, layer=None) -> int:
        if layer is None:
            return sum(len(e) for e in self.layers)
        return len(self.layers[layer])

    def adjacency(self, layer: int) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency of one layer as CSR."""
        return self._adjacencies[layer]

    @cached_property
    def _adjacencies(self):
        n = self.num_nodes
        out = []
        for edges in self.layers:
            if edges:
                e = np.array(sorted(edges), dtype=np.int64)
                rows = np.concatenate([e[:, 0], e[:, 1]])
                cols = np.concatenate([e[:, 1], e[:, 0]])
                data = np.ones(len(rows), dtype=np.float64)
            else:
                rows = cols = np.empty(0, dtype=np.int64)
                data = np.empty(0, dtype=np.float64)
            out.append(sp.csr_matrix((data, (rows, cols)), shape=(n, n)))
        return tuple(out)

    @cached_property
    def _neighbors(self):
        n = self.num_nodes
        out = []
        for edges in self.layers:
            nb = [set() for _ in range(n)]
            for u, v in edges:
                nb[u].add(v)
                nb[v].add(u)
            out.append(tuple(frozenset(s) for s in nb))
        return tuple(out)

    def neighbors(self, node: int, layer: int) -> frozenset:
        self._check_node(node)
        self._check_layer(layer)
        return self._neighbors[layer][node]

    def degree(self, node: int, layer: int) -> int:
        return len(self.neighbors(node, layer))

    def layer_degrees(self) -> np.ndarray:
        """Within-layer degrees as an ``(L, N)`` array."""
        return np.array(
            [np.asarray(a.sum(axis=1)).ravel() for a in self._adjacencies]
        ).reshape(self.num_layers, self.num_nodes)

    def _check_node(self, i):
        if not 0 <= i < self.num_nodes:
            raise IndexError(f"node {i} out of range [0, {self.num_nodes})")

    def _check_layer(self, k):
        if not 0 <= k < self.num_layers:
            raise IndexError(f"layer {k} out of range [0, {self.num_layers})")


def interlayer_weight(m: Multiplex, i: int, k: int, l: int) -> int:
    """Number of neighbours node ``i`` has in common between layers ``k`` and ``l``."""
    if k == l:
        raise ValueError("interlayer_weight needs two distinct layers")
    return len(m.neighbors(i, k) & m.neighbors(i, l))


def interlayer_weights(m: Multiplex) -> np.ndarray:
    """All common-neighbour counts as an ``(L, L, N)`` array (zero where k == l)."""
    L, n = m.num_layers, m.num_nodes
    out = np.zeros((L, L, n), dtype=np.float64)
    adj = [m.adjacency(k) for k in range(L)]
    for k in range(L):
        for l in range(k + 1, L):
            # row i of A_k * A_l (elementwise) sums to |N_ik & N_il|
            w = np.asarray(adj[k].multiply(adj[l]).sum(axis=1)).ravel()
            out[k, l] = out[l, k] = w
    return out


@dataclass(frozen=True)
class SupraAdjacency:
    """Raw and epsilon-regularised NL x NL supra-adjacency of a multiplex.

    ``raw`` holds the layer adjacencies on the diagonal blocks and
    ``diag(omega_{.;kl})`` on the off-diagonal blocks. ``regularized`` adds
    ``epsilon`` to the main diagonal of every block. ``degrees`` are the row
    sums of ``regularized``.
    """

    num_nodes: int
    num_layers: int
    raw: sp.csr_matrix
    regularized: sp.csr_matrix
    epsilon: float
    degrees: np.ndarray
    omega: np.ndarray
    fixed_omega: float | None = None

    @property
    def size(self) -> int:
        return self.num_nodes * self.num_layers

    def layer_degrees(self) -> np.ndarray:
        """Within-layer degrees from the raw diagonal blocks, shape ``(L, N)``."""
        n, L = self.num_nodes, self.num_layers
        out = np.empty((L, n))
        for k in range(L):
            block = self.raw[k * n:(k + 1) * n, k * n:(k + 1) * n]
            out[k] = np.asarray(block.sum(axis=1)).ravel()
        return out


def _check_epsilon(epsilon):
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")


def _assemble(m: Multiplex, omega: np.ndarray, epsilon: float, fixed=None) -> SupraAdjacency:
    n, L = m.num_nodes, m.num_layers
    blocks = [[None] * L for _ in range(L)]
    for k in range(L):
        blocks[k][k] = m.adjacency(k)
        for l in range(L):
            if l != k:
                blocks[k][l] = sp.diags(omega[k, l], format="csr")
    raw = sp.bmat(blocks, format="csr")
    raw.eliminate_zeros()
    coupling = sp.kron(np.ones((L, L)), sp.identity(n), format="csr") * epsilon
    regularized = (raw + coupling).tocsr()
    regularized.sort_indices()
    degrees = np.asarray(regularized.sum(axis=1)).ravel()
    return SupraAdjacency(
        num_nodes=n,
        num_layers=L,
        raw=raw,
        regularized=regularized,
        epsilon=float(epsilon),
        degrees=degrees,
        omega=omega,
        fixed_omega=fixed,
    )


def build_supra(m: Multiplex, epsilon: float = 1.0) -> SupraAdjacency:
    """Supra-adjacency with locally adaptive inter-layer weights."""
    _check_epsilon(epsilon)
    return _assemble(m, interlayer_weights(m), epsilon)


def build_supra_fixed(m: Multiplex, omega: float, epsilon: float = 1.0) -> SupraAdjacency:
    """Supra-adjacency with every inter-layer weight set to ``omega``."""
    _check_epsilon(epsilon)
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    L, n = m.num_layers, m.num_nodes
    w = np.full((L, L, n), float(omega))
    for k in range(L):
        w[k, k] = 0.0
    return _assemble(m, w, epsilon, fixed=float(omega))


# --- text I/O -------------------------------------------------------------

def _data_lines(lines: Iterable[str]):
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        yield lineno, s


def _parse_header(s, lineno, path):
    fields = {}
    for tok in s.split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise MultiplexFormatError(f"bad header token {tok!r}", lineno, path)
        try:
            fields[key] = int(val)
        except ValueError:
            raise MultiplexFormatError(f"non-integer header value {tok!r}", lineno, path) from None
    if set(fields) != {"layers", "nodes"}:
        raise MultiplexFormatError("header must be 'layers=<L> nodes=<N>'", lineno, path)
    if fields["layers"] < 1 or fields["nodes"] < 1:
        raise MultiplexFormatError("layers and nodes must be >= 1", lineno, path)
    return fields["layers"], fields["nodes"]


def parse_multiplex(lines: Iterable[str], path=None) -> Multiplex:
    it = _data_lines(lines)
    try:
        lineno, header = next(it)
    except StopIteration:
        raise MultiplexFormatError("empty file, missing header", None, path) from None
    L, n = _parse_header(header, lineno, path)
    layers = [set() for _ in range(L)]
    for lineno, s in it:
        parts = s.split()
        if len(parts) != 3:
            raise MultiplexFormatError(
                f"expected '<layer> <u> <v>', got {len(parts)} fields", lineno, path)
        try:
            k, u, v = (int(p) for p in parts)
        except ValueError:
            raise MultiplexFormatError(f"non-integer field in {s!r}", lineno, path) from None
        if not 0 <= k < L:
            raise MultiplexFormatError(f"layer {k} out of range [0, {L})", lineno, path)
        if not (0 <= u < n and 0 <= v < n):
            raise MultiplexFormatError(f"node index out of range [0, {n}) in {s!r}", lineno, path)
        if u == v:
            raise MultiplexFormatError(f"self-loop on node {u}", lineno, path)
        e = (u, v) if u < v else (v, u)
        if e in layers[k]:
            raise MultiplexFormatError(f"duplicate edge {e} in layer {k}", lineno, path)
        layers[k].add(e)
    return Multiplex(n, L, tuple(layers))


def read_multiplex(path) -> Multiplex:
    with open(path, encoding="utf-8") as fh:
        return parse_multiplex(fh, path=os.fspath(path))


def format_multiplex(m: Multiplex) -> str:
    out = [f"layers={m.num_layers} nodes={m.num_nodes}"]
    for k, edges in enumerate(m.layers):
        out.extend(f"{k} {u} {v}" for u, v in sorted(edges))
    return "\n".join(out) + "\n"


def write_multiplex(m: Multiplex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_multiplex(m))

"""Seeded synthetic multiplexes with planted node-layer communities.

Five scenarios:

* ``S1`` shared and layer-specific communities, each living on a random
  non-empty subset of 3 layers and background elsewhere.
* ``S2`` communities shared by all 3 layers, fragmented into 2-3 dense
  pieces in two of them.
* ``S3`` communities shared by all 3 layers; in one layer two of them are
  sparse and joined by heavy noise.
* ``S4`` two layers carry shared communities; in the third, pairs of them are
  reshuffled into two bipartite layer-specific communities.
* ``S5`` 4 layers, each community drawn from one of the above styles and
  present in at most 3 layers.

Every planted block is an Erdos-Renyi (or bipartite) piece; all other pairs
get independent noise edges with probability ``p_noise``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .core import Multiplex, MultiplexFormatError, _data_lines, _parse_header
from .metrics import BACKGROUND

SCENARIOS = ("S1", "S2", "S3", "S4", "S5")

NODE_RANGE = {"S1": (30, 90), "S2": (60, 80), "S3": (60, 80), "S4": (80, 80), "S5": (150, 180)}
NUM_LAYERS = {"S1": 3, "S2": 3, "S3": 3, "S4": 3, "S5": 4}
MIN_COMMUNITY = 8
MIN_PIECE = 4
BIPARTITE_P = 0.4
WEAK_P = (0.10, 0.20)
DEFAULT_NOISE = 0.01
DEFAULT_COMMUNITY_SIZE = 20


def normalize_scenario(name: str) -> str:
    s = str(name).strip().upper()
    if s not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")
    return s


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    seed: int
    p_in: tuple[float, float] = (0.25, 0.40)
    p_noise: float = DEFAULT_NOISE
    community_size: int = DEFAULT_COMMUNITY_SIZE

    def __post_init__(self):
        object.__setattr__(self, "scenario", normalize_scenario(self.scenario))
        lo, hi = self.p_in
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError(f"p_in range must satisfy 0 <= lo <= hi <= 1, got {self.p_in}")
        if not 0.0 <= self.p_noise <= 1.0:
            raise ValueError(f"p_noise must lie in [0, 1], got {self.p_noise}")
        if self.community_size < MIN_COMMUNITY:
            raise ValueError(f"community_size must be >= {MIN_COMMUNITY}")


@dataclass(frozen=True)
class GroundTruth:
    """Planted label per node-layer (flat layer-major); ``-1`` marks background."""

    labels: np.ndarray
    num_nodes: int
    num_layers: int
    manifest: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.num_nodes * self.num_layers,):
            raise ValueError("ground truth must label every node-layer")
        object.__setattr__(self, "labels", labels)

    def label(self, node, layer) -> int:
        return int(self.labels[layer * self.num_nodes + node])

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return (self.num_nodes == other.num_nodes and self.num_layers == other.num_layers
                and np.array_equal(self.labels, other.labels))

    __hash__ = None


class _Plan:
    """Edge probabilities and labels for one multiplex, filled layer by layer."""

    def __init__(self, n, L, p_noise):
        self.n, self.L = n, L
        self.prob = np.full((L, n, n), p_noise)
        self.labels = np.full((L, n), BACKGROUND, dtype=np.int64)
        self.communities = []
        self._next = 0

    def new_label(self):
        self._next += 1
        return self._next - 1

    def dense(self, layer, nodes, p):
        ix = np.ix_(nodes, nodes)
        self.prob[layer][ix] = p

    def bipartite(self, layer, half_a, half_b, p):
        self.prob[layer][np.ix_(half_a, half_a)] = 0.0
        self.prob[layer][np.ix_(half_b, half_b)] = 0.0
        self.prob[layer][np.ix_(half_a, half_b)] = p
        self.prob[layer][np.ix_(half_b, half_a)] = p

    def between(self, layer, nodes_a, nodes_b, p):
        self.prob[layer][np.ix_(nodes_a, nodes_b)] = p
        self.prob[layer][np.ix_(nodes_b, nodes_a)] = p

    def assign(self, layer, nodes, label):
        self.labels[layer, nodes] = label

    def sample(self, rng) -> Multiplex:
        layers = []
        iu = np.triu_indices(self.n, 1)
        for k in range(self.L):
            u = rng.random((self.n, self.n))
            hit = u[iu] < self.prob[k][iu]
            layers.append(list(zip(iu[0][hit].tolist(), iu[1][hit].tolist())))
        return Multiplex(self.n, self.L, tuple(layers))


def _community_sizes(n, target=DEFAULT_COMMUNITY_SIZE):
    count = max(2, n // target)
    size = n // count
    if size < MIN_COMMUNITY:
        count = max(2, n // MIN_COMMUNITY)
        size = n // count
    return count, size


def _split(rng, nodes, pieces):
    """Random split of ``nodes`` into ``pieces`` disjoint parts of >= MIN_PIECE nodes."""
    nodes = rng.permutation(nodes)
    slack = len(nodes) - pieces * MIN_PIECE
    if slack < 0:
        raise ValueError("community too small to split")
    extra = rng.multinomial(slack, np.full(pieces, 1.0 / pieces))
    bounds = np.cumsum(MIN_PIECE + extra)[:-1]
    return [np.sort(part) for part in np.split(nodes, bounds)]


def _halves(rng, nodes):
    nodes = rng.permutation(nodes)
    h = len(nodes) // 2
    return np.sort(nodes[:h]), np.sort(nodes[h:])


def _nonempty_subset(rng, L, max_size):
    subsets = [s for s in range(1, 2 ** L) if bin(s).count("1") <= max_size]
    mask = subsets[rng.integers(len(subsets))]
    return [k for k in range(L) if mask >> k & 1]


def _p(rng, cfg):
    return float(rng.uniform(*cfg.p_in))


def _plant_shared(plan, rng, cfg, nodes, layers, style, **extra):
    label = plan.new_label()
    p = _p(rng, cfg)
    for k in layers:
        plan.dense(k, nodes, p)
        plan.assign(k, nodes, label)
    rec = {"id": label, "style": style, "size": int(len(nodes)), "layers": [int(k) for k in layers],
           "p_in": {str(k): p for k in layers}}
    rec.update(extra)
    plan.communities.append(rec)
    return rec


def _plant_fragmented(plan, rng, cfg, nodes, layers, split_layers, style):
    """Shared community that falls apart into 2-3 dense pieces in ``split_layers``."""
    rec = _plant_shared(plan, rng, cfg, nodes, [k for k in layers if k not in split_layers], style)
    rec["layers"] = [int(k) for k in layers]
    # one split shared by all split layers; pieces are separate planted
    # blocks, so only noise runs between them
    parts = _split(rng, nodes, int(rng.integers(2, 4)))
    ps = [_p(rng, cfg) for _ in parts]
    for k in split_layers:
        for part, p in zip(parts, ps):
            plan.dense(k, part, p)
        plan.assign(k, nodes, rec["id"])
        rec["p_in"][str(k)] = ps
    rec["pieces"] = [int(len(part)) for part in parts]
    rec["split_layers"] = [int(k) for k in split_layers]
    return rec


def _plant_weak_pair(plan, rng, recs, nodes_of, layer):
    """Lower the density of two communities in ``layer`` and add noise between them."""
    for rec in recs:
        p = float(rng.uniform(*WEAK_P))
        plan.dense(layer, nodes_of[rec["id"]], p)
        rec["p_in"][str(layer)] = p
        rec["weak_layer"] = int(layer)
    if len(recs) == 2:
        q = float(rng.uniform(*WEAK_P))
        plan.between(layer, nodes_of[recs[0]["id"]], nodes_of[recs[1]["id"]], q)
        for rec, other in ((recs[0], recs[1]), (recs[1], recs[0])):
            rec["noise_partner"] = other["id"]
            rec["noise_p"] = q


def _plant_bipartite_pair(plan, rng, pair_nodes, layer, style):
    """Reshuffle the union of two communities into two bipartite communities in ``layer``."""
    union = np.concatenate(pair_nodes)
    first, second = _halves(rng, union)
    out = []
    for group in (first, second):
        a, b = _halves(rng, group)
        label = plan.new_label()
        plan.bipartite(layer, a, b, BIPARTITE_P)
        plan.assign(layer, group, label)
        rec = {"id": label, "style": style, "size": int(len(group)), "layers": [int(layer)],
               "bipartite_halves": [int(len(a)), int(len(b))], "p_in": {str(layer): BIPARTITE_P}}
        plan.communities.append(rec)
        out.append(rec)
    return out


def _scenario_s1(plan, rng, cfg, groups):
    for nodes in groups:
        _plant_shared(plan, rng, cfg, nodes, _nonempty_subset(rng, plan.L, plan.L), "S1")


def _scenario_s2(plan, rng, cfg, groups):
    for nodes in groups:
        split = sorted(rng.choice(plan.L, size=2, replace=False).tolist())
        _plant_fragmented(plan, rng, cfg, nodes, list(range(plan.L)), split, "S2")


def _scenario_s3(plan, rng, cfg, groups):
    recs = [_plant_shared(plan, rng, cfg, nodes, list(range(plan.L)), "S3") for nodes in groups]
    nodes_of = {rec["id"]: nodes for rec, nodes in zip(recs, groups)}
    pick = rng.choice(len(recs), size=2, replace=False)
    layer = int(rng.integers(plan.L))
    _plant_weak_pair(plan, rng, [recs[i] for i in sorted(pick.tolist())], nodes_of, layer)


def _scenario_s4(plan, rng, cfg, groups):
    layers = list(range(plan.L))
    special = int(rng.integers(plan.L))
    shared = [k for k in layers if k != special]
    order = rng.permutation(len(groups))
    for a, b in zip(order[0::2], order[1::2]):
        for nodes in (groups[a], groups[b]):
            _plant_shared(plan, rng, cfg, nodes, shared, "S4")
        _plant_bipartite_pair(plan, rng, (groups[a], groups[b]), special, "S4")
    if len(order) % 2:
        _plant_shared(plan, rng, cfg, groups[order[-1]], layers, "S4-unpaired")


def _scenario_s5(plan, rng, cfg, groups):
    L = plan.L
    styles = rng.integers(1, 5, size=len(groups))
    pending3, pending4 = [], []
    nodes_of = {}
    for nodes, style in zip(groups, styles.tolist()):
        if style == 1:
            _plant_shared(plan, rng, cfg, nodes, _nonempty_subset(rng, L, 3), "S1")
        elif style == 2:
            layers = sorted(rng.choice(L, size=3, replace=False).tolist())
            split = sorted(rng.choice(layers, size=2, replace=False).tolist())
            _plant_fragmented(plan, rng, cfg, nodes, layers, split, "S2")
        elif style == 3:
            layers = sorted(rng.choice(L, size=3, replace=False).tolist())
            rec = _plant_shared(plan, rng, cfg, nodes, layers, "S3")
            nodes_of[rec["id"]] = nodes
            pending3.append(rec)
        else:
            pending4.append(nodes)
    for a, b in zip(pending3[0::2], pending3[1::2]):
        common = sorted(set(a["layers"]) & set(b["layers"]))
        _plant_weak_pair(plan, rng, [a, b], nodes_of, int(rng.choice(common)))
    if len(pending3) % 2:
        rec = pending3[-1]
        _plant_weak_pair(plan, rng, [rec], nodes_of, int(rng.choice(rec["layers"])))
    for a, b in zip(pending4[0::2], pending4[1::2]):
        layers = sorted(rng.choice(L, size=3, replace=False).tolist())
        special = int(rng.choice(layers))
        shared = [k for k in layers if k != special]
        for nodes in (a, b):
            _plant_shared(plan, rng, cfg, nodes, shared, "S4")
        _plant_bipartite_pair(plan, rng, (a, b), special, "S4")
    if len(pending4) % 2:
        _plant_shared(plan, rng, cfg, pending4[-1], _nonempty_subset(rng, L, 3), "S4-unpaired")


_BUILDERS = {"S1": _scenario_s1, "S2": _scenario_s2, "S3": _scenario_s3,
             "S4": _scenario_s4, "S5": _scenario_s5}


def generate(cfg: ScenarioConfig) -> tuple[Multiplex, GroundTruth]:
    """Draw one multiplex and its planted labels; deterministic in ``cfg``."""
    rng = np.random.default_rng(cfg.seed)
    lo, hi = NODE_RANGE[cfg.scenario]
    n = int(rng.integers(lo, hi + 1))
    L = NUM_LAYERS[cfg.scenario]
    count, size = _community_sizes(n, cfg.community_size)
    perm = rng.permutation(n)
    groups = [np.sort(perm[c * size:(c + 1) * size]) for c in range(count)]
    plan = _Plan(n, L, cfg.p_noise)
    _BUILDERS[cfg.scenario](plan, rng, cfg, groups)
    m = plan.sample(rng)
    manifest = {
        "scenario": cfg.scenario,
        "seed": int(cfg.seed),
        "num_nodes": n,
        "num_layers": L,
        "p_in_range": list(cfg.p_in),
        "p_noise": cfg.p_noise,
        "community_size_target": cfg.community_size,
        "community_sizes": [int(len(g)) for g in groups],
        "background_nodes": int(n - count * size),
        "communities": plan.communities,
    }
    truth = GroundTruth(plan.labels.ravel(), n, L, manifest)
    return m, truth


# --- truth / partition files -------------------------------------------------

def format_labels(labels, num_nodes, num_layers) -> str:
    labels = np.asarray(labels)
    out = [f"# layers={num_layers} nodes={num_nodes}"]
    for k in range(num_layers):
        for i in range(num_nodes):
            out.append(f"{k} {i} {int(labels[k * num_nodes + i])}")
    return "\n".join(out) + "\n"


def parse_labels(lines, path=None):
    """Parse ``<layer> <node> <label>`` lines.

    Returns ``(labels, num_nodes, num_layers)``. The optional leading comment
    ``# layers=<L> nodes=<N>`` fixes the shape; without it the shape is taken
    from the largest indices seen. Every node-layer must appear exactly once.
    """
    lines = list(lines)
    shape = None
    for line in lines:
        s = line.strip()
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if body.startswith("layers="):
                shape = _parse_header(body, None, path)
            break
        if s:
            break
    seen = {}
    for lineno, s in _data_lines(lines):
        parts = s.split()
        if len(parts) != 3:
            raise MultiplexFormatError(f"expected '<layer> <node> <label>', got {s!r}", lineno, path)
        try:
            k, i, lab = (int(x) for x in parts)
        except ValueError:
            raise MultiplexFormatError(f"non-integer field in {s!r}", lineno, path) from None
        if k < 0 or i < 0:
            raise MultiplexFormatError(f"negative index in {s!r}", lineno, path)
        if lab < BACKGROUND:
            raise MultiplexFormatError(f"label must be >= -1, got {lab}", lineno, path)
        if shape is not None and (k >= shape[0] or i >= shape[1]):
            raise MultiplexFormatError(f"index out of range in {s!r}", lineno, path)
        if (k, i) in seen:
            raise MultiplexFormatError(f"duplicate node-layer ({i}, {k})", lineno, path)
        seen[(k, i)] = lab
    if not seen:
        raise MultiplexFormatError("no labels found", None, path)
    if shape is None:
        L = max(k for k, _ in seen) + 1
        n = max(i for _, i in seen) + 1
    else:
        L, n = shape
    labels = np.empty(n * L, dtype=np.int64)
    for k in range(L):
        for i in range(n):
            try:
                labels[k * n + i] = seen[(k, i)]
            except KeyError:
                raise MultiplexFormatError(
                    f"missing label for node {i} in layer {k}", None, path) from None
    return labels, n, L


def write_truth(gt: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_labels(gt.labels, gt.num_nodes, gt.num_layers))


def read_truth(path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        labels, n, L = parse_labels(fh, path=os.fspath(path))
    return GroundTruth(labels, n, L)


def write_manifest(gt: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(gt.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

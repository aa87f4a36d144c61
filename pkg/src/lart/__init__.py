"""LART: community detection in multiplex networks with locally adaptive random walks."""

__version__ = "0.1.0"

from .core import (
    Multiplex,
    MultiplexFormatError,
    NodeLayer,
    SupraAdjacency,
    build_supra,
    build_supra_fixed,
    interlayer_weight,
    read_multiplex,
    write_multiplex,
)
from .walk import TransitionPowers, StationaryDistribution, stationary, transition_matrix, walk_power
from .dissim import (
    DissimilarityMatrix,
    cross_layer_distance,
    dissimilarity_matrix,
    same_layer_distance,
)
from .cluster import (
    Dendrogram,
    Partition,
    agglomerate,
    lart_detect,
    multiplex_modularity,
    run_lart,
    select_partition,
)
from .metrics import fowlkes_mallows, nmi
from .synthgen import GroundTruth, ScenarioConfig, generate, read_truth, write_truth

__all__ = [
    "Multiplex", "MultiplexFormatError", "NodeLayer", "SupraAdjacency",
    "build_supra", "build_supra_fixed", "interlayer_weight", "read_multiplex", "write_multiplex",
    "TransitionPowers", "StationaryDistribution", "stationary", "transition_matrix", "walk_power",
    "DissimilarityMatrix", "cross_layer_distance", "dissimilarity_matrix", "same_layer_distance",
    "Dendrogram", "Partition", "agglomerate", "lart_detect", "multiplex_modularity", "run_lart",
    "select_partition", "fowlkes_mallows", "nmi",
    "GroundTruth", "ScenarioConfig", "generate", "read_truth", "write_truth",
]

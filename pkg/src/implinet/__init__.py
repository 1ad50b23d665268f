"""Deductive implication networks: bit-string nodes grown by local transformations."""

from implinet.analysis import (
    DegreeRankTable,
    MetricsReport,
    SweepRow,
    UndirectedGraph,
    analyze,
    average_path_length,
    clustering,
    degree_rank,
    generate_ba,
    loglog_slope,
    paper_n_list,
    run_sweep,
    undirected_projection,
)
from implinet.bitstring import BitString, RandomSource, collapse, deduce_pair, expand, implies
from implinet.graph import DirectedGraph, Snapshot, SnapshotError, load_snapshot, save_snapshot
from implinet.growth import (
    Direction,
    GrowthConfig,
    RecheckMode,
    TransformReport,
    grow,
    init_network,
    local_transform,
    validate_soundness,
)

__version__ = "0.1.0"

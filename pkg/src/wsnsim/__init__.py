"""Deterministic WSN data-aggregation simulator and protocol library.

Pipeline: EM clustering of node positions, per-cluster energy/distance
aggregation trees, FDMA band allocation, hybrid TDMA/FDMA scheduling, and
round-based lifetime simulation.
"""

from .core import (
    NeighborGraph,
    NodeState,
    Scenario,
    build_neighbor_graph,
    euclidean_distance,
    two_hop_neighbors,
)
from .clustering import Clustering, GaussianMixture, run_emd
from .tree import AggregationTree, build_tree, edge_key, replay_check, select_sub_sink
from .fdma import FrequencyPlan, channel_frequency, partition_band, request_allotment, withdraw_half
from .scheduling import Schedule, assign_slots, cycle_length, invert_slots, validate_schedule
from .sim import (
    EnergyModel,
    SimMetrics,
    compare_baselines,
    run_simulation,
    rx_energy,
    tx_energy,
)
from .scenario_io import generate_random_scenario, parse_scenario, write_scenario

__version__ = "0.1.0"

__all__ = [
    "AggregationTree",
    "Clustering",
    "EnergyModel",
    "FrequencyPlan",
    "GaussianMixture",
    "NeighborGraph",
    "NodeState",
    "Scenario",
    "Schedule",
    "SimMetrics",
    "assign_slots",
    "build_neighbor_graph",
    "build_tree",
    "channel_frequency",
    "compare_baselines",
    "cycle_length",
    "edge_key",
    "euclidean_distance",
    "generate_random_scenario",
    "invert_slots",
    "parse_scenario",
    "partition_band",
    "replay_check",
    "request_allotment",
    "run_emd",
    "run_simulation",
    "rx_energy",
    "select_sub_sink",
    "tx_energy",
    "two_hop_neighbors",
    "validate_schedule",
    "withdraw_half",
    "write_scenario",
]

"""Shared domain types: nodes, scenarios, geometry, and the neighbor graph.

All types here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import CoincidentNodes, ScenarioError, TooFewNodes

ROLE_SOURCE = "source"
ROLE_SUB_SINK = "sub_sink"
ROLE_SINK = "sink"

RADIO_SLEEP = "sleep"
RADIO_LPL = "lpl"
RADIO_AWAKE = "awake"


@dataclass(frozen=True)
class NodeState:
    """One sensor node: identity, position (m), battery (J), and role."""

    id: int
    position: tuple[float, float]
    residual_energy: float
    role: str = ROLE_SOURCE
    radio_state: str = RADIO_SLEEP
    cluster_id: Optional[int] = None

    @property
    def alive(self) -> bool:
        return self.residual_energy > 0.0


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one deployment and its simulation knobs."""

    area: tuple[float, float]
    nodes: tuple[NodeState, ...]
    sink_id: int
    K: int
    band: tuple[float, float] = (2.400e9, 2.480e9)
    channels_per_range: int = 4
    theta_em: float = 1e-6
    max_em_iters: int = 200
    e_elec: float = 50e-9
    e_amp: float = 100e-12
    e_lpl: float = 1e-6
    packet_bits: int = 1000
    comm_range: float = 30.0
    interference_range: float = 60.0
    refresh_fraction: float = 0.1
    max_rounds: int = 100
    seed: int = 0
    aggregation: bool = True

    def __post_init__(self):
        validate_scenario(self)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def sink(self) -> NodeState:
        return self.nodes[self.sink_id]

    def source_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.id != self.sink_id]

    def with_overrides(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)


def validate_scenario(s: Scenario) -> None:
    """Raise ScenarioError (or a subclass) on any invariant violation."""
    n = len(s.nodes)
    if n < 1:
        raise ScenarioError("scenario has no nodes")
    if s.K < 1:
        raise ScenarioError(f"K must be >= 1, got {s.K}")
    # The sink is excluded from clustering, so K sources are needed.
    if n - 1 < s.K:
        raise TooFewNodes(n - 1, s.K)
    if not (s.band[0] < s.band[1]):
        raise ScenarioError(f"empty frequency band {s.band}")
    if s.channels_per_range < 1:
        raise ScenarioError("channels_per_range must be >= 1")
    if s.theta_em <= 0:
        raise ScenarioError("theta_em must be > 0")
    if s.max_em_iters < 1:
        raise ScenarioError("max_em_iters must be >= 1")
    for name in ("e_elec", "e_amp", "e_lpl"):
        if getattr(s, name) < 0:
            raise ScenarioError(f"{name} must be >= 0")
    if s.packet_bits < 0:
        raise ScenarioError("packet_bits must be >= 0")
    if s.comm_range <= 0:
        raise ScenarioError("comm_range must be > 0")
    if s.interference_range < s.comm_range:
        raise ScenarioError("interference_range must be >= comm_range")
    if not (0.0 < s.refresh_fraction <= 1.0):
        raise ScenarioError("refresh_fraction must be in (0, 1]")
    if s.max_rounds < 0:
        raise ScenarioError("max_rounds must be >= 0")
    if s.area[0] <= 0 or s.area[1] <= 0:
        raise ScenarioError(f"degenerate area {s.area}")

    ids = [node.id for node in s.nodes]
    if ids != list(range(n)):
        raise ScenarioError("node ids must be the contiguous range 0..N-1, in order")
    sinks = [node.id for node in s.nodes if node.role == ROLE_SINK]
    if sinks != [s.sink_id]:
        raise ScenarioError(
            f"exactly one node must have the sink role and match sink_id={s.sink_id}, "
            f"found sink roles on {sinks}"
        )
    for node in s.nodes:
        if node.residual_energy < 0:
            raise ScenarioError(f"node {node.id} has negative energy")
        x, y = node.position
        if not (0 <= x <= s.area[0] and 0 <= y <= s.area[1]):
            raise ScenarioError(f"node {node.id} position {node.position} outside area {s.area}")
    for i in range(n):
        for j in range(i + 1, n):
            if s.nodes[i].position == s.nodes[j].position:
                raise CoincidentNodes(i, j)


def euclidean_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class NeighborGraph:
    """Disk-model adjacencies: communication and (wider) interference."""

    comm_adjacency: tuple[frozenset, ...]
    interference_adjacency: tuple[frozenset, ...]

    def comm(self, i: int) -> frozenset:
        return self.comm_adjacency[i]

    def interference(self, i: int) -> frozenset:
        return self.interference_adjacency[i]


def build_neighbor_graph(scenario: Scenario) -> NeighborGraph:
    n = scenario.n_nodes
    comm: list[set] = [set() for _ in range(n)]
    interf: list[set] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = euclidean_distance(scenario.nodes[i].position, scenario.nodes[j].position)
            if d <= scenario.comm_range:
                comm[i].add(j)
                comm[j].add(i)
            if d <= scenario.interference_range:
                interf[i].add(j)
                interf[j].add(i)
    return NeighborGraph(
        comm_adjacency=tuple(frozenset(s) for s in comm),
        interference_adjacency=tuple(frozenset(s) for s in interf),
    )


def two_hop_neighbors(graph: NeighborGraph, i: int) -> frozenset:
    """Nodes reachable in exactly two interference hops, excluding one-hop
    neighbors and i itself."""
    one_hop = graph.interference_adjacency[i]
    two_hop: set = set()
    for j in one_hop:
        two_hop |= graph.interference_adjacency[j]
    two_hop -= one_hop
    two_hop.discard(i)
    return frozenset(two_hop)

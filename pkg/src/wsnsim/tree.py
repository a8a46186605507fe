"""Per-cluster aggregation trees grown greedily on the key
residual-energy-of-parent / distance, rooted at the sub-sink."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .core import euclidean_distance
from .errors import ClusterDead, ClusterPartitioned, CoincidentNodes

Position = tuple[float, float]
KeyFn = Callable[[float, float], float]


def edge_key(parent_energy: float, distance: float) -> float:
    """Attachment key: candidate parent's residual energy over edge length."""
    if distance <= 0.0:
        raise CoincidentNodes(-1, -1)
    return parent_energy / distance


def distance_only_key(parent_energy: float, distance: float) -> float:
    """Baseline key that ignores energy (pure shortest-edge Prim)."""
    if distance <= 0.0:
        raise CoincidentNodes(-1, -1)
    return 1.0 / distance


@dataclass(frozen=True)
class AggregationTree:
    cluster_id: int
    root: int
    parent: dict[int, int]
    edge_key_values: dict[int, float]
    height: dict[int, int]

    def nodes(self) -> list[int]:
        return sorted(self.height)

    def children(self, node: int) -> list[int]:
        return sorted(c for c, p in self.parent.items() if p == node)

    def is_leaf(self, node: int) -> bool:
        return all(p != node for p in self.parent.values())


def select_sub_sink(
    cluster_nodes: Sequence[int],
    positions: Mapping[int, Position],
    energies: Mapping[int, float],
    sink_position: Position,
) -> int:
    """Alive cluster node closest to the sink; ties go to the lowest id."""
    alive = [n for n in cluster_nodes if energies[n] > 0.0]
    if not alive:
        raise ClusterDead(f"no alive node among {sorted(cluster_nodes)}")
    return min(alive, key=lambda n: (euclidean_distance(positions[n], sink_position), n))


def build_tree(
    cluster_nodes: Sequence[int],
    positions: Mapping[int, Position],
    energies: Mapping[int, float],
    sub_sink: int,
    comm_adjacency,
    cluster_id: int = 0,
    key_fn: KeyFn = edge_key,
) -> AggregationTree:
    """Prim-style growth from the sub-sink, always attaching the frontier
    edge with the maximum key; ties break on (lower child id, lower parent
    id). Energies are a snapshot: keys never change mid-build."""
    members = set(cluster_nodes)
    if sub_sink not in members:
        raise ValueError(f"sub_sink {sub_sink} not in cluster {sorted(members)}")
    in_tree = {sub_sink}
    parent: dict[int, int] = {}
    keys: dict[int, float] = {}
    height: dict[int, int] = {sub_sink: 0}
    # Heap entries (-key, child, parent); lazy deletion on pop.
    heap: list[tuple[float, int, int]] = []

    def push_frontier(u: int) -> None:
        for v in comm_adjacency[u]:
            if v in members and v not in in_tree:
                d = euclidean_distance(positions[u], positions[v])
                heapq.heappush(heap, (-key_fn(energies[u], d), v, u))

    push_frontier(sub_sink)
    while len(in_tree) < len(members):
        while heap:
            neg_key, v, u = heapq.heappop(heap)
            if v not in in_tree:
                break
        else:
            raise ClusterPartitioned(cluster_id, list(members - in_tree))
        parent[v] = u
        keys[v] = -neg_key
        height[v] = height[u] + 1
        in_tree.add(v)
        push_frontier(v)
    return AggregationTree(
        cluster_id=cluster_id,
        root=sub_sink,
        parent=parent,
        edge_key_values=keys,
        height=height,
    )


def _best_frontier_edge(
    in_tree: set,
    members: set,
    positions: Mapping[int, Position],
    energies: Mapping[int, float],
    comm_adjacency,
    key_fn: KeyFn,
):
    """Scan every (u in tree, v outside) comm edge for the max-key one."""
    best = None
    for u in sorted(in_tree):
        for v in sorted(comm_adjacency[u]):
            if v not in members or v in in_tree:
                continue
            d = euclidean_distance(positions[u], positions[v])
            k = key_fn(energies[u], d)
            cand = (-k, v, u)
            if best is None or cand < best:
                best = cand
    return best


def replay_check(
    tree: AggregationTree,
    positions: Mapping[int, Position],
    energies: Mapping[int, float],
    comm_adjacency,
    key_fn: KeyFn = edge_key,
) -> bool:
    """Replay the greedy growth and confirm the tree picked the maximum-key
    frontier edge (with the stated tie rule) at every step."""
    members = set(tree.height)
    in_tree = {tree.root}
    while len(in_tree) < len(members):
        best = _best_frontier_edge(
            in_tree, members, positions, energies, comm_adjacency, key_fn
        )
        if best is None:
            return False
        _, v, u = best
        if tree.parent.get(v) != u:
            return False
        in_tree.add(v)
    return True

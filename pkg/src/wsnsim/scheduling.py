"""Hybrid time-slot / channel assignment over the aggregation trees.

Nodes are visited level by level across all clusters; same-height interfering
nodes in the same cluster get a new slot when they are siblings and a new
channel otherwise. Slots are then inverted so children always transmit before
their parents and all data cascades to the sink in one cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import NeighborGraph, two_hop_neighbors
from .fdma import FrequencyPlan
from .tree import AggregationTree

SAME_SLOT_SAME_CHANNEL = "same_slot_same_channel_interfering"
CHILD_NOT_BEFORE_PARENT = "child_not_before_parent"
CHANNEL_OVERFLOW = "channel_overflow"


@dataclass(frozen=True)
class Schedule:
    slot: dict[int, int]
    channel: dict[int, int]
    t_max: int
    cluster_of: dict[int, int]
    channels_used: dict[int, int]
    sink_slot: dict[int, int]
    inverted: bool

    def round_length(self) -> int:
        """Slots consumed by one full cycle including sink serialization."""
        return max(self.sink_slot.values(), default=self.t_max)


@dataclass
class ConflictReport:
    entries: list[tuple[int, int, str]] = field(default_factory=list)

    def add(self, a: int, b: int, reason: str) -> None:
        self.entries.append((a, b, reason))

    @property
    def ok(self) -> bool:
        return not self.entries


def _interference_set(graph: NeighborGraph, i: int) -> frozenset:
    return graph.interference_adjacency[i] | two_hop_neighbors(graph, i)


def assign_slots(
    trees: Iterable[AggregationTree],
    graph: NeighborGraph,
    plan: FrequencyPlan,
) -> tuple[Schedule, ConflictReport]:
    """Pre-inversion assignment: level-order across all clusters, ascending
    node id within a level; default slot per level, conflicts resolved by the
    sibling/non-sibling rule. Channel exhaustion falls back to a fresh slot."""
    trees = list(trees)
    channels = plan.channels_per_range
    report = ConflictReport()
    cluster_of: dict[int, int] = {}
    parent_of: dict[int, int] = {}
    height_of: dict[int, int] = {}
    for t in trees:
        for n, h in t.height.items():
            cluster_of[n] = t.cluster_id
            height_of[n] = h
        parent_of.update(t.parent)

    max_height = max(height_of.values(), default=-1)
    slot: dict[int, int] = {}
    channel: dict[int, int] = {}
    interf_cache: dict[int, frozenset] = {}
    base = 1
    for h in range(max_height + 1):
        level = sorted(n for n, hh in height_of.items() if hh == h)
        visited: list[int] = []
        max_slot_used = base
        for n in level:
            s, c = base, 0
            interf = interf_cache.setdefault(n, _interference_set(graph, n))
            while True:
                conflict = None
                for m in visited:
                    # Different clusters sit in disjoint frequency ranges and
                    # can never collide physically.
                    if cluster_of[m] != cluster_of[n]:
                        continue
                    if (slot[m], channel[m]) == (s, c) and m in interf:
                        conflict = m
                        break
                if conflict is None:
                    break
                siblings = (
                    n in parent_of
                    and conflict in parent_of
                    and parent_of[n] == parent_of[conflict]
                )
                if siblings:
                    s += 1
                else:
                    c += 1
                    if c >= channels:
                        report.add(n, conflict, CHANNEL_OVERFLOW)
                        s += 1
                        c = 0
            slot[n] = s
            channel[n] = c
            visited.append(n)
            max_slot_used = max(max_slot_used, s)
        base = max_slot_used + 1

    t_max = max(slot.values(), default=0)
    channels_used = {}
    for t in trees:
        used = max((channel[n] for n in t.height), default=-1) + 1
        channels_used[t.cluster_id] = used
    # Sub-sink -> sink transmissions: serialized by ascending cluster id,
    # starting at t_max (the roots' own slot after inversion).
    sink_slot = {
        t.cluster_id: t_max + rank
        for rank, t in enumerate(sorted(trees, key=lambda t: t.cluster_id))
    }
    return (
        Schedule(
            slot=slot,
            channel=channel,
            t_max=t_max,
            cluster_of=cluster_of,
            channels_used=channels_used,
            sink_slot=sink_slot,
            inverted=False,
        ),
        report,
    )


def invert_slots(schedule: Schedule) -> Schedule:
    """Relabel every slot t to t_max - t + 1 (an involution)."""
    t_max = schedule.t_max
    return Schedule(
        slot={n: t_max - t + 1 for n, t in schedule.slot.items()},
        channel=dict(schedule.channel),
        t_max=t_max,
        cluster_of=dict(schedule.cluster_of),
        channels_used=dict(schedule.channels_used),
        sink_slot=dict(schedule.sink_slot),
        inverted=not schedule.inverted,
    )


def cycle_length(schedule: Schedule) -> int:
    return schedule.t_max


def validate_schedule(
    schedule: Schedule,
    trees: Iterable[AggregationTree],
    graph: NeighborGraph,
    channels_per_range: int | None = None,
) -> ConflictReport:
    """Brute-force checker: same-height interfering same-cluster pairs must
    differ in (slot, channel); children must transmit before parents; channel
    indices must stay in range."""
    trees = list(trees)
    report = ConflictReport()
    height_of: dict[int, int] = {}
    cluster_of: dict[int, int] = {}
    for t in trees:
        height_of.update(t.height)
        for n in t.height:
            cluster_of[n] = t.cluster_id
    nodes = sorted(schedule.slot)
    for i, a in enumerate(nodes):
        interf = graph.interference_adjacency[a] | two_hop_neighbors(graph, a)
        for b in nodes[i + 1 :]:
            if height_of.get(a) != height_of.get(b):
                continue
            if cluster_of.get(a) != cluster_of.get(b):
                continue
            if b not in interf:
                continue
            if (schedule.slot[a], schedule.channel[a]) == (
                schedule.slot[b],
                schedule.channel[b],
            ):
                report.add(a, b, SAME_SLOT_SAME_CHANNEL)
    for t in trees:
        for child, parent in t.parent.items():
            if schedule.slot[child] >= schedule.slot[parent]:
                report.add(child, parent, CHILD_NOT_BEFORE_PARENT)
    if channels_per_range is not None:
        for n in nodes:
            if schedule.channel[n] >= channels_per_range:
                report.add(n, n, CHANNEL_OVERFLOW)
    return report

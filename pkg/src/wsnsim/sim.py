"""Round-based energy simulation over the clustered, scheduled network.

One round walks the inverted TDMA slots: every alive node wakes once, sends a
single aggregated packet to its parent, and sub-sinks relay to the sink in
serialized slots at the end of the cycle. Topology/schedule broadcasts happen
in configuration epochs (initially and on every tree refresh).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .clustering import cluster_positions, run_emd
from .core import NeighborGraph, Scenario, build_neighbor_graph, euclidean_distance
from .fdma import FrequencyPlan, partition_band, request_allotment
from .scheduling import Schedule, assign_slots, invert_slots
from .tree import AggregationTree, KeyFn, build_tree, edge_key, distance_only_key, select_sub_sink


@dataclass(frozen=True)
class EnergyModel:
    e_elec: float
    e_amp: float
    e_lpl: float
    packet_bits: int

    @classmethod
    def from_scenario(cls, s: Scenario) -> "EnergyModel":
        return cls(e_elec=s.e_elec, e_amp=s.e_amp, e_lpl=s.e_lpl, packet_bits=s.packet_bits)


def tx_energy(model: EnergyModel, bits: float, distance: float) -> float:
    """Transmit cost: electronics plus distance-squared amplifier term."""
    return bits * (model.e_elec + model.e_amp * distance * distance)


def tx_energy_parts(model: EnergyModel, bits: float, distance: float) -> tuple[float, float]:
    return bits * model.e_elec, bits * model.e_amp * distance * distance


def rx_energy(model: EnergyModel, bits: float) -> float:
    return bits * model.e_elec


def aggregate(child_packets: int) -> int:
    """Perfect aggregation: one outgoing packet regardless of input count."""
    return 1


@dataclass
class SimState:
    """Mutable per-node energy ledger for one simulation."""

    energy: list[float]
    initial_energy: list[float]
    alive: list[bool]
    spent: list[float]
    spent_elec: float = 0.0
    spent_amp: float = 0.0
    spent_rx: float = 0.0
    spent_lpl: float = 0.0

    @classmethod
    def from_scenario(cls, s: Scenario) -> "SimState":
        energies = [n.residual_energy for n in s.nodes]
        return cls(
            energy=list(energies),
            initial_energy=list(energies),
            alive=[e > 0.0 for e in energies],
            spent=[0.0] * len(energies),
        )

    def pay(self, node: int, cost: float, category: str) -> bool:
        """Deduct cost if affordable; otherwise mark the node dead and pay
        nothing. A node drained to exactly zero is dead too."""
        if not self.alive[node]:
            return False
        if self.energy[node] < cost:
            self.alive[node] = False
            return False
        self.energy[node] -= cost
        self.spent[node] += cost
        if category == "elec":
            self.spent_elec += cost
        elif category == "amp":
            self.spent_amp += cost
        elif category == "rx":
            self.spent_rx += cost
        elif category == "lpl":
            self.spent_lpl += cost
        if self.energy[node] <= 0.0:
            self.alive[node] = False
        return True

    def pay_tx(self, node: int, model: EnergyModel, bits: float, distance: float) -> bool:
        elec, amp = tx_energy_parts(model, bits, distance)
        if not self.alive[node] or self.energy[node] < elec + amp:
            if self.alive[node]:
                self.alive[node] = False
            return False
        ok = self.pay(node, elec, "elec")
        assert ok
        # A node allowed to transmit pays both parts even if amp drains it.
        self.energy[node] -= amp
        self.spent[node] += amp
        self.spent_amp += amp
        if self.energy[node] <= 0.0:
            self.alive[node] = False
        return True


@dataclass
class RoundMetrics:
    round_index: int
    energy_spent: float
    tx_elec: float
    tx_amp: float
    rx: float
    lpl: float
    packets_delivered: int
    delivered_readings: int
    undelivered_readings: int
    max_latency_slots: int


@dataclass
class SimMetrics:
    rounds_completed: int = 0
    first_node_death_round: int = 0
    total_energy_spent: float = 0.0
    per_node_energy_spent: dict[int, float] = field(default_factory=dict)
    packets_delivered_to_sink: int = 0
    tree_refresh_count: int = 0
    max_delivery_latency_slots: int = 0
    per_round_energy: list[RoundMetrics] = field(default_factory=list)
    undelivered_readings: int = 0
    configuration_epochs: int = 0
    configuration_energy: float = 0.0
    amp_energy_total: float = 0.0
    initial_total_energy: float = 0.0
    final_residual_energy: float = 0.0


def run_round(
    state: SimState,
    schedule: Schedule,
    trees: list[AggregationTree],
    model: EnergyModel,
    positions: dict[int, tuple[float, float]],
    sink_id: int,
    aggregation: bool = True,
    round_index: int = 1,
) -> RoundMetrics:
    """One TDMA cycle: slots 1..t_max for intra-tree traffic, then serialized
    sub-sink-to-sink slots."""
    elec0, amp0, rx0, lpl0 = state.spent_elec, state.spent_amp, state.spent_rx, state.spent_lpl

    parent_of: dict[int, int] = {}
    for t in trees:
        parent_of.update(t.parent)
    tree_nodes = sorted(n for t in trees for n in t.height)
    alive_at_start = [n for n in tree_nodes if state.alive[n]]
    packets = {n: 1 for n in alive_at_start}
    readings = {n: 1 for n in alive_at_start}
    tx_slot_used: dict[int, int] = {}  # cluster -> min slot actually used

    by_slot: dict[int, list[int]] = {}
    for n in tree_nodes:
        if n in parent_of:
            by_slot.setdefault(schedule.slot[n], []).append(n)

    for s in sorted(by_slot):
        for n in sorted(by_slot[s]):
            if not state.alive[n]:
                continue
            p = parent_of[n]
            if not state.alive[p]:
                continue
            n_packets = aggregate(packets[n]) if aggregation else packets[n]
            bits = n_packets * model.packet_bits
            if not state.pay_tx(n, model, bits, euclidean_distance(positions[n], positions[p])):
                continue
            cid = schedule.cluster_of[n]
            tx_slot_used[cid] = min(tx_slot_used.get(cid, s), s)
            if not state.pay(p, rx_energy(model, bits), "rx"):
                continue  # parent died receiving; packet lost
            packets[p] = packets.get(p, 0) + n_packets
            readings[p] = readings.get(p, 0) + readings.get(n, 0)
            readings[n] = 0

    delivered_packets = 0
    delivered_readings = 0
    max_latency = 0
    for t in sorted(trees, key=lambda t: t.cluster_id):
        r = t.root
        sink_s = schedule.sink_slot[t.cluster_id]
        if not state.alive[r] or not state.alive[sink_id]:
            continue
        n_packets = aggregate(packets.get(r, 1)) if aggregation else packets.get(r, 1)
        bits = n_packets * model.packet_bits
        if not state.pay_tx(r, model, bits, euclidean_distance(positions[r], positions[sink_id])):
            continue
        cid = t.cluster_id
        first_slot = min(tx_slot_used.get(cid, sink_s), sink_s)
        if not state.pay(sink_id, rx_energy(model, bits), "rx"):
            continue
        delivered_packets += n_packets
        delivered_readings += readings.get(r, 0)
        max_latency = max(max_latency, sink_s - first_slot + 1)

    d_elec = state.spent_elec - elec0
    d_amp = state.spent_amp - amp0
    d_rx = state.spent_rx - rx0
    d_lpl = state.spent_lpl - lpl0
    return RoundMetrics(
        round_index=round_index,
        energy_spent=d_elec + d_amp + d_rx + d_lpl,
        tx_elec=d_elec,
        tx_amp=d_amp,
        rx=d_rx,
        lpl=d_lpl,
        packets_delivered=delivered_packets,
        delivered_readings=delivered_readings,
        undelivered_readings=len(alive_at_start) - delivered_readings,
        max_latency_slots=max_latency,
    )


def broadcast_topology(
    state: SimState,
    graph: NeighborGraph,
    model: EnergyModel,
    comm_range: float,
    sink_id: int,
) -> float:
    """Reliable flood from the sink over the communication graph. Every alive
    node reached for the first time pays one receive and one comm-range
    rebroadcast; the (mains-side) sink pays nothing."""
    spent_before = sum(state.spent)
    received = {sink_id}
    queue = [sink_id]
    while queue:
        u = queue.pop(0)
        for v in sorted(graph.comm_adjacency[u]):
            if v in received or not state.alive[v]:
                continue
            received.add(v)
            if not state.pay(v, rx_energy(model, model.packet_bits), "rx"):
                continue
            if state.pay_tx(v, model, model.packet_bits, comm_range):
                queue.append(v)
    return sum(state.spent) - spent_before


def charge_lpl(state: SimState, model: EnergyModel, sink_id: int) -> float:
    """One LPL listening slot per alive non-sink node per configuration epoch."""
    total = 0.0
    for n in range(len(state.energy)):
        if n == sink_id or not state.alive[n]:
            continue
        if state.pay(n, model.e_lpl, "lpl"):
            total += model.e_lpl
    return total


def needs_refresh(state: SimState, trees: list[AggregationTree], rho: float) -> bool:
    """True when a tree link is broken (dead node) or a relay node has
    dropped below the refresh fraction of its initial energy."""
    for t in trees:
        parents = set(t.parent.values())
        for n in t.height:
            if not state.alive[n]:
                return True
            if n in parents and state.energy[n] < rho * state.initial_energy[n]:
                return True
    return False


@dataclass
class Configuration:
    assignment: dict[int, int]  # node -> cluster
    trees: list[AggregationTree]
    schedule: Schedule
    plan: FrequencyPlan


def _configure(
    scenario: Scenario,
    state: SimState,
    graph: NeighborGraph,
    positions: dict[int, tuple[float, float]],
    assignment: dict[int, int],
    plan_k: int,
    model: EnergyModel,
    key_fn: KeyFn,
    metrics: SimMetrics,
) -> Configuration:
    """Build trees, frequency plan, and schedule for the current survivors,
    then run one configuration epoch (topology broadcast + LPL)."""
    energies = {n: state.energy[n] for n in range(scenario.n_nodes)}
    clusters: dict[int, list[int]] = {}
    for n, cid in assignment.items():
        if state.alive[n]:
            clusters.setdefault(cid, []).append(n)
    trees = []
    for cid in sorted(clusters):
        members = sorted(clusters[cid])
        sub = select_sub_sink(members, positions, energies, positions[scenario.sink_id])
        trees.append(
            build_tree(members, positions, energies, sub, graph.comm_adjacency, cid, key_fn)
        )
    plan = partition_band(scenario.band, plan_k, scenario.channels_per_range)
    for t in sorted(trees, key=lambda t: t.cluster_id):
        plan = request_allotment(plan, t.cluster_id)
    schedule, _report = assign_slots(trees, graph, plan)
    schedule = invert_slots(schedule)

    spent_before = sum(state.spent)
    broadcast_topology(state, graph, model, scenario.comm_range, scenario.sink_id)
    charge_lpl(state, model, scenario.sink_id)
    metrics.configuration_epochs += 1
    metrics.configuration_energy += sum(state.spent) - spent_before
    return Configuration(assignment=assignment, trees=trees, schedule=schedule, plan=plan)


def run_simulation(scenario: Scenario, key_fn: KeyFn = edge_key) -> SimMetrics:
    """Full pipeline: cluster, build trees, allocate frequencies, schedule,
    broadcast, then run rounds until every source is dead or max_rounds."""
    graph = build_neighbor_graph(scenario)
    positions = {n.id: n.position for n in scenario.nodes}
    model = EnergyModel.from_scenario(scenario)
    state = SimState.from_scenario(scenario)
    metrics = SimMetrics(initial_total_energy=sum(state.energy))
    sources = scenario.source_ids()

    def alive_sources() -> list[int]:
        return [n for n in sources if state.alive[n]]

    death_seen = len(alive_sources()) < len(sources)

    config: Optional[Configuration] = None
    if alive_sources():
        clustering = run_emd(scenario)
        assignment = dict(zip(clustering.node_ids, clustering.assignment))
        config = _configure(
            scenario, state, graph, positions, assignment, scenario.K, model, key_fn, metrics
        )
        if not death_seen and len(alive_sources()) < len(sources):
            death_seen = True  # configuration-epoch death counts as round 0

    rounds = 0
    while config is not None and rounds < scenario.max_rounds and alive_sources():
        rm = run_round(
            state,
            config.schedule,
            config.trees,
            model,
            positions,
            scenario.sink_id,
            aggregation=scenario.aggregation,
            round_index=rounds + 1,
        )
        rounds += 1
        metrics.per_round_energy.append(rm)
        metrics.packets_delivered_to_sink += rm.packets_delivered
        metrics.undelivered_readings += rm.undelivered_readings
        metrics.max_delivery_latency_slots = max(
            metrics.max_delivery_latency_slots, rm.max_latency_slots
        )
        if not death_seen and len(alive_sources()) < len(sources):
            metrics.first_node_death_round = rounds - 1
            death_seen = True
        survivors = alive_sources()
        if not survivors or rounds >= scenario.max_rounds:
            break
        if needs_refresh(state, config.trees, scenario.refresh_fraction):
            metrics.tree_refresh_count += 1
            assignment = config.assignment
            plan_k = len({assignment[n] for n in survivors if n in assignment})
            fully_dead_cluster = plan_k < len(
                {cid for cid in config.assignment.values()}
            ) or any(n not in assignment for n in survivors)
            if fully_dead_cluster:
                # A cluster died out entirely: re-run the whole pipeline on
                # the survivors with a feasible K.
                new_k = min(scenario.K, len(survivors))
                sub_clustering = cluster_positions(
                    tuple(survivors),
                    [positions[n] for n in survivors],
                    new_k,
                    scenario.seed,
                    scenario.theta_em,
                    scenario.max_em_iters,
                )
                assignment = dict(zip(sub_clustering.node_ids, sub_clustering.assignment))
                plan_k = new_k
            config = _configure(
                scenario, state, graph, positions, assignment, plan_k, model, key_fn, metrics
            )
            if not death_seen and len(alive_sources()) < len(survivors):
                metrics.first_node_death_round = rounds
                death_seen = True

    metrics.rounds_completed = rounds
    metrics.total_energy_spent = sum(state.spent)
    metrics.per_node_energy_spent = {n: state.spent[n] for n in range(scenario.n_nodes)}
    metrics.amp_energy_total = state.spent_amp
    metrics.final_residual_energy = sum(state.energy)
    return metrics


@dataclass(frozen=True)
class BaselineRow:
    variant: str
    first_node_death_round: int
    tree_refresh_count: int
    total_energy_spent: float
    packets_delivered_to_sink: int
    rounds_completed: int


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[BaselineRow, ...]


def compare_baselines(scenario: Scenario) -> ComparisonReport:
    """Run the pipeline with the energy/distance key and with a distance-only
    key, and report both metric rows side by side."""
    rows = []
    for variant, key_fn in (
        ("energy_distance", edge_key),
        ("distance_only", distance_only_key),
    ):
        m = run_simulation(scenario, key_fn=key_fn)
        rows.append(
            BaselineRow(
                variant=variant,
                first_node_death_round=m.first_node_death_round,
                tree_refresh_count=m.tree_refresh_count,
                total_energy_spent=m.total_energy_spent,
                packets_delivered_to_sink=m.packets_delivered_to_sink,
                rounds_completed=m.rounds_completed,
            )
        )
    return ComparisonReport(rows=tuple(rows))

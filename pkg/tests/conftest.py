import random

import pytest

from wsnsim.core import NodeState, ROLE_SINK, ROLE_SOURCE, Scenario


def make_scenario(positions, energies=None, sink_id=0, k=1, **kwargs):
    """Scenario from explicit positions; defaults are generous ranges so the
    comm graph stays connected."""
    n = len(positions)
    if energies is None:
        energies = [1.0] * n
    xs = [p[0] for p in positions]
    ys = [p[1] for p in positions]
    area = kwargs.pop("area", (max(max(xs), 1.0), max(max(ys), 1.0)))
    kwargs.setdefault("comm_range", 1e6)
    kwargs.setdefault("interference_range", 1e6)
    nodes = tuple(
        NodeState(
            id=i,
            position=tuple(positions[i]),
            residual_energy=energies[i],
            role=ROLE_SINK if i == sink_id else ROLE_SOURCE,
        )
        for i in range(n)
    )
    return Scenario(area=area, nodes=nodes, sink_id=sink_id, K=k, **kwargs)


def random_positions(rng: random.Random, n: int, width: float, height: float):
    """n distinct uniform positions."""
    seen = set()
    out = []
    while len(out) < n:
        p = (rng.uniform(0, width), rng.uniform(0, height))
        if p in seen:
            continue
        seen.add(p)
        out.append(p)
    return out


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def run_pipeline(scenario):
    """Cluster, build trees, allocate the band, and schedule. Returns
    (graph, trees, plan, pre_inversion_schedule, schedule, conflict_report)."""
    from wsnsim.clustering import run_emd
    from wsnsim.core import build_neighbor_graph
    from wsnsim.fdma import partition_band, request_allotment
    from wsnsim.scheduling import assign_slots, invert_slots
    from wsnsim.tree import build_tree, select_sub_sink

    graph = build_neighbor_graph(scenario)
    positions = {n.id: n.position for n in scenario.nodes}
    energies = {n.id: n.residual_energy for n in scenario.nodes}
    clustering = run_emd(scenario)
    members: dict = {}
    for nid, cid in zip(clustering.node_ids, clustering.assignment):
        members.setdefault(cid, []).append(nid)
    trees = []
    for cid in sorted(members):
        sub = select_sub_sink(members[cid], positions, energies, positions[scenario.sink_id])
        trees.append(
            build_tree(sorted(members[cid]), positions, energies, sub, graph.comm_adjacency, cid)
        )
    plan = partition_band(scenario.band, scenario.K, scenario.channels_per_range)
    for t in sorted(trees, key=lambda t: t.cluster_id):
        plan = request_allotment(plan, t.cluster_id)
    pre, report = assign_slots(trees, graph, plan)
    return graph, trees, plan, pre, invert_slots(pre), report

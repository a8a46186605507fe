"""FastAPI service exposing every pipeline stage.

The CLI is a thin client of these endpoints; run the service standalone with
`uvicorn wsnsim.service.app:app`.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import serialize
from ..clustering import run_emd
from ..core import build_neighbor_graph
from ..errors import ScenarioError, WsnSimError
from ..fdma import partition_band, request_allotment
from ..scenario_io import apply_overrides, generate_random_scenario, write_scenario
from ..scheduling import assign_slots, invert_slots
from ..sim import compare_baselines, run_simulation
from ..tree import build_tree, select_sub_sink
from .models import (
    ClusterResponse,
    CompareResponse,
    GenerateRequest,
    GenerateResponse,
    MetricsResponse,
    PipelineRequest,
    PlanModel,
    ScenarioModel,
    ScheduleResponse,
    TreeModel,
    TreeResponse,
)

app = FastAPI(title="wsnsim", description="WSN data-aggregation pipeline and simulator")


@app.exception_handler(ScenarioError)
async def scenario_error_handler(_request: Request, exc: ScenarioError):
    return JSONResponse(
        status_code=400,
        content={"error": str(exc), "kind": type(exc).__name__},
    )


@app.exception_handler(WsnSimError)
async def pipeline_error_handler(_request: Request, exc: WsnSimError):
    return JSONResponse(
        status_code=422,
        content={"error": str(exc), "kind": type(exc).__name__},
    )


def _scenario_from(req: PipelineRequest):
    scenario = req.scenario.to_scenario()
    if req.overrides:
        scenario = apply_overrides(scenario, req.overrides)
    return scenario


def _build_trees(scenario, clustering):
    graph = build_neighbor_graph(scenario)
    positions = {n.id: n.position for n in scenario.nodes}
    energies = {n.id: n.residual_energy for n in scenario.nodes}
    assignment: dict[int, list[int]] = {}
    for nid, cid in zip(clustering.node_ids, clustering.assignment):
        assignment.setdefault(cid, []).append(nid)
    trees = []
    for cid in sorted(assignment):
        members = sorted(assignment[cid])
        sub = select_sub_sink(members, positions, energies, positions[scenario.sink_id])
        trees.append(build_tree(members, positions, energies, sub, graph.comm_adjacency, cid))
    return trees, graph


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/cluster", response_model=ClusterResponse)
def cluster(req: PipelineRequest) -> ClusterResponse:
    clustering = run_emd(_scenario_from(req))
    return ClusterResponse(**serialize.clustering_to_dict(clustering))


@app.post("/tree", response_model=TreeResponse)
def tree(req: PipelineRequest) -> TreeResponse:
    scenario = _scenario_from(req)
    trees, _graph = _build_trees(scenario, run_emd(scenario))
    return TreeResponse(trees=[TreeModel(**t) for t in serialize.trees_to_dict(trees)])


@app.post("/schedule", response_model=ScheduleResponse)
def schedule(req: PipelineRequest) -> ScheduleResponse:
    scenario = _scenario_from(req)
    trees, graph = _build_trees(scenario, run_emd(scenario))
    plan = partition_band(scenario.band, scenario.K, scenario.channels_per_range)
    for t in sorted(trees, key=lambda t: t.cluster_id):
        plan = request_allotment(plan, t.cluster_id)
    sched, _report = assign_slots(trees, graph, plan)
    sched = invert_slots(sched)
    return ScheduleResponse(
        **serialize.schedule_to_dict(sched), plan=PlanModel(**serialize.plan_to_dict(plan))
    )


@app.post("/simulate", response_model=MetricsResponse)
def simulate(req: PipelineRequest) -> MetricsResponse:
    metrics = run_simulation(_scenario_from(req))
    return MetricsResponse(**serialize.metrics_to_dict(metrics))


@app.post("/compare", response_model=CompareResponse)
def compare(req: PipelineRequest) -> CompareResponse:
    report = compare_baselines(_scenario_from(req))
    return CompareResponse(**serialize.comparison_to_dict(report))


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    scenario = generate_random_scenario(
        req.nodes, req.area, req.k, req.seed, req.initial_energy
    )
    if req.overrides:
        scenario = apply_overrides(scenario, req.overrides)
    return GenerateResponse(
        scenario=ScenarioModel.from_scenario(scenario),
        scenario_text=write_scenario(scenario),
    )

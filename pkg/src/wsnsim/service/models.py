"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..core import NodeState, ROLE_SINK, ROLE_SOURCE, Scenario


class NodeModel(BaseModel):
    id: int
    x: float
    y: float
    energy: float


class ScenarioModel(BaseModel):
    area: tuple[float, float]
    nodes: list[NodeModel]
    sink: int
    k: int = Field(ge=1)
    band: tuple[float, float]
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

    def to_scenario(self) -> Scenario:
        nodes = tuple(
            NodeState(
                id=n.id,
                position=(n.x, n.y),
                residual_energy=n.energy,
                role=ROLE_SINK if n.id == self.sink else ROLE_SOURCE,
            )
            for n in self.nodes
        )
        return Scenario(
            area=self.area,
            nodes=nodes,
            sink_id=self.sink,
            K=self.k,
            band=self.band,
            channels_per_range=self.channels_per_range,
            theta_em=self.theta_em,
            max_em_iters=self.max_em_iters,
            e_elec=self.e_elec,
            e_amp=self.e_amp,
            e_lpl=self.e_lpl,
            packet_bits=self.packet_bits,
            comm_range=self.comm_range,
            interference_range=self.interference_range,
            refresh_fraction=self.refresh_fraction,
            max_rounds=self.max_rounds,
            seed=self.seed,
            aggregation=self.aggregation,
        )

    @classmethod
    def from_scenario(cls, s: Scenario) -> "ScenarioModel":
        return cls(
            area=s.area,
            nodes=[
                NodeModel(id=n.id, x=n.position[0], y=n.position[1], energy=n.residual_energy)
                for n in s.nodes
            ],
            sink=s.sink_id,
            k=s.K,
            band=s.band,
            channels_per_range=s.channels_per_range,
            theta_em=s.theta_em,
            max_em_iters=s.max_em_iters,
            e_elec=s.e_elec,
            e_amp=s.e_amp,
            e_lpl=s.e_lpl,
            packet_bits=s.packet_bits,
            comm_range=s.comm_range,
            interference_range=s.interference_range,
            refresh_fraction=s.refresh_fraction,
            max_rounds=s.max_rounds,
            seed=s.seed,
            aggregation=s.aggregation,
        )


class PipelineRequest(BaseModel):
    scenario: ScenarioModel
    overrides: dict[str, str] = Field(default_factory=dict)


class ClusterResponse(BaseModel):
    node_ids: list[int]
    assignment: list[int]
    responsibilities: list[list[float]]
    final_log_likelihood: float
    iterations_used: int
    log_likelihood_history: list[float]


class TreeModel(BaseModel):
    cluster_id: int
    root: int
    parent: dict[str, int]
    edge_key: dict[str, float]
    height: dict[str, int]


class TreeResponse(BaseModel):
    trees: list[TreeModel]


class PlanModel(BaseModel):
    band: tuple[float, float]
    ranges: dict[str, tuple[float, float]]
    free_pool: list[tuple[float, float]]
    channels_per_range: int


class ScheduleResponse(BaseModel):
    slot: dict[str, int]
    channel: dict[str, int]
    t_max: int
    cluster_of: dict[str, int]
    channels_used: dict[str, int]
    sink_slot: dict[str, int]
    inverted: bool
    plan: PlanModel


class RoundModel(BaseModel):
    round: int
    energy_spent: float
    tx_elec: float
    tx_amp: float
    rx: float
    lpl: float
    packets_delivered: int
    delivered_readings: int
    undelivered_readings: int
    max_latency_slots: int


class MetricsResponse(BaseModel):
    rounds_completed: int
    first_node_death_round: int
    total_energy_spent: float
    per_node_energy_spent: dict[str, float]
    packets_delivered_to_sink: int
    tree_refresh_count: int
    max_delivery_latency_slots: int
    undelivered_readings: int
    configuration_epochs: int
    configuration_energy: float
    amp_energy_total: float
    initial_total_energy: float
    final_residual_energy: float
    per_round_energy: list[RoundModel]


class BaselineRowModel(BaseModel):
    variant: str
    first_node_death_round: int
    tree_refresh_count: int
    total_energy_spent: float
    packets_delivered_to_sink: int
    rounds_completed: int


class CompareResponse(BaseModel):
    rows: list[BaselineRowModel]


class GenerateRequest(BaseModel):
    nodes: int = Field(ge=2)
    area: tuple[float, float]
    k: int = Field(ge=1)
    seed: int = 0
    initial_energy: float = 1.0
    overrides: dict[str, str] = Field(default_factory=dict)


class GenerateResponse(BaseModel):
    scenario: ScenarioModel
    scenario_text: str


class ErrorResponse(BaseModel):
    error: str
    kind: str
    detail: Optional[str] = None

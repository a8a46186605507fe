"""CSV and JSON emission for every pipeline result kind.

Domain objects are first flattened to plain dicts (`*_to_dict`); the CSV
writers consume those dicts, so the CLI can render CSV straight from service
responses. Column orders are fixed (see README); floats are written with
full round-trip precision so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .clustering import Clustering
from .fdma import FrequencyPlan
from .scheduling import Schedule
from .sim import ComparisonReport, SimMetrics
from .tree import AggregationTree


def _num(x):
    """CSV cell for a float: full-precision repr."""
    return repr(float(x))


def clustering_to_dict(c: Clustering) -> dict:
    return {
        "node_ids": list(c.node_ids),
        "assignment": list(c.assignment),
        "responsibilities": [[float(v) for v in row] for row in c.responsibilities],
        "final_log_likelihood": c.final_log_likelihood,
        "iterations_used": c.iterations_used,
        "log_likelihood_history": list(c.log_likelihood_history),
    }


def trees_to_dict(trees: Iterable[AggregationTree]) -> list[dict]:
    return [
        {
            "cluster_id": t.cluster_id,
            "root": t.root,
            "parent": {str(k): v for k, v in sorted(t.parent.items())},
            "edge_key": {str(k): v for k, v in sorted(t.edge_key_values.items())},
            "height": {str(k): v for k, v in sorted(t.height.items())},
        }
        for t in sorted(trees, key=lambda t: t.cluster_id)
    ]


def schedule_to_dict(s: Schedule) -> dict:
    return {
        "slot": {str(k): v for k, v in sorted(s.slot.items())},
        "channel": {str(k): v for k, v in sorted(s.channel.items())},
        "t_max": s.t_max,
        "cluster_of": {str(k): v for k, v in sorted(s.cluster_of.items())},
        "channels_used": {str(k): v for k, v in sorted(s.channels_used.items())},
        "sink_slot": {str(k): v for k, v in sorted(s.sink_slot.items())},
        "inverted": s.inverted,
    }


def plan_to_dict(p: FrequencyPlan) -> dict:
    return {
        "band": list(p.band),
        "ranges": {str(c): list(r) for c, r in sorted(p.ranges.items())},
        "free_pool": [list(r) for r in p.free_pool],
        "channels_per_range": p.channels_per_range,
    }


def metrics_to_dict(m: SimMetrics) -> dict:
    return {
        "rounds_completed": m.rounds_completed,
        "first_node_death_round": m.first_node_death_round,
        "total_energy_spent": m.total_energy_spent,
        "per_node_energy_spent": {str(k): v for k, v in sorted(m.per_node_energy_spent.items())},
        "packets_delivered_to_sink": m.packets_delivered_to_sink,
        "tree_refresh_count": m.tree_refresh_count,
        "max_delivery_latency_slots": m.max_delivery_latency_slots,
        "undelivered_readings": m.undelivered_readings,
        "configuration_epochs": m.configuration_epochs,
        "configuration_energy": m.configuration_energy,
        "amp_energy_total": m.amp_energy_total,
        "initial_total_energy": m.initial_total_energy,
        "final_residual_energy": m.final_residual_energy,
        "per_round_energy": [
            {
                "round": r.round_index,
                "energy_spent": r.energy_spent,
                "tx_elec": r.tx_elec,
                "tx_amp": r.tx_amp,
                "rx": r.rx,
                "lpl": r.lpl,
                "packets_delivered": r.packets_delivered,
                "delivered_readings": r.delivered_readings,
                "undelivered_readings": r.undelivered_readings,
                "max_latency_slots": r.max_latency_slots,
            }
            for r in m.per_round_energy
        ],
    }


def comparison_to_dict(c: ComparisonReport) -> dict:
    return {
        "rows": [
            {
                "variant": r.variant,
                "first_node_death_round": r.first_node_death_round,
                "tree_refresh_count": r.tree_refresh_count,
                "total_energy_spent": r.total_energy_spent,
                "packets_delivered_to_sink": r.packets_delivered_to_sink,
                "rounds_completed": r.rounds_completed,
            }
            for r in c.rows
        ]
    }


def _writer():
    out = io.StringIO()
    return out, csv.writer(out, lineterminator="\n")


def clustering_csv(d: dict) -> str:
    out, w = _writer()
    w.writerow(["node", "cluster"])
    for nid, a in sorted(zip(d["node_ids"], d["assignment"])):
        w.writerow([nid, a])
    return out.getvalue()


def trees_csv(trees: list[dict]) -> str:
    out, w = _writer()
    w.writerow(["cluster", "node", "parent", "edge_key", "height"])
    for t in sorted(trees, key=lambda t: t["cluster_id"]):
        for n in sorted(t["height"], key=int):
            if int(n) == t["root"]:
                w.writerow([t["cluster_id"], n, "", "", t["height"][n]])
            else:
                w.writerow(
                    [t["cluster_id"], n, t["parent"][n], _num(t["edge_key"][n]), t["height"][n]]
                )
    return out.getvalue()


def schedule_csv(d: dict) -> str:
    out, w = _writer()
    w.writerow(["node", "slot", "channel", "cluster"])
    for n in sorted(d["slot"], key=int):
        w.writerow([n, d["slot"][n], d["channel"][n], d["cluster_of"][n]])
    return out.getvalue()


def plan_csv(d: dict) -> str:
    out, w = _writer()
    w.writerow(["cluster", "f_start", "f_end"])
    for c in sorted(d["ranges"], key=int):
        w.writerow([c, _num(d["ranges"][c][0]), _num(d["ranges"][c][1])])
    return out.getvalue()


def metrics_csv(d: dict) -> str:
    out, w = _writer()
    w.writerow(
        [
            "round",
            "energy_spent",
            "tx_elec",
            "tx_amp",
            "rx",
            "lpl",
            "packets_delivered",
            "delivered_readings",
            "undelivered_readings",
            "max_latency_slots",
        ]
    )
    for r in d["per_round_energy"]:
        w.writerow(
            [
                r["round"],
                _num(r["energy_spent"]),
                _num(r["tx_elec"]),
                _num(r["tx_amp"]),
                _num(r["rx"]),
                _num(r["lpl"]),
                r["packets_delivered"],
                r["delivered_readings"],
                r["undelivered_readings"],
                r["max_latency_slots"],
            ]
        )
    return out.getvalue()


def comparison_csv(d: dict) -> str:
    out, w = _writer()
    w.writerow(
        [
            "variant",
            "first_node_death_round",
            "tree_refresh_count",
            "total_energy_spent",
            "packets_delivered_to_sink",
            "rounds_completed",
        ]
    )
    for r in d["rows"]:
        w.writerow(
            [
                r["variant"],
                r["first_node_death_round"],
                r["tree_refresh_count"],
                _num(r["total_energy_spent"]),
                r["packets_delivered_to_sink"],
                r["rounds_completed"],
            ]
        )
    return out.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"

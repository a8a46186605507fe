"""Scenario file format: parse, write, and random generation.

The format is line-oriented: `key = value` pairs (values are one or two
whitespace-separated numbers), then a `nodes:` section of `id x y energy`
rows. `#` starts a comment. The node whose id equals `sink` is the sink.
"""

from __future__ import annotations

import random

from .core import NodeState, ROLE_SINK, ROLE_SOURCE, Scenario
from .errors import ScenarioError

_SCALAR_KEYS = {
    "sink": int,
    "k": int,
    "channels_per_range": int,
    "theta_em": float,
    "max_em_iters": int,
    "e_elec": float,
    "e_amp": float,
    "e_lpl": float,
    "packet_bits": int,
    "comm_range": float,
    "interference_range": float,
    "refresh_fraction": float,
    "max_rounds": int,
    "seed": int,
}
_PAIR_KEYS = {"area", "band"}
_BOOL_KEYS = {"aggregation"}
_REQUIRED = {"area", "sink", "k", "band"}


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text; raises ScenarioError with a line number on bad
    syntax, then runs full Scenario validation."""
    values: dict = {}
    node_rows: list[tuple[int, float, float, float]] = []
    in_nodes = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "nodes:":
            in_nodes = True
            continue
        if in_nodes:
            parts = line.split()
            if len(parts) != 4:
                raise ScenarioError(f"line {lineno}: node row needs 'id x y energy', got {raw!r}")
            try:
                node_rows.append((int(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError as e:
                raise ScenarioError(f"line {lineno}: bad node row: {e}") from e
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        try:
            if key in _PAIR_KEYS:
                a, b = value.split()
                values[key] = (float(a), float(b))
            elif key in _BOOL_KEYS:
                if value.lower() not in ("on", "off", "true", "false"):
                    raise ValueError(f"expected on/off, got {value!r}")
                values[key] = value.lower() in ("on", "true")
            elif key in _SCALAR_KEYS:
                values[key] = _SCALAR_KEYS[key](value)
            else:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        except ScenarioError:
            raise
        except ValueError as e:
            raise ScenarioError(f"line {lineno}: bad value for {key!r}: {e}") from e

    missing = _REQUIRED - values.keys()
    if missing:
        raise ScenarioError(f"missing required keys: {sorted(missing)}")
    if not node_rows:
        raise ScenarioError("missing nodes: section")
    sink_id = values.pop("sink")
    k = values.pop("k")
    nodes = tuple(
        NodeState(
            id=nid,
            position=(x, y),
            residual_energy=e,
            role=ROLE_SINK if nid == sink_id else ROLE_SOURCE,
        )
        for nid, x, y, e in node_rows
    )
    return Scenario(nodes=nodes, sink_id=sink_id, K=k, **values)


def write_scenario(scenario: Scenario) -> str:
    """Serialize with full float precision; parse(write(s)) == s."""
    s = scenario
    lines = [
        f"area = {_fmt(s.area[0])} {_fmt(s.area[1])}",
        f"sink = {s.sink_id}",
        f"k = {s.K}",
        f"band = {_fmt(s.band[0])} {_fmt(s.band[1])}",
        f"channels_per_range = {s.channels_per_range}",
        f"theta_em = {_fmt(s.theta_em)}",
        f"max_em_iters = {s.max_em_iters}",
        f"e_elec = {_fmt(s.e_elec)}",
        f"e_amp = {_fmt(s.e_amp)}",
        f"e_lpl = {_fmt(s.e_lpl)}",
        f"packet_bits = {s.packet_bits}",
        f"comm_range = {_fmt(s.comm_range)}",
        f"interference_range = {_fmt(s.interference_range)}",
        f"refresh_fraction = {_fmt(s.refresh_fraction)}",
        f"max_rounds = {s.max_rounds}",
        f"seed = {s.seed}",
        f"aggregation = {'on' if s.aggregation else 'off'}",
        "nodes:",
    ]
    for n in s.nodes:
        lines.append(f"{n.id} {_fmt(n.position[0])} {_fmt(n.position[1])} {_fmt(n.residual_energy)}")
    return "\n".join(lines) + "\n"


def generate_random_scenario(
    n_nodes: int,
    area: tuple[float, float],
    K: int,
    seed: int,
    initial_energy: float = 1.0,
    **overrides,
) -> Scenario:
    """Uniform random deployment: sink (id 0) at the area center, n_nodes - 1
    sources with equal starting energy; deterministic in the seed."""
    if n_nodes < K + 1:
        raise ScenarioError(f"need at least K+1={K + 1} nodes, got {n_nodes}")
    rng = random.Random(seed)
    width, height = area
    positions = [(width / 2.0, height / 2.0)]
    taken = set(positions)
    while len(positions) < n_nodes:
        p = (rng.uniform(0.0, width), rng.uniform(0.0, height))
        if p in taken:
            continue
        taken.add(p)
        positions.append(p)
    nodes = tuple(
        NodeState(
            id=i,
            position=positions[i],
            residual_energy=initial_energy,
            role=ROLE_SINK if i == 0 else ROLE_SOURCE,
        )
        for i in range(n_nodes)
    )
    return Scenario(area=area, nodes=nodes, sink_id=0, K=K, seed=seed, **overrides)


def apply_overrides(scenario: Scenario, overrides: dict[str, str]) -> Scenario:
    """Apply flat `key=value` overrides (CLI --set) to scenario fields."""
    parsed: dict = {}
    for key, value in overrides.items():
        if key in _PAIR_KEYS:
            a, b = value.split()
            parsed[key] = (float(a), float(b))
        elif key == "k":
            parsed["K"] = int(value)
        elif key in _BOOL_KEYS:
            parsed[key] = value.lower() in ("on", "true")
        elif key == "sink":
            parsed["sink_id"] = int(value)
        elif key in _SCALAR_KEYS:
            parsed[key] = _SCALAR_KEYS[key](value)
        else:
            raise ScenarioError(f"unknown override key {key!r}")
    return scenario.with_overrides(**parsed)

"""Command-line front end.

The CLI is a thin client of the HTTP service: each subcommand builds a
request, posts it to the service (in-process by default, or a remote server
via --server), and renders the JSON response as CSV or JSON.

Exit codes: 0 success, 2 input validation failure, 3 pipeline error, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import httpx

from . import serialize
from .errors import ScenarioError
from .scenario_io import parse_scenario
from .service.models import ScenarioModel

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PIPELINE = 3
EXIT_IO = 4

log = logging.getLogger("wsnsim")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process: route requests straight into the ASGI app.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as e:
        raise CliError(f"cannot reach service: {e}", EXIT_IO) from e
    if resp.status_code == 400:
        raise CliError(resp.json().get("error", resp.text), EXIT_INPUT)
    if resp.status_code == 422:
        body = resp.json()
        raise CliError(body.get("error") or json.dumps(body), EXIT_PIPELINE)
    if resp.status_code != 200:
        raise CliError(f"service error {resp.status_code}: {resp.text}", EXIT_PIPELINE)
    return resp.json()


def _load_scenario_payload(args) -> dict:
    try:
        text = Path(args.scenario).read_text()
    except OSError as e:
        raise CliError(f"cannot read scenario: {e}", EXIT_IO) from e
    try:
        scenario = parse_scenario(text)
    except ScenarioError as e:
        raise CliError(str(e), EXIT_INPUT) from e
    overrides = dict(kv.split("=", 1) for kv in (args.set or []))
    return {
        "scenario": ScenarioModel.from_scenario(scenario).model_dump(),
        "overrides": overrides,
    }


def _write_output(content: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(content)
        return
    path = Path(out)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name)
        with os.fdopen(fd, "w") as f:
            f.write(content)
        os.replace(tmp, path)
    except OSError as e:
        raise CliError(f"cannot write {out}: {e}", EXIT_IO) from e


def _render(data: dict | list, fmt: str, csv_fn) -> str:
    if fmt == "json":
        return serialize.to_json(data)
    return csv_fn(data)


def cmd_simulate(args, client) -> None:
    data = _post(client, "/simulate", _load_scenario_payload(args))
    _write_output(_render(data, args.format, serialize.metrics_csv), args.out)


def cmd_compare(args, client) -> None:
    data = _post(client, "/compare", _load_scenario_payload(args))
    _write_output(_render(data, args.format, serialize.comparison_csv), args.out)


def cmd_cluster(args, client) -> None:
    data = _post(client, "/cluster", _load_scenario_payload(args))
    _write_output(_render(data, args.format, serialize.clustering_csv), args.out)


def cmd_tree(args, client) -> None:
    data = _post(client, "/tree", _load_scenario_payload(args))
    if args.format == "json":
        _write_output(serialize.to_json(data), args.out)
    else:
        _write_output(serialize.trees_csv(data["trees"]), args.out)


def cmd_schedule(args, client) -> None:
    data = _post(client, "/schedule", _load_scenario_payload(args))
    _write_output(_render(data, args.format, serialize.schedule_csv), args.out)


def cmd_generate(args, client) -> None:
    try:
        w, _, h = args.area.partition("x")
        area = (float(w), float(h))
    except ValueError as e:
        raise CliError(f"bad --area, expected WxH: {e}", EXIT_INPUT) from e
    payload = {
        "nodes": args.nodes,
        "area": area,
        "k": args.k,
        "seed": args.seed,
        "initial_energy": args.energy,
        "overrides": dict(kv.split("=", 1) for kv in (args.set or [])),
    }
    data = _post(client, "/generate", payload)
    _write_output(data["scenario_text"], args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsnsim",
        description="WSN data-aggregation pipeline: clustering, trees, "
        "frequency plans, hybrid schedules, and lifetime simulation.",
    )
    parser.add_argument("--server", help="remote service base URL (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", required=True, help="scenario file path")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a scenario field")

    for name, fn, help_text in (
        ("simulate", cmd_simulate, "run the full pipeline and simulate rounds"),
        ("compare", cmd_compare, "compare energy/distance tree vs distance-only baseline"),
        ("cluster", cmd_cluster, "run only the EM clustering stage"),
        ("tree", cmd_tree, "run clustering + per-cluster tree construction"),
        ("schedule", cmd_schedule, "run the pipeline through slot/channel assignment"),
    ):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        p.set_defaults(fn=fn)

    g = sub.add_parser("generate", help="generate a random scenario file")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--area", required=True, metavar="WxH")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--energy", type=float, default=1.0, help="initial energy per node, joules")
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--set", action="append", metavar="KEY=VALUE")
    g.set_defaults(fn=cmd_generate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("WSNSIM_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        with _client(args.server) as client:
            args.fn(args, client)
    except CliError as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

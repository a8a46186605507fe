import pytest

from wsnsim.errors import CoincidentNodes, ScenarioError, TooFewNodes
from wsnsim.scenario_io import (
    apply_overrides,
    generate_random_scenario,
    parse_scenario,
    write_scenario,
)

MINIMAL = """
# smallest valid deployment
area = 100 100
sink = 0
k = 1
band = 0 100
nodes:
0 50 50 1.0
1 10 10 1.0
"""


def test_parse_minimal():
    s = parse_scenario(MINIMAL)
    assert s.n_nodes == 2
    assert s.sink_id == 0
    assert s.nodes[1].position == (10.0, 10.0)


def test_parse_rejects_coincident_nodes():
    text = MINIMAL.replace("1 10 10 1.0", "1 50 50 1.0")
    with pytest.raises(CoincidentNodes):
        parse_scenario(text)


def test_parse_rejects_k_above_sources():
    text = MINIMAL.replace("k = 1", "k = 2")
    with pytest.raises(TooFewNodes):
        parse_scenario(text)


def test_parse_syntax_error_reports_line():
    text = "area = 100 100\nsink 0\n"
    with pytest.raises(ScenarioError, match="line 2"):
        parse_scenario(text)


def test_parse_bad_node_row_reports_line():
    text = MINIMAL + "2 1 2\n"
    with pytest.raises(ScenarioError, match="line"):
        parse_scenario(text)


def test_parse_unknown_key():
    with pytest.raises(ScenarioError, match="unknown key"):
        parse_scenario("bogus = 1\n" + MINIMAL)


def test_roundtrip_exact():
    s = generate_random_scenario(12, (123.0, 77.0), 3, seed=991, initial_energy=0.123456789)
    text = write_scenario(s)
    assert parse_scenario(text) == s


def test_generate_deterministic():
    a = generate_random_scenario(10, (100.0, 100.0), 2, seed=4)
    b = generate_random_scenario(10, (100.0, 100.0), 2, seed=4)
    assert a == b
    assert write_scenario(a) == write_scenario(b)


def test_generate_minimum_and_bounds():
    s = generate_random_scenario(2, (100.0, 100.0), 1, seed=0)
    assert s.n_nodes == 2
    assert s.nodes[0].position == (50.0, 50.0)  # sink at center
    big = generate_random_scenario(50, (100.0, 100.0), 3, seed=1)
    for n in big.nodes:
        assert 0 <= n.position[0] <= 100 and 0 <= n.position[1] <= 100


def test_generate_too_few_nodes():
    with pytest.raises(ScenarioError):
        generate_random_scenario(3, (10.0, 10.0), 3, seed=0)


def test_apply_overrides():
    s = parse_scenario(MINIMAL)
    s2 = apply_overrides(s, {"max_rounds": "7", "comm_range": "55.5", "aggregation": "off"})
    assert s2.max_rounds == 7
    assert s2.comm_range == 55.5
    assert not s2.aggregation


def test_apply_overrides_unknown_key():
    s = parse_scenario(MINIMAL)
    with pytest.raises(ScenarioError):
        apply_overrides(s, {"nope": "1"})

import json
import math

import pytest

import survplan


def test_default_scenario_check():
    s = survplan.default_scenario()
    assert s.mission.endswith("G F sur")
    info = survplan.check(s)
    assert info["feasible"]
    assert info["label_condition"]
    assert info["ts_states"] == 100
    assert 0 < info["trimmed_states"] <= info["product_states"]
    assert info["accepting_inf"] > 0


def test_run_returns_stats_and_traces(tmp_path):
    s = survplan.default_scenario()
    s.iterations = 40
    s.runs = 2
    s.preference = "pref3"
    res = survplan.run(s, out_dir=tmp_path, traces=True)
    assert len(res["runs"]) == 2
    assert len(res["traces"]) == 2
    assert len(res["traces"][0]) == 40
    times = [step["time"] for step in res["traces"][0]]
    assert times == sorted(times)
    written = json.loads((tmp_path / "stats.json").read_text())
    assert written["reward_per_transition"] == res["reward_per_transition"]
    assert (tmp_path / "trace.csv").exists()


def test_runs_are_reproducible():
    s = survplan.default_scenario()
    s.iterations = 30
    s.runs = 2
    a = survplan.run(s, traces=True)
    b = survplan.run(s, traces=True)
    assert a["traces"] == b["traces"]
    s.seed = 2
    c = survplan.run(s, traces=True)
    assert c["traces"] != a["traces"]


def test_never_enters_unsafe_cells():
    s = survplan.default_scenario()
    s.iterations = 200
    s.runs = 1
    trace = survplan.run(s, traces=True)["traces"][0]
    unsafe = {f"r{r}c{c}" for r in (4, 5) for c in range(3, 7)}
    assert not unsafe & {step["state"] for step in trace}


def test_infeasible_mission():
    s = survplan.parse_scenario(
        "[grid]\nrows = 3\ncols = 3\ninitial = 2,2\n"
        "[labels]\nsur = 0,0\nu = 0,0\n[mission]\nformula = G !u\n"
    )
    assert not survplan.check(s)["feasible"]
    with pytest.raises(survplan.ValidationError, match=survplan.INFEASIBLE_MESSAGE):
        survplan.run(s)


def test_parse_errors_carry_location():
    with pytest.raises(survplan.Error, match=r"bad\.scn:2"):
        survplan.parse_scenario("[grid]\nrows = many\n", "bad.scn")


@pytest.mark.parametrize(
    "formula, stem, loop, expected",
    [
        ("G F a", [], [1], True),
        ("G F a", [1], [0], False),
        ("a U b", [1, 1], [2], True),
        ("a U b", [1, 0], [2], False),
        ("X X b", [0, 0, 2], [0], True),
    ],
)
def test_automaton_agrees_with_semantics(formula, stem, loop, expected):
    props = ["a", "b"]
    assert survplan.satisfied_on_lasso(formula, props, stem, loop) is expected
    assert survplan.automaton_accepts(formula, props, stem, loop) is expected


def test_automaton_size_is_small_for_request_response():
    assert 0 < survplan.automaton_size("G(a -> F b)", ["a", "b"]) <= 4
    assert not math.isnan(survplan.default_scenario().horizon)

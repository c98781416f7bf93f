"""Sequential-ignorability premise checks on trial graphs."""

import json

import pytest

from ttebench import (
    PremiseReport,
    ScenarioKind,
    X,
    Y,
    build_graph,
    build_trial_graph,
    identification_report,
    rule2_premise_holds,
    rule3_premise_holds,
)
from ttebench.graphs import B as node_B

SCEN_A = ScenarioKind.from_code("A")
SCEN_B = ScenarioKind.from_code("B")


def test_premises_hold_on_both_scenarios_t3():
    for kind in (SCEN_A, SCEN_B):
        report = identification_report(kind, 3)
        assert report.identified
        assert [e.k for e in report.entries] == [1, 2, 3]
        assert all(e.rule2 and e.rule3 for e in report.entries)


def test_premises_hold_across_horizons():
    for kind in (SCEN_A, SCEN_B):
        for T in (1, 2, 5):
            assert identification_report(kind, T).identified


def _corrupt_with_direct_confounding(kind, T):
    g = build_trial_graph(kind, T)
    return build_graph(g.nodes, set(g.directed) | {(node_B, X(2))}, g.bidirected)


def test_outcome_confounder_into_treatment_breaks_rule2_only():
    g = _corrupt_with_direct_confounding(SCEN_A, 3)
    rule2 = [rule2_premise_holds(g, SCEN_A, 3, k) for k in (1, 2, 3)]
    rule3 = [rule3_premise_holds(g, SCEN_A, 3, k) for k in (1, 2, 3)]
    assert rule2 == [True, True, False]
    assert rule3 == [True, True, True]


def test_corrupted_graph_fails_identification():
    g = _corrupt_with_direct_confounding(SCEN_B, 3)
    rule2 = [rule2_premise_holds(g, SCEN_B, 3, k) for k in (1, 2, 3)]
    assert not all(rule2)


def test_premise_functions_accept_explicit_graphs():
    g = build_trial_graph(SCEN_B, 2)
    assert rule2_premise_holds(g, SCEN_B, 2, 1)
    assert rule3_premise_holds(g, SCEN_B, 2, 2)


def test_report_serialization_round_trip():
    report = identification_report(SCEN_A, 2)
    payload = json.loads(report.to_json())
    assert payload["scenario"] == "A"
    assert payload["T"] == 2
    assert payload["identified"] is True
    assert payload["periods"] == [
        {"k": 1, "rule2": True, "rule3": True},
        {"k": 2, "rule2": True, "rule3": True},
    ]
    assert report.to_dict() == payload


def test_report_identified_is_conjunction_of_entries():
    from ttebench.identification import PremiseEntry

    good = PremiseEntry(1, True, True)
    bad = PremiseEntry(2, False, True)
    assert PremiseReport("A", 2, (good, good)).identified
    assert not PremiseReport("A", 2, (good, bad)).identified


def test_rule3_on_simplified_graph_with_future_treatment_dropped():
    # In the simplified scenario-A graph the premise for k=1 drops every
    # treatment; Y1 has no treatment ancestors so the check holds.
    g = build_trial_graph(SCEN_A, 3, with_latents=False)
    assert rule3_premise_holds(g, SCEN_A, 3, 1)


def test_direct_confounding_of_outcome_and_treatment_fails_rule2():
    # A bidirected edge between Y3 and X3 encodes a latent common cause of
    # the period-3 treatment decision and the period-3 outcome that the
    # measured history cannot absorb.
    g = build_trial_graph(SCEN_B, 3)
    corrupted = build_graph(
        g.nodes, g.directed, set(g.bidirected) | {frozenset((X(3), Y(3)))}
    )
    assert rule2_premise_holds(corrupted, SCEN_B, 3, 2)
    assert not rule2_premise_holds(corrupted, SCEN_B, 3, 3)

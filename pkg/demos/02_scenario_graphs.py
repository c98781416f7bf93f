"""The two within-period causal orderings and their graphs.

Every period of follow-up contains a treatment decision X_t and a
survival outcome Y_t. The workbench ships two scenario families that
differ only in the within-period arrow:

* scenario A: Y_t -> X_t (the outcome lands first; treatment can only
  be started by patients who just survived), and
* scenario B: X_t -> Y_t (treatment is taken at the top of the period
  and affects the period's own survival).

Each scenario comes in a full version (baseline confounder C plus
latent causes of treatment and outcome) and a simplified version used
by the counterfactual constructions.
"""

from ttebench import (
    Regime,
    ScenarioKind,
    Yx,
    build_amwn,
    build_trial_graph,
    to_dot,
)

A = ScenarioKind.from_code("A")
B = ScenarioKind.from_code("B")


def section(title):
    print(f"\n=== {title} ===")


def describe(graph, label):
    print(
        f"{label}: {len(graph.nodes)} nodes, {len(graph.directed)} directed, "
        f"{len(graph.bidirected)} bidirected"
    )


section("Full trial graphs (T = 3)")
for kind in (A, B):
    g = build_trial_graph(kind, 3)
    describe(g, f"scenario {kind.code}")
    within = [
        (u.name, v.name)
        for u, v in sorted(g.directed, key=lambda e: (e[0].sort_key, e[1].sort_key))
        if u.period == v.period and u.period is not None
    ]
    print(f"  within-period edges: {within}")

section("Simplified graphs drop latents and long treatment chains")
for kind in (A, B):
    simp = build_trial_graph(kind, 3, with_latents=False)
    describe(simp, f"scenario {kind.code} (simplified)")
print("\nscenario B, one period, simplified -- the smallest trial graph:")
print(to_dot(build_trial_graph(B, 1, with_latents=False)))

section("Counterfactual networks (AMWN)")
# The network places a counterfactual copy Yx_t next to each factual
# outcome the intervened treatments can reach, joined by a bidirected
# edge carrying everything unobserved they share.
always = Regime.always_from_start()
for kind in (A, B):
    amwn = build_amwn(kind, 3, always)
    base = build_trial_graph(kind, 3, with_latents=False)
    copies = sorted(n.name for n in amwn.nodes - base.nodes)
    print(f"scenario {kind.code}: counterfactual copies = {copies}")
print(
    "\nIn scenario A period 1's outcome precedes any treatment, so Y1 has\n"
    "no counterfactual copy; in scenario B even Y1 responds to X1, so all\n"
    f"three copies appear, including {Yx(1).name}."
)

section("Scenario B network in DOT form")
print(to_dot(build_amwn(B, 3, always)))

"""Graph-based identification checks for per-protocol effects.

Two families of checks are mechanized here.

1. Do-calculus premises. Writing the interventional survival curve as a
   product of observational hazards needs, at every period k, a rule-2
   premise (conditioning on the kept treatments equals intervening on
   them) and a rule-3 premise (the dropped future treatments are
   irrelevant to Y_k). Both are m-separation statements in mutilated
   graphs and are evaluated mechanically.

2. Counterfactual exchangeability. Cloning-censoring-weighting relies
   on Y^x_i being independent of the treatment decision X_k given the
   measured past. That statement lives in the counterfactual network
   and is evaluated there, cell by cell.
"""

from ttebench import (
    Regime,
    ScenarioKind,
    X,
    build_graph,
    build_trial_graph,
    exchangeability_table,
    identification_report,
    rule2_premise_holds,
)
from ttebench.graphs import B as node_B

A = ScenarioKind.from_code("A")
B = ScenarioKind.from_code("B")


def section(title):
    print(f"\n=== {title} ===")


section("Do-calculus premises hold in both scenarios")
for kind in (A, B):
    report = identification_report(kind, 3)
    print(f"scenario {kind.code}:  k  rule2  rule3")
    for entry in report.entries:
        print(f"            {entry.k}  {str(entry.rule2).lower():5s}  {str(entry.rule3).lower():5s}")
    print(f"            identified: {report.identified}")

section("... and keep holding as the horizon grows")
for T in (1, 4, 8, 12):
    ok = all(identification_report(kind, T).identified for kind in (A, B))
    print(f"T = {T:2d}: premises hold in both scenarios -> {ok}")

section("A corrupted graph is caught")
# Let the latent cause of the outcomes leak directly into the period-2
# treatment decision. History can no longer stand in for intervention
# at k = 3, and exactly that rule-2 cell flips.
g = build_trial_graph(A, 3)
corrupted = build_graph(g.nodes, set(g.directed) | {(node_B, X(2))}, g.bidirected)
for k in (1, 2, 3):
    print(f"k = {k}: rule2 premise -> {rule2_premise_holds(corrupted, A, 3, k)}")

section("Counterfactual exchangeability, scenario A (all cells hold)")


def show_table(kind):
    table = exchangeability_table(kind, 3, Regime.always_from_start())
    print("  i\\k      1      2      3")
    for i in (1, 2, 3):
        row = "".join(f"{str(table[(i, k)]).lower():>7s}" for k in (1, 2, 3))
        print(f"    {i} {row}")
    n_false = sum(1 for v in table.values() if not v)
    print(f"  false cells: {n_false} of 9")


show_table(A)

section("Counterfactual exchangeability, scenario B")
show_table(B)
print(
    "\nWith treatment acting inside its own period, X_k and the\n"
    "counterfactual Y^x_i share the period's unobserved influences\n"
    "whenever i >= k, so those cells fail -- including the headline\n"
    "cell (3, 3). Cloning-censoring-weighting loses its justification\n"
    "here, which is exactly the bias the simulation study measures."
)

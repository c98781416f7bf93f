"""Mixed causal graphs: construction, mutilation, and m-separation.

The workbench's graph layer stores acyclic directed mixed graphs
(ADMGs): directed edges for causal influence and bidirected edges for
latent confounding. This demo builds small graphs by hand, queries
ancestry, applies the two do-calculus graph surgeries, and runs
m-separation -- the generalization of d-separation that treats a
bidirected edge as a hidden common cause.
"""

from ttebench import (
    NodeLabel,
    X,
    Y,
    ancestors,
    build_graph,
    descendants,
    m_separated,
    mutilate,
    parse_dot,
    to_dot,
)


def section(title):
    print(f"\n=== {title} ===")


section("Building a graph")
# A two-period chain with a latent confounder between the treatments.
nodes = [X(1), Y(1), X(2), Y(2)]
directed = [(X(1), Y(1)), (X(1), X(2)), (X(2), Y(2)), (Y(1), Y(2))]
bidirected = [(X(1), X(2))]
g = build_graph(nodes, directed, bidirected)
print(f"nodes:      {sorted(n.name for n in g.nodes)}")
print(f"directed:   {sorted((u.name, v.name) for u, v in g.directed)}")
print(f"bidirected: {sorted(tuple(sorted(n.name for n in pair)) for pair in g.bidirected)}")

section("Ancestry")
print(f"ancestors(Y2)   = {sorted(n.name for n in ancestors(g, [Y(2)]))}")
print(f"descendants(X1) = {sorted(n.name for n in descendants(g, [X(1)]))}")

section("m-separation")
# X1 -> Y1 is a direct edge: no conditioning set can separate them.
print(f"X1 _||_ Y1 | {{}}        : {m_separated(g, [X(1)], [Y(1)], [])}")
# Y1 and X2 share the ancestor X1; conditioning on it blocks the trek.
print(f"Y1 _||_ X2 | {{}}        : {m_separated(g, [Y(1)], [X(2)], [])}")
print(f"Y1 _||_ X2 | {{X1}}      : {m_separated(g, [Y(1)], [X(2)], [X(1)])}")
# Y2 is a collider child of X2 and Y1: conditioning on it OPENS a path.
h = build_graph([X(2), Y(1), Y(2)], [(X(2), Y(2)), (Y(1), Y(2))], [])
print(f"collider:  X2 _||_ Y1 | {{}}   : {m_separated(h, [X(2)], [Y(1)], [])}")
print(f"collider:  X2 _||_ Y1 | {{Y2}} : {m_separated(h, [X(2)], [Y(1)], [Y(2)])}")
# The bidirected edge is a hidden common cause: X1 and X2 stay
# m-connected even given every directed parent.
print(
    "latent:    X1 _||_ X2 | {Y1}  : "
    f"{m_separated(g, [X(1)], [X(2)], [Y(1)])}"
)

section("Graph surgery")
# Removing incoming edges of X2 (the 'do' operation) also severs its
# bidirected confounding; removing outgoing edges leaves it.
cut_in = mutilate(g, remove_incoming=[X(2)])
cut_out = mutilate(g, remove_outgoing=[X(2)])
print(f"after do(X2): directed   = {sorted((u.name, v.name) for u, v in cut_in.directed)}")
print(f"after do(X2): bidirected = {sorted(tuple(sorted(n.name for n in p)) for p in cut_in.bidirected)}")
print(f"outgoing cut: directed   = {sorted((u.name, v.name) for u, v in cut_out.directed)}")
print(f"outgoing cut: bidirected = {sorted(tuple(sorted(n.name for n in p)) for p in cut_out.bidirected)}")

section("DOT round trip")
text = to_dot(g)
print(text)
again = parse_dot(text)
print(f"parse(to_dot(g)) == g : {again == g}")

section("Labels")
lbl = NodeLabel.parse("Yx2")
print(f"parsed {lbl.name!r}: kind={lbl.kind.name}, period={lbl.period}")

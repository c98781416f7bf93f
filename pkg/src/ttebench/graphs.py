"""Mixed causal graphs over labeled trial variables.

An :class:`Admg` holds directed and bidirected edges over
:class:`NodeLabel` nodes. Directed edges carry one arrowhead, bidirected
edges carry arrowheads at both ends (shared exogenous noise). The module
provides graph construction and validation, ancestor closures, graph
surgery (removal of incoming or outgoing edges), m-separation queries,
and DOT import/export.

Node identity is structural: a node is its ``(kind, period)`` pair, so
queries can quantify over, say, every treatment before period k without
tracking positional indices.

Graphs are immutable after construction; every query is read-only, so
concurrent evaluation is safe.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterable, Mapping, Tuple

from .errors import (
    CycleDetected,
    DotParseError,
    OverlappingSets,
    SelfLoop,
    UnknownNode,
)

__all__ = [
    "NodeKind",
    "NodeLabel",
    "Admg",
    "X",
    "Y",
    "Yx",
    "C",
    "A",
    "B",
    "build_graph",
    "ancestors",
    "descendants",
    "mutilate",
    "m_separated",
    "to_dot",
    "parse_dot",
]


class NodeKind(Enum):
    """Role of a node; the value is its short name prefix."""

    TREATMENT = "X"
    OUTCOME = "Y"
    COUNTERFACTUAL_OUTCOME = "Yx"
    BASELINE_CONFOUNDER = "C"
    LATENT_TREATMENT_CAUSE = "A"
    LATENT_OUTCOME_CAUSE = "B"


#: Kinds that never carry a period.
_PERIODLESS = frozenset(
    {
        NodeKind.BASELINE_CONFOUNDER,
        NodeKind.LATENT_TREATMENT_CAUSE,
        NodeKind.LATENT_OUTCOME_CAUSE,
    }
)

_KIND_ORDER = {
    NodeKind.TREATMENT: 0,
    NodeKind.OUTCOME: 1,
    NodeKind.COUNTERFACTUAL_OUTCOME: 2,
    NodeKind.BASELINE_CONFOUNDER: 3,
    NodeKind.LATENT_TREATMENT_CAUSE: 4,
    NodeKind.LATENT_OUTCOME_CAUSE: 5,
}

_NAME_RE = re.compile(r"^(Yx|X|Y|C|A|B)(\d*)$")


@dataclass(frozen=True)
class NodeLabel:
    """A trial variable: a kind plus, for per-period kinds, a period.

    ``X3`` is ``NodeLabel(NodeKind.TREATMENT, 3)``; the baseline
    confounder ``C`` is ``NodeLabel(NodeKind.BASELINE_CONFOUNDER)``.
    """

    kind: NodeKind
    period: int | None = None

    def __post_init__(self):
        if self.kind in _PERIODLESS:
            if self.period is not None:
                raise ValueError(f"{self.kind.name} nodes carry no period")
        else:
            if not isinstance(self.period, int) or self.period < 1:
                raise ValueError(
                    f"{self.kind.name} nodes need an integer period >= 1, "
                    f"got {self.period!r}"
                )

    @property
    def name(self) -> str:
        """Short name such as ``X1``, ``Yx3``, or ``C``."""
        if self.period is None:
            return self.kind.value
        return f"{self.kind.value}{self.period}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_KIND_ORDER[self.kind], self.period or 0)

    def __repr__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, name: str) -> "NodeLabel":
        """Inverse of :attr:`name`; raises ``ValueError`` on bad input."""
        m = _NAME_RE.match(name.strip())
        if not m:
            raise ValueError(f"not a node name: {name!r}")
        prefix, digits = m.groups()
        kind = NodeKind(prefix)
        if kind in _PERIODLESS:
            if digits:
                raise ValueError(f"{prefix} carries no period: {name!r}")
            return cls(kind)
        if not digits:
            raise ValueError(f"{prefix} requires a period: {name!r}")
        return cls(kind, int(digits))


def X(period: int) -> NodeLabel:
    """Treatment node for a period."""
    return NodeLabel(NodeKind.TREATMENT, period)


def Y(period: int) -> NodeLabel:
    """Outcome (vital status) node for a period."""
    return NodeLabel(NodeKind.OUTCOME, period)


def Yx(period: int) -> NodeLabel:
    """Counterfactual outcome node for a period."""
    return NodeLabel(NodeKind.COUNTERFACTUAL_OUTCOME, period)


#: Baseline confounder (cause of every treatment and every outcome).
C = NodeLabel(NodeKind.BASELINE_CONFOUNDER)
#: Latent cause shared by all treatments.
A = NodeLabel(NodeKind.LATENT_TREATMENT_CAUSE)
#: Latent cause shared by all outcomes.
B = NodeLabel(NodeKind.LATENT_OUTCOME_CAUSE)


@dataclass(frozen=True)
class Admg:
    """Acyclic directed mixed graph: directed plus bidirected edges.

    Construction validates that all edge endpoints are declared, no
    edge is a self-loop, and the directed part is acyclic. Use
    :func:`build_graph` to construct from plain iterables.
    """

    nodes: FrozenSet[NodeLabel]
    directed: FrozenSet[Tuple[NodeLabel, NodeLabel]]
    bidirected: FrozenSet[FrozenSet[NodeLabel]]

    def __post_init__(self):
        for u, v in self.directed:
            self._check_endpoint(u)
            self._check_endpoint(v)
            if u == v:
                raise SelfLoop(f"directed self-loop on {u}")
        for pair in self.bidirected:
            if len(pair) != 2:
                raise SelfLoop(f"bidirected self-loop on {set(pair)}")
            for u in pair:
                self._check_endpoint(u)
        self._check_acyclic()

    def _check_endpoint(self, u: NodeLabel) -> None:
        if u not in self.nodes:
            raise UnknownNode(f"edge endpoint {u} is not a declared node")

    def _check_acyclic(self) -> None:
        indegree = {v: 0 for v in self.nodes}
        for _, v in self.directed:
            indegree[v] += 1
        ready = deque(v for v, d in indegree.items() if d == 0)
        seen = 0
        children = self._children
        while ready:
            u = ready.popleft()
            seen += 1
            for v in children.get(u, ()):
                indegree[v] -= 1
                if indegree[v] == 0:
                    ready.append(v)
        if seen != len(self.nodes):
            cyclic = sorted(
                (v.name for v, d in indegree.items() if d > 0)
            )
            raise CycleDetected(f"directed cycle among {cyclic}")

    @cached_property
    def _parents(self) -> Mapping[NodeLabel, frozenset]:
        out: dict[NodeLabel, set] = {v: set() for v in self.nodes}
        for u, v in self.directed:
            out[v].add(u)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def _children(self) -> Mapping[NodeLabel, frozenset]:
        out: dict[NodeLabel, set] = {v: set() for v in self.nodes}
        for u, v in self.directed:
            out[u].add(v)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def _siblings(self) -> Mapping[NodeLabel, frozenset]:
        out: dict[NodeLabel, set] = {v: set() for v in self.nodes}
        for pair in self.bidirected:
            u, v = tuple(pair)
            out[u].add(v)
            out[v].add(u)
        return {v: frozenset(s) for v, s in out.items()}

    def sorted_nodes(self) -> list[NodeLabel]:
        return sorted(self.nodes, key=lambda n: n.sort_key)


def build_graph(
    nodes: Iterable[NodeLabel],
    directed: Iterable[Tuple[NodeLabel, NodeLabel]] = (),
    bidirected: Iterable[Tuple[NodeLabel, NodeLabel]] = (),
) -> Admg:
    """Validate and freeze a mixed graph.

    Parameters
    ----------
    nodes : iterable of NodeLabel
        The declared node set.
    directed : iterable of (tail, head) pairs
        Directed edges; the directed part must be acyclic.
    bidirected : iterable of unordered pairs
        Bidirected edges (arrowheads at both ends).

    Raises
    ------
    UnknownNode, SelfLoop, CycleDetected
    """
    node_set = frozenset(nodes)
    dir_set = frozenset((u, v) for u, v in directed)
    bidir_set = frozenset(frozenset(pair) for pair in bidirected)
    return Admg(node_set, dir_set, bidir_set)


def _require_known(g: Admg, nodes: Iterable[NodeLabel]) -> frozenset:
    s = frozenset(nodes)
    missing = s - g.nodes
    if missing:
        names = sorted(n.name for n in missing)
        raise UnknownNode(f"nodes not in graph: {names}")
    return s


def ancestors(g: Admg, targets: Iterable[NodeLabel]) -> frozenset:
    """Targets plus every node with a directed path into a target."""
    result = set(_require_known(g, targets))
    frontier = deque(result)
    parents = g._parents
    while frontier:
        v = frontier.popleft()
        for p in parents[v]:
            if p not in result:
                result.add(p)
                frontier.append(p)
    return frozenset(result)


def descendants(g: Admg, sources: Iterable[NodeLabel]) -> frozenset:
    """Sources plus every node reachable along directed edges."""
    result = set(_require_known(g, sources))
    frontier = deque(result)
    children = g._children
    while frontier:
        v = frontier.popleft()
        for c in children[v]:
            if c not in result:
                result.add(c)
                frontier.append(c)
    return frozenset(result)


def mutilate(
    g: Admg,
    remove_incoming: Iterable[NodeLabel] = (),
    remove_outgoing: Iterable[NodeLabel] = (),
) -> Admg:
    """Copy of ``g`` with edges into/out of the given sets removed.

    Every directed edge pointing into ``remove_incoming`` and every
    directed edge leaving ``remove_outgoing`` is deleted. Bidirected
    edges touching ``remove_incoming`` are deleted too (they carry an
    incoming arrowhead); ``remove_outgoing`` leaves them in place. The
    node set is unchanged.
    """
    rin = _require_known(g, remove_incoming)
    rout = _require_known(g, remove_outgoing)
    directed = frozenset(
        (u, v) for u, v in g.directed if v not in rin and u not in rout
    )
    bidirected = frozenset(pair for pair in g.bidirected if not (pair & rin))
    return Admg(g.nodes, directed, bidirected)


def m_separated(
    g: Admg,
    a: Iterable[NodeLabel],
    b: Iterable[NodeLabel],
    z: Iterable[NodeLabel],
) -> bool:
    """True iff every path between ``a`` and ``b`` is blocked by ``z``.

    A bidirected edge behaves as a path segment with arrowheads at both
    ends. A non-collider on a path blocks it when conditioned; a
    collider blocks it unless the collider or one of its descendants is
    conditioned. Implemented as reachability over (node, arrival-mark)
    states, where the mark records whether the last edge reached the
    node through an arrowhead; correctness against exhaustive path
    enumeration is property-tested.
    """
    a_set = _require_known(g, a)
    b_set = _require_known(g, b)
    z_set = _require_known(g, z)
    if a_set & b_set or a_set & z_set or b_set & z_set:
        raise OverlappingSets("query sets must be pairwise disjoint")
    if not a_set or not b_set:
        return True

    # A collider is open iff it is in z or has a descendant in z,
    # i.e. iff it is an ancestor (inclusive) of z.
    open_colliders = ancestors(g, z_set) if z_set else frozenset()
    parents = g._parents
    children = g._children
    siblings = g._siblings

    # States are (node, arrived_through_head). From a state we may exit
    # through an edge whose end at the node is a head only if the node
    # acts as an open collider; any exit through a tail needs the node
    # unconditioned.
    queue: deque[tuple[NodeLabel, bool]] = deque()
    visited: set[tuple[NodeLabel, bool]] = set()

    def push(node: NodeLabel, via_head: bool) -> bool:
        """Queue a state; returns True when the b side is reached."""
        if node in b_set:
            return True
        state = (node, via_head)
        if state not in visited:
            visited.add(state)
            queue.append(state)
        return False

    for start in a_set:
        # The start node is an endpoint, not an intermediate: leave it
        # through every incident edge unconditionally.
        for child in children[start]:
            if push(child, True):
                return False
        for parent in parents[start]:
            if push(parent, False):
                return False
        for sib in siblings[start]:
            if push(sib, True):
                return False

    while queue:
        node, via_head = queue.popleft()
        may_collide = via_head and node in open_colliders
        may_chain = node not in z_set
        if may_chain:
            for child in children[node]:
                if push(child, True):
                    return False
        # Exits through arrowheads at `node`: collider configuration
        # when we also arrived through an arrowhead.
        head_exit_ok = may_collide if via_head else may_chain
        if head_exit_ok:
            for parent in parents[node]:
                if push(parent, False):
                    return False
            for sib in siblings[node]:
                if push(sib, True):
                    return False
    return True


def to_dot(g: Admg) -> str:
    """Emit the graph as DOT text.

    Directed edges appear as ``u -> v;`` lines; bidirected edges as
    ``u -> v [dir=both, style=dashed];``. Node and edge lines are sorted
    for stable output.
    """
    if not g.nodes:
        return "digraph g { }"
    lines = ["digraph g {"]
    for node in g.sorted_nodes():
        lines.append(f"  {node.name};")
    for u, v in sorted(g.directed, key=lambda e: (e[0].sort_key, e[1].sort_key)):
        lines.append(f"  {u.name} -> {v.name};")
    bidir = sorted(
        (sorted(pair, key=lambda n: n.sort_key) for pair in g.bidirected),
        key=lambda p: (p[0].sort_key, p[1].sort_key),
    )
    for u, v in bidir:
        lines.append(f"  {u.name} -> {v.name} [dir=both, style=dashed];")
    lines.append("}")
    return "\n".join(lines)


_DOT_EDGE_RE = re.compile(
    r"^(\w+)\s*->\s*(\w+)\s*"
    r"(\[\s*dir\s*=\s*both\s*,\s*style\s*=\s*dashed\s*\])?\s*;$"
)
_DOT_NODE_RE = re.compile(r"^(\w+)\s*;$")


def parse_dot(text: str) -> Admg:
    """Parse the DOT subset produced by :func:`to_dot`.

    One statement per line, no subgraphs or attributes other than the
    bidirected annotation. Raises :class:`DotParseError` on anything
    else.
    """
    stripped = text.strip()
    single = re.match(r"^digraph\s+\w+\s*\{\s*\}$", stripped)
    if single:
        return build_graph(())
    lines = [ln.strip() for ln in stripped.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not re.match(r"^digraph\s+\w+\s*\{$", lines[0]):
        raise DotParseError("expected a 'digraph <name> {' header")
    if lines[-1] != "}":
        raise DotParseError("expected a closing '}'")

    def node(name: str) -> NodeLabel:
        try:
            return NodeLabel.parse(name)
        except ValueError as exc:
            raise DotParseError(str(exc)) from None

    nodes: set[NodeLabel] = set()
    directed: list[tuple[NodeLabel, NodeLabel]] = []
    bidirected: list[tuple[NodeLabel, NodeLabel]] = []
    for ln in lines[1:-1]:
        edge = _DOT_EDGE_RE.match(ln)
        if edge:
            u, v = node(edge.group(1)), node(edge.group(2))
            nodes.update((u, v))
            if edge.group(3):
                bidirected.append((u, v))
            else:
                directed.append((u, v))
            continue
        decl = _DOT_NODE_RE.match(ln)
        if decl:
            nodes.add(node(decl.group(1)))
            continue
        raise DotParseError(f"unsupported DOT statement: {ln!r}")
    return build_graph(nodes, directed, bidirected)

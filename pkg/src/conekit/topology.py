"""Linkage graphs: spanning trees, co-trees and signed fundamental cycles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import networkx as nx


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    joint: int
    source: Hashable
    target: Hashable


@dataclass(frozen=True)
class LinkageGraph:
    """Directed multigraph: vertices are links, edges are 1-DOF joints."""

    vertices: tuple
    edges: tuple
    base: Hashable | None = None

    def __post_init__(self):
        ids = [e.joint for e in self.edges]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise TopologyError(f"duplicate joint id {dup[0]}")
        vs = set(self.vertices)
        for e in self.edges:
            for v in (e.source, e.target):
                if v not in vs:
                    raise TopologyError(f"joint {e.joint} references unknown vertex {v!r}")
        if self.base is not None and self.base not in vs:
            raise TopologyError(f"base vertex {self.base!r} is not a vertex")

    @classmethod
    def from_edges(cls, edges: Sequence[tuple], base=None, vertices=None) -> "LinkageGraph":
        es = tuple(Edge(int(j), s, t) for j, s, t in edges)
        if vertices is None:
            seen = {}
            if base is not None:
                seen[base] = None
            for e in es:
                seen.setdefault(e.source, None)
                seen.setdefault(e.target, None)
            vertices = tuple(seen)
        return cls(tuple(vertices), es, base)

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def N(self) -> int:
        return len(self.vertices)

    def edge(self, joint: int) -> Edge:
        for e in self.edges:
            if e.joint == joint:
                return e
        raise KeyError(joint)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.source, e.target, key=e.joint)
        return g

    def is_connected(self) -> bool:
        return self.N > 0 and nx.is_connected(self.to_networkx())


@dataclass(frozen=True)
class FundamentalCycle:
    """Ordered signed traversal ``((joint, +1|-1), ...)``."""

    steps: tuple = field(default_factory=tuple)

    @property
    def joints(self) -> tuple:
        return tuple(j for j, _ in self.steps)

    def signed(self) -> tuple:
        return tuple(s * j for j, s in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def rotations(self):
        n = len(self.steps)
        for k in range(n):
            yield self.steps[k:] + self.steps[:k]

    def reversed(self) -> "FundamentalCycle":
        return FundamentalCycle(tuple((j, -s) for j, s in reversed(self.steps)))

    def equivalent(self, other: "FundamentalCycle") -> bool:
        """Same closed walk up to starting point and direction."""
        target = tuple(other.steps)
        return any(r == target for r in self.rotations()) or any(
            r == target for r in self.reversed().rotations()
        )

    @classmethod
    def from_signed(cls, signed: Sequence[int]) -> "FundamentalCycle":
        return cls(tuple((abs(int(j)), 1 if int(j) > 0 else -1) for j in signed))


def cycle_space_dimension(g: LinkageGraph) -> int:
    if not g.is_connected():
        raise TopologyError("linkage graph is not connected")
    return g.n - g.N + 1


def check_closure(g: LinkageGraph, cycle: FundamentalCycle) -> None:
    """Raise unless consecutive signed edges chain head to tail and the walk closes."""
    if not cycle.steps:
        raise TopologyError("empty loop")
    walk = []
    for j, s in cycle.steps:
        try:
            e = g.edge(j)
        except KeyError:
            raise TopologyError(f"loop references unknown joint {j}") from None
        walk.append((e.source, e.target) if s > 0 else (e.target, e.source))
    for (a, b), (c, d) in zip(walk, walk[1:] + walk[:1]):
        if b != c:
            raise TopologyError(f"loop does not close: joint chain breaks between {b!r} and {c!r}")


def _tree_path(tree: nx.MultiGraph, a, b) -> list:
    return nx.shortest_path(tree, a, b)


def fundamental_cycles(
    g: LinkageGraph,
    cotree: Sequence[int],
    orderings: Sequence[FundamentalCycle] | None = None,
) -> list[FundamentalCycle]:
    """One signed cycle per co-tree joint: the joint plus the tree path closing it.

    Each cycle is traversed along its co-tree edge and starts at the base
    vertex when the base lies on it.  If ``orderings`` contains a cycle
    equivalent (up to rotation and reversal) to a computed one, that ordering
    is returned instead.
    """
    cotree = [int(c) for c in cotree]
    ids = {e.joint for e in g.edges}
    unknown = [c for c in cotree if c not in ids]
    if unknown:
        raise TopologyError(f"co-tree joint {unknown[0]} does not exist")
    tree = nx.MultiGraph()
    tree.add_nodes_from(g.vertices)
    forest = nx.utils.UnionFind(g.vertices)
    for e in g.edges:
        if e.joint in cotree:
            continue
        if forest[e.source] == forest[e.target]:
            raise TopologyError(f"co-tree {sorted(cotree)} leaves a cycle through joint {e.joint}")
        forest.union(e.source, e.target)
        tree.add_edge(e.source, e.target, key=e.joint)
    if not nx.is_connected(tree):
        raise TopologyError(f"removing co-tree {sorted(cotree)} disconnects the graph")
    cycles = []
    for c in cotree:
        e = g.edge(c)
        path = _tree_path(tree, e.target, e.source)
        steps = [(c, 1)]
        for a, b in zip(path, path[1:]):
            # tree has at most one edge between a and b
            j = next(iter(tree.get_edge_data(a, b)))
            te = g.edge(j)
            steps.append((j, 1 if (te.source, te.target) == (a, b) else -1))
        cyc = FundamentalCycle(tuple(steps))
        cyc = _rotate_to_base(g, cyc)
        if orderings:
            for ref in orderings:
                if cyc.equivalent(ref):
                    cyc = FundamentalCycle(tuple(ref.steps))
                    break
        cycles.append(cyc)
    return cycles


def _rotate_to_base(g: LinkageGraph, cyc: FundamentalCycle) -> FundamentalCycle:
    if g.base is None:
        return cyc
    for k, (j, s) in enumerate(cyc.steps):
        e = g.edge(j)
        start = e.source if s > 0 else e.target
        if start == g.base:
            return FundamentalCycle(cyc.steps[k:] + cyc.steps[:k])
    return cyc


def default_cotree(g: LinkageGraph) -> list[int]:
    """For each independent cycle pick its highest-id exclusive joint.

    The cycle basis comes from the spanning tree built by adding joints in
    increasing id order.  A cycle without an exclusive joint falls back to
    its own tree-closing joint.
    """
    if not g.is_connected():
        raise TopologyError("linkage graph is not connected")
    forest = nx.utils.UnionFind(g.vertices)
    closing = []
    for e in sorted(g.edges, key=lambda e: e.joint):
        if forest[e.source] == forest[e.target]:
            closing.append(e.joint)
        else:
            forest.union(e.source, e.target)
    base_cycles = fundamental_cycles(g, closing)
    member = [set(c.joints) for c in base_cycles]
    chosen = []
    for k, joints in enumerate(member):
        others = set().union(*(m for i, m in enumerate(member) if i != k))
        exclusive = sorted(joints - others)
        chosen.append(exclusive[-1] if exclusive else closing[k])
    # the chosen set must still leave a spanning tree
    try:
        fundamental_cycles(g, chosen)
    except TopologyError:
        return closing
    return chosen


def signed_incidence(g: LinkageGraph, cycle: FundamentalCycle) -> dict:
    """Vertex boundary of the signed edge chain; empty for a closed cycle."""
    boundary: dict = {}
    for j, s in cycle.steps:
        e = g.edge(j)
        boundary[e.target] = boundary.get(e.target, 0) + s
        boundary[e.source] = boundary.get(e.source, 0) - s
    return {v: c for v, c in boundary.items() if c != 0}

"""Unweighted switching digraph: cycle enumeration through an anchor vertex
and grouping of cycles into concatenable sets."""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .linalg import InvalidInputError, SwitchedFamily


@dataclass(frozen=True)
class SwitchDigraph:
    """Directed graph on vertices {1..n}; self-loops allowed."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("digraph needs at least one vertex")
        object.__setattr__(self, "edges",
                           frozenset((int(i), int(j)) for i, j in self.edges))
        for (i, j) in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InvalidInputError(f"edge ({i},{j}) leaves vertex set 1..{self.n}")

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)


@dataclass(frozen=True)
class CycleSet:
    """Simple cycles that all contain `anchor` and all begin at `start`,
    so their walks can be chained into an infinite walk."""

    anchor: int
    start: int
    cycles: tuple

    def __post_init__(self):
        object.__setattr__(self, "cycles",
                           tuple(tuple(int(v) for v in c) for c in self.cycles))
        if not self.cycles:
            raise InvalidInputError("cycle set must be nonempty")
        for c in self.cycles:
            if self.anchor not in c:
                raise InvalidInputError(f"cycle {c} misses anchor {self.anchor}")
            if c[0] != self.start:
                raise InvalidInputError(f"cycle {c} does not begin at {self.start}")
            if len(set(c)) != len(c):
                raise InvalidInputError(f"cycle {c} repeats a vertex")


def build_digraph(family: SwitchedFamily) -> SwitchDigraph:
    """Vertices are subsystem indices, edges the admissible switches."""
    return SwitchDigraph(n=family.n, edges=family.edges)


def canonical_rotation(cycle) -> tuple:
    """Rotate a cycle so its smallest vertex comes first."""
    c = tuple(cycle)
    k = c.index(min(c))
    return c[k:] + c[:k]


def rotate_to(cycle, u: int) -> tuple:
    """Rotate a cycle to begin at vertex u (must appear in the cycle)."""
    c = tuple(cycle)
    if u not in c:
        raise InvalidInputError(f"vertex {u} not on cycle {c}")
    k = c.index(u)
    return c[k:] + c[:k]


def is_cycle(g: SwitchDigraph, cycle) -> bool:
    """True when the vertex sequence is a simple cycle of g."""
    c = tuple(cycle)
    if not c or len(set(c)) != len(c) or len(c) > g.n:
        return False
    return all((c[k], c[(k + 1) % len(c)]) in g.edges for k in range(len(c)))


def enumerate_cycles_through(g: SwitchDigraph, p: int) -> list:
    """All simple cycles of g containing vertex p.

    Uses Johnson's elementary-circuits algorithm (via networkx); each cycle is
    returned once, rotated so its smallest vertex comes first, sorted by
    (length, vertex sequence) for determinism.
    """
    if not 1 <= p <= g.n:
        raise InvalidInputError(f"vertex {p} out of range 1..{g.n}")
    G = nx.DiGraph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    found = {canonical_rotation(c) for c in nx.simple_cycles(G) if p in c}
    return sorted(found, key=lambda c: (len(c), c))


def group_concatenable(cycles, p: int) -> CycleSet | None:
    """Largest group of cycles sharing a common start vertex.

    Each input cycle (all must contain p) is rotated to every vertex it
    visits; the start vertex u with the most cycles wins, ties broken by the
    smallest u.  Returns None for empty input.
    """
    cycles = [tuple(c) for c in cycles]
    if not cycles:
        return None
    for c in cycles:
        if p not in c:
            raise InvalidInputError(f"cycle {c} misses anchor {p}")
    groups: dict[int, list] = {}
    for c in cycles:
        for u in set(c):
            groups.setdefault(u, []).append(c)
    start = max(groups, key=lambda u: (len(groups[u]), -u))
    members = tuple(rotate_to(c, start) for c in groups[start])
    return CycleSet(anchor=p, start=start, cycles=members)

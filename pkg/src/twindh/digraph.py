"""Core digraph type and structural primitives.

Vertices are dense integer ids 0..n-1.  Arcs are ordered pairs (u, v) with
u != v; both (u, v) and (v, u) may be present at once (a bioriented edge).
All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterable, Optional

ISO_SIZE_CAP = 6


class GraphInputError(ValueError):
    """Bad vertex ids, loops, or otherwise malformed graph input."""


class EdgeListParseError(GraphInputError):
    """Edge-list text that cannot be parsed; carries the offending line."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SizeCapError(ValueError):
    """An exponential-time helper was asked to exceed its size cap."""


@dataclass(frozen=True)
class Digraph:
    """A finite simple digraph on vertices 0..n-1 with an immutable arc set."""

    n: int
    arcs: frozenset[tuple[int, int]]

    @staticmethod
    def of(n: int, arcs: Iterable[tuple[int, int]] = ()) -> "Digraph":
        """Validating constructor; rejects loops and out-of-range endpoints."""
        if n < 0:
            raise GraphInputError("vertex count must be nonnegative")
        arcset = frozenset((int(u), int(v)) for u, v in arcs)
        for u, v in arcset:
            if u == v:
                raise GraphInputError(f"loop ({u},{v}) not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"arc ({u},{v}) out of range for n={n}")
        return Digraph(n, arcset)

    @cached_property
    def out_sets(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            out[u].add(v)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def in_sets(self) -> tuple[frozenset[int], ...]:
        inn: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            inn[v].add(u)
        return tuple(frozenset(s) for s in inn)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def degree(self, v: int) -> int:
        return len(self.out_sets[v]) + len(self.in_sets[v])

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Digraph(n={self.n}, arcs={self.sorted_arcs()})"


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph; edges stored as (u, v) pairs with u < v."""

    n: int
    edges: frozenset[tuple[int, int]]

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def _check_vertex(g: Digraph, v: int) -> None:
    if not (0 <= v < g.n):
        raise GraphInputError(f"vertex {v} out of range for n={g.n}")


def induced_subgraph(
    g: Digraph, vertices: Iterable[int]
) -> tuple[Digraph, dict[int, int]]:
    """Induced subdigraph on ``vertices`` plus the old-id -> new-id remap.

    New ids are assigned 0..k-1 in ascending order of the old ids, so
    witnesses can always be translated back to the caller's ids.
    """
    vs = sorted(set(vertices))
    for v in vs:
        _check_vertex(g, v)
    remap = {old: new for new, old in enumerate(vs)}
    keep = set(vs)
    arcs = frozenset(
        (remap[u], remap[v]) for u, v in g.arcs if u in keep and v in keep
    )
    return Digraph(len(vs), arcs), remap


def underlying(g: Digraph) -> UndirectedGraph:
    """Underlying undirected graph: each arc becomes an edge, duplicates merged."""
    edges = frozenset((min(u, v), max(u, v)) for u, v in g.arcs)
    return UndirectedGraph(g.n, edges)


def strong_components(g: Digraph) -> list[tuple[int, ...]]:
    """Strongly connected components, each sorted, ordered by minimum vertex.

    Iterative Tarjan so very large graphs do not hit the recursion limit.
    """
    n = g.n
    out = g.out_sets
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    components: list[tuple[int, ...]] = []

    for root in range(n):
        if index[root] != -1:
            continue
        work: list[tuple[int, Optional[iter]]] = [(root, None)]
        while work:
            v, it = work.pop()
            if it is None:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
                it = iter(sorted(out[v]))
            advanced = False
            for w in it:
                if index[w] == -1:
                    work.append((v, it))
                    work.append((w, None))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    components.sort(key=lambda c: c[0])
    return components


def weak_components(g: Digraph) -> list[tuple[int, ...]]:
    """Connected components of the underlying graph, ordered by minimum vertex."""
    n = g.n
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in g.arcs:
        nbrs[u].add(v)
        nbrs[v].add(u)
    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in nbrs[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        components.append(tuple(sorted(comp)))
    return components


def is_weakly_connected(g: Digraph) -> bool:
    return g.n <= 1 or len(weak_components(g)) == 1


def is_isomorphic_small(g: Digraph, h: Digraph) -> bool:
    """Arc-preserving bijection test by permutation enumeration (n <= 6 only)."""
    if g.n > ISO_SIZE_CAP or h.n > ISO_SIZE_CAP:
        raise SizeCapError(
            f"isomorphism check limited to {ISO_SIZE_CAP} vertices"
        )
    if g.n != h.n or len(g.arcs) != len(h.arcs):
        return False
    g_deg = sorted((len(g.out_sets[v]), len(g.in_sets[v])) for v in range(g.n))
    h_deg = sorted((len(h.out_sets[v]), len(h.in_sets[v])) for v in range(h.n))
    if g_deg != h_deg:
        return False
    harcs = h.arcs
    for perm in permutations(range(g.n)):
        if all((perm[u], perm[v]) in harcs for u, v in g.arcs):
            return True
    return False


def distance(g: Digraph, u: int, v: int) -> Optional[int]:
    """BFS distance along arcs from u to v; None when v is unreachable."""
    _check_vertex(g, u)
    _check_vertex(g, v)
    if u == v:
        return 0
    out = g.out_sets
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in out[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return None


def parse_edge_list(text: str) -> Digraph:
    """Parse the canonical edge-list format.

    Line 1 is the vertex count; every further non-empty line is "u v" for the
    arc (u, v); '#' starts a comment line.  Loops and duplicate arcs are
    rejected with the offending line number.
    """
    n: Optional[int] = None
    arcs: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise EdgeListParseError(f"expected vertex count, got {raw!r}", line_no)
            if n < 0:
                raise EdgeListParseError("vertex count must be nonnegative", line_no)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"expected 'u v', got {raw!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer endpoint in {raw!r}", line_no)
        if u == v:
            raise EdgeListParseError(f"loop ({u},{v}) not allowed", line_no)
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListParseError(f"arc ({u},{v}) out of range for n={n}", line_no)
        if (u, v) in arcs:
            raise EdgeListParseError(f"duplicate arc ({u},{v})", line_no)
        arcs.add((u, v))
    if n is None:
        raise EdgeListParseError("empty input, expected vertex count", 1)
    return Digraph(n, frozenset(arcs))


def format_edge_list(g: Digraph) -> str:
    """Serialize a digraph in the canonical edge-list format (sorted arcs)."""
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.sorted_arcs())
    return "\n".join(lines) + "\n"

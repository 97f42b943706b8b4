"""Forbidden-induced-subdigraph machinery: the fixed small-digraph catalog,
the two-leaves and underlying-obstruction tests, and the exhaustive oracle.

The oracle decides class membership from first principles (scan every vertex
subset for an obstruction) and exists to validate the pruning recognizer,
not to scale; it is capped at a small vertex count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Optional

from .caps import resolve_caps
from .digraph import Digraph, SizeCapError, underlying

# Hand-transcribed 3- and 4-vertex obstructions.  Vertex ids follow the
# drawing order of the source figures; any relabeling is equivalent since
# matching is done up to isomorphism.
_CATALOG: tuple[tuple[str, int, tuple[tuple[int, int], ...]], ...] = (
    ("C3", 3, ((0, 1), (1, 2), (2, 0))),
    ("H0", 3, ((0, 1), (1, 0), (1, 2), (2, 0))),
    ("H1", 4, ((0, 1), (1, 2), (2, 3), (3, 0))),
    ("H2", 4, ((2, 3), (3, 2), (0, 1), (2, 0), (1, 3))),
    ("H3", 4, ((2, 3), (0, 2), (3, 2), (2, 0), (0, 1), (1, 3))),
    ("H4", 4, ((2, 3), (3, 2), (0, 1), (1, 0), (2, 0), (1, 3))),
    ("H5", 4, ((2, 3), (2, 0), (0, 2), (0, 1), (1, 0), (1, 3), (3, 1))),
    ("H6", 4, ((0, 1), (0, 2), (2, 3), (3, 1))),
    ("H7", 4, ((2, 0), (3, 1), (2, 3), (3, 2), (0, 1))),
    ("H8", 4, ((0, 2), (1, 3), (2, 3), (3, 2), (0, 1))),
    ("H9", 4, ((2, 3), (3, 2), (0, 1), (1, 0), (2, 0), (3, 1))),
    ("H10", 4, ((0, 1), (0, 2), (2, 3), (3, 1), (0, 3))),
    ("H11", 4, ((0, 1), (0, 2), (2, 3), (3, 1), (2, 1))),
    ("H12", 4, ((3, 2), (2, 3), (2, 0), (3, 1), (3, 0), (0, 1))),
    ("H13", 4, ((3, 2), (0, 1), (0, 2), (1, 2), (1, 3), (2, 3))),
    ("H14", 4, ((3, 2), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3))),
    ("H15", 4, ((3, 2), (2, 3), (2, 0), (3, 1), (0, 1), (2, 1))),
    ("H16", 4, ((2, 3), (3, 2), (2, 0), (0, 2), (0, 1), (1, 3), (0, 3))),
    ("H17", 4, ((2, 3), (3, 2), (0, 1), (1, 0), (2, 0), (3, 1), (3, 0))),
    ("H18", 4, ((0, 2), (2, 0), (0, 1), (1, 0), (3, 1), (1, 3), (0, 3), (2, 3))),
    ("H19", 4, ((0, 2), (2, 0), (0, 1), (1, 0), (3, 1), (1, 3), (2, 3), (2, 1))),
    ("H20", 4, ((3, 2), (0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 1))),
    ("H21", 4, ((3, 2), (2, 3), (2, 0), (3, 1), (3, 0), (0, 1), (0, 3))),
    ("H22", 4, ((2, 3), (3, 2), (2, 0), (0, 2), (0, 1), (1, 3), (1, 2), (2, 1))),
    ("H23", 4, ((2, 0), (0, 1), (1, 0), (3, 1), (0, 3), (2, 3), (3, 2), (3, 0))),
    ("H24", 4, ((0, 2), (0, 1), (1, 0), (3, 1), (0, 3), (2, 3), (3, 2), (3, 0))),
    ("H25", 4, ((0, 2), (2, 0), (0, 1), (1, 0), (3, 1), (1, 3), (0, 3), (3, 0), (2, 3))),
    ("H26", 4, ((0, 2), (1, 2), (2, 0), (0, 1), (1, 0), (3, 1), (1, 3), (2, 3), (2, 1))),
    ("H27", 4, ((0, 2), (2, 0), (0, 1), (1, 0), (3, 1), (1, 3), (0, 3), (2, 3), (2, 1))),
)

CATALOG_GROUPS = {
    "C3": "directed triangle",
    "H0": "3 vertices, strongly connected",
    **{f"H{i}": "underlying C4, strongly connected" for i in range(1, 6)},
    **{f"H{i}": "underlying C4, not strongly connected" for i in range(6, 10)},
    **{f"H{i}": "underlying C4 plus one single diagonal" for i in range(10, 20)},
    **{f"H{i}": "underlying C4 plus a bioriented diagonal" for i in range(20, 27)},
    "H27": "orientation of K4",
}

# Guards against accidental edits of the transcription; recomputed in tests.
EXPECTED_CATALOG_SHA256 = (
    "__CATALOG_SHA256__"
)

# Undirected obstruction patterns for the underlying graph (holes are tested
# structurally, so only the bounded patterns need edge lists).
_HOUSE_EDGES = ((0, 1), (0, 3), (1, 2), (2, 3), (2, 4), (3, 4))
_GEM_EDGES = ((0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4))
_DOMINO_EDGES = ((0, 1), (0, 3), (1, 2), (2, 3), (2, 5), (3, 4), (4, 5))


@dataclass(frozen=True)
class Witness:
    """A forbidden structure found inside a digraph, in original vertex ids.

    kind is one of "C3", "H0".."H27", "two_leaves", "hole", "house", "gem",
    "domino".
    """

    kind: str
    vertices: tuple[int, ...]


def catalog() -> list[tuple[str, Digraph]]:
    """The 29 fixed forbidden digraphs on at most 4 vertices."""
    return [(name, Digraph.of(n, arcs)) for name, n, arcs in _CATALOG]


def catalog_checksum() -> str:
    """SHA-256 over the canonical serialization of the catalog data."""
    blob = ";".join(
        f"{name}:{n}:{sorted(arcs)}" for name, n, arcs in _CATALOG
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def _perm_masks(k: int, arcs: tuple[tuple[int, int], ...]) -> set[int]:
    masks = set()
    for perm in permutations(range(k)):
        mask = 0
        for u, v in arcs:
            mask |= 1 << (perm[u] * k + perm[v])
        masks.add(mask)
    return masks


@lru_cache(maxsize=None)
def _bad_masks(k: int) -> dict[int, str]:
    """All labeled arc masks on k vertices isomorphic to a catalog entry."""
    table: dict[int, str] = {}
    for name, n, arcs in _CATALOG:
        if n != k:
            continue
        for mask in _perm_masks(k, arcs):
            table.setdefault(mask, name)
    return table


@lru_cache(maxsize=None)
def _un_pattern_masks(k: int) -> dict[int, str]:
    """Labeled undirected edge masks on k vertices matching house/gem/domino."""
    patterns = []
    if k == 5:
        patterns = [("house", _HOUSE_EDGES), ("gem", _GEM_EDGES)]
    elif k == 6:
        patterns = [("domino", _DOMINO_EDGES)]
    pair_index = {
        pair: i for i, pair in enumerate(combinations(range(k), 2))
    }
    table: dict[int, str] = {}
    for name, edges in patterns:
        for perm in permutations(range(k)):
            mask = 0
            for u, v in edges:
                a, b = perm[u], perm[v]
                mask |= 1 << pair_index[(min(a, b), max(a, b))]
            table.setdefault(mask, name)
    return table


def _arc_mask(out_sets, subset: tuple[int, ...]) -> int:
    k = len(subset)
    mask = 0
    for i, u in enumerate(subset):
        row = out_sets[u]
        base = i * k
        for j, w in enumerate(subset):
            if w in row:
                mask |= 1 << (base + j)
    return mask


def _un_mask(out_sets, in_sets, subset: tuple[int, ...]) -> int:
    k = len(subset)
    mask = 0
    bit = 0
    for i in range(k):
        u = subset[i]
        for j in range(i + 1, k):
            w = subset[j]
            if w in out_sets[u] or w in in_sets[u]:
                mask |= 1 << bit
            bit += 1
    return mask


def _subset_un_adj(out_sets, in_sets, subset: tuple[int, ...]) -> dict[int, set[int]]:
    sset = set(subset)
    return {v: (set(out_sets[v]) | set(in_sets[v])) & sset for v in subset}


def _is_connected_adj(adj: dict[int, set[int]]) -> bool:
    verts = list(adj)
    if len(verts) <= 1:
        return True
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def _two_leaves_on(out_sets, in_sets, subset: tuple[int, ...]) -> bool:
    if len(subset) < 4:
        return False
    adj = _subset_un_adj(out_sets, in_sets, subset)
    leaf_nbrs = []
    for v in subset:
        if len(adj[v]) != 1:
            continue
        w = next(iter(adj[v]))
        if w in out_sets[v] and v in out_sets[w]:
            leaf_nbrs.append(w)
    if len(leaf_nbrs) < 2 or len(set(leaf_nbrs)) < 2:
        return False
    return _is_connected_adj(adj)


def _is_cycle_adj(adj: dict[int, set[int]]) -> bool:
    return all(len(nbrs) == 2 for nbrs in adj.values()) and _is_connected_adj(adj)


def is_two_leaves(g: Digraph) -> bool:
    """Weakly connected, at least 4 vertices, and two bioriented leaves whose
    single neighbors differ."""
    return _two_leaves_on(g.out_sets, g.in_sets, tuple(range(g.n)))


def _find_long_hole(un_adj, min_len: int) -> Optional[tuple[int, ...]]:
    """First chordless cycle of length >= min_len, identified by growing
    induced paths whose smallest vertex is the start."""
    n = len(un_adj)
    for s in range(n):
        stack: list[tuple[list[int], set[int]]] = [([s], set())]
        while stack:
            path, internal_adj = stack.pop()
            last = path[-1]
            for y in sorted(un_adj[last]):
                if y <= s or y in path[1:] or y in internal_adj:
                    continue
                if s in un_adj[y]:
                    if len(path) + 1 >= min_len and len(path) >= 3:
                        return tuple(path + [y])
                    continue  # would chord back to s if used internally
                new_internal = internal_adj | (un_adj[last] - {y})
                stack.append((path + [y], new_internal))
    return None


def underlying_is_hhdg_free(g: Digraph) -> tuple[bool, Optional[Witness]]:
    """Whether the underlying graph avoids holes, house, domino and gem.

    House/gem/domino and 5/6-holes are found by subset enumeration; longer
    holes by a chordless-cycle search.  The first witness in scan order is
    returned.
    """
    un = underlying(g)
    out_sets = g.out_sets
    in_sets = g.in_sets
    for k in (5, 6):
        if g.n < k:
            break
        patterns = _un_pattern_masks(k)
        for subset in combinations(range(g.n), k):
            mask = _un_mask(out_sets, in_sets, subset)
            name = patterns.get(mask)
            if name is not None:
                return False, Witness(name, subset)
            adj = {v: un.adj[v] & set(subset) for v in subset}
            if _is_cycle_adj(adj) and sum(len(a) for a in adj.values()) // 2 == k:
                return False, Witness("hole", subset)
    if g.n >= 7:
        hole = _find_long_hole([set(a) for a in un.adj], min_len=7)
        if hole is not None:
            return False, Witness("hole", tuple(sorted(hole)))
    return True, None


def oracle_is_twin_dh(
    g: Digraph, cap: Optional[int] = None
) -> tuple[bool, Optional[Witness]]:
    """Exhaustive membership test by forbidden induced subdigraphs.

    Scans vertex subsets in increasing size (then lexicographically), so a
    returned witness has minimum possible size.  Checks, per subset: the
    3/4-vertex catalog, the two-leaves condition, chordless underlying
    cycles of length >= 5, and the house/gem/domino patterns.
    """
    n = g.n
    limit = cap if cap is not None else resolve_caps().oracle
    if n > limit:
        raise SizeCapError(
            f"oracle capped at {limit} vertices, got {n} "
            "(raise via TWINDH_SIZE_CAPS, e.g. oracle=12)"
        )
    out_sets = g.out_sets
    in_sets = g.in_sets
    bad3 = _bad_masks(3)
    bad4 = _bad_masks(4)
    for k in range(3, n + 1):
        patterns = _un_pattern_masks(k) if k in (5, 6) else {}
        for subset in combinations(range(n), k):
            if k == 3:
                name = bad3.get(_arc_mask(out_sets, subset))
                if name is not None:
                    return False, Witness(name, subset)
                continue
            if k == 4:
                name = bad4.get(_arc_mask(out_sets, subset))
                if name is not None:
                    return False, Witness(name, subset)
            if _two_leaves_on(out_sets, in_sets, subset):
                return False, Witness("two_leaves", subset)
            if k >= 5:
                adj = _subset_un_adj(out_sets, in_sets, subset)
                if _is_cycle_adj(adj):
                    return False, Witness("hole", subset)
                name = patterns.get(_un_mask(out_sets, in_sets, subset))
                if name is not None:
                    return False, Witness(name, subset)
    return True, None

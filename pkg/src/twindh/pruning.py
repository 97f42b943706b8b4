"""Directed pruning sequences: application, validation, recognition and
induced-subgraph sequence derivation.

A pruning sequence certifies that a digraph can be grown from a single root
vertex by pendant and directed-twin insertions.  Each step names the new
vertex, the operation, and the anchor vertex it is attached to.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Optional

from .caps import resolve_caps
from .digraph import Digraph, GraphInputError, SizeCapError, is_weakly_connected


class PruningOp(Enum):
    PENDANT_PLUS = "PP"
    PENDANT_MINUS = "PM"
    FALSE_TWIN = "FT"
    TRUE_IN_TWIN = "TIT"
    TRUE_OUT_TWIN = "TOT"
    BI_TRUE_TWIN = "TBT"


PENDANT_OPS = frozenset({PruningOp.PENDANT_PLUS, PruningOp.PENDANT_MINUS})
TWIN_OPS = frozenset(
    {
        PruningOp.FALSE_TWIN,
        PruningOp.TRUE_IN_TWIN,
        PruningOp.TRUE_OUT_TWIN,
        PruningOp.BI_TRUE_TWIN,
    }
)

_OP_BY_CODE = {op.value: op for op in PruningOp}


class MalformedSequenceError(ValueError):
    """A pruning sequence that violates its structural invariants."""

    def __init__(self, message: str, step_index: Optional[int] = None):
        if step_index is not None:
            message = f"step {step_index}: {message}"
        super().__init__(message)
        self.step_index = step_index


class SequenceParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DerivationError(ValueError):
    """The induced-subgraph sequence rewrite could not be completed."""


@dataclass(frozen=True)
class PruningStep:
    vertex: int
    op: PruningOp
    anchor: int


@dataclass(frozen=True)
class PruningSequence:
    root: int
    steps: tuple[PruningStep, ...]

    @property
    def n(self) -> int:
        return 1 + len(self.steps)

    def order(self) -> list[int]:
        """Creation order of the vertices: root first, then step vertices."""
        return [self.root] + [s.vertex for s in self.steps]


def check_shape(seq: PruningSequence) -> None:
    """Raise MalformedSequenceError unless the structural invariants hold:
    anchors appear earlier, step vertices are fresh, and the ids mentioned
    are exactly 0..n-1."""
    seen = {seq.root}
    for i, step in enumerate(seq.steps):
        if step.vertex == step.anchor:
            raise MalformedSequenceError("vertex equals anchor", i)
        if step.anchor not in seen:
            raise MalformedSequenceError(
                f"anchor {step.anchor} not created earlier", i
            )
        if step.vertex in seen:
            raise MalformedSequenceError(f"vertex {step.vertex} not fresh", i)
        seen.add(step.vertex)
    if seen != set(range(seq.n)):
        raise MalformedSequenceError(
            f"vertices mentioned must be exactly 0..{seq.n - 1}"
        )


def _insert_step(
    out: list[set[int]], inn: list[set[int]], v: int, op: PruningOp, a: int
) -> None:
    """Grow the adjacency structure by one step.  v must be fresh, so the
    anchor's neighborhoods cannot mention it."""
    if op in TWIN_OPS:
        out[v] = set(out[a])
        inn[v] = set(inn[a])
        for w in out[v]:
            inn[w].add(v)
        for w in inn[v]:
            out[w].add(v)
        if op in (PruningOp.TRUE_IN_TWIN, PruningOp.BI_TRUE_TWIN):
            out[v].add(a)
            inn[a].add(v)
        if op in (PruningOp.TRUE_OUT_TWIN, PruningOp.BI_TRUE_TWIN):
            out[a].add(v)
            inn[v].add(a)
    elif op is PruningOp.PENDANT_PLUS:
        out[v].add(a)
        inn[a].add(v)
    elif op is PruningOp.PENDANT_MINUS:
        out[a].add(v)
        inn[v].add(a)
    else:  # pragma: no cover - enum is closed
        raise AssertionError(op)


def apply_sequence(seq: PruningSequence) -> Digraph:
    """Build the digraph a pruning sequence denotes.

    Pendant plus/minus add a single arc to/from the anchor.  Twin steps copy
    the anchor's in- and out-neighborhoods, then add the pair arcs the twin
    flavor requires (none / (v,a) / (a,v) / both).
    """
    check_shape(seq)
    n = seq.n
    out: list[set[int]] = [set() for _ in range(n)]
    inn: list[set[int]] = [set() for _ in range(n)]
    for step in seq.steps:
        _insert_step(out, inn, step.vertex, step.op, step.anchor)
    arcs = frozenset((u, v) for u in range(n) for v in out[u])
    return Digraph(n, arcs)


@dataclass(frozen=True)
class SequenceValidation:
    ok: bool
    step_index: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _step_mismatch(seq: PruningSequence, g: Digraph) -> SequenceValidation:
    """Locate the first step whose claimed relation fails in the prefix of g."""
    order = seq.order()
    present: set[int] = {seq.root}
    out = [set() for _ in range(g.n)]
    inn = [set() for _ in range(g.n)]
    for i, step in enumerate(seq.steps):
        v, a = step.vertex, step.anchor
        present.add(v)
        for w in present:
            if (v, w) in g.arcs:
                out[v].add(w)
                inn[w].add(v)
            if (w, v) in g.arcs:
                out[w].add(v)
                inn[v].add(w)
        claimed = _removal_op(out, inn, v, a)
        if claimed is not step.op:
            return SequenceValidation(
                False,
                i,
                f"vertex {v} is not a {step.op.value} of {a} in the prefix "
                f"on {sorted(present)}",
            )
    return SequenceValidation(False, None, "reconstruction differs from target")


def _removal_op(
    out: list[set[int]], inn: list[set[int]], v: int, a: int
) -> Optional[PruningOp]:
    """The pruning op that vertex v realises relative to anchor a in the
    current graph, or None."""
    deg = len(out[v]) + len(inn[v])
    if deg == 1:
        if out[v] == {a}:
            return PruningOp.PENDANT_PLUS
        if inn[v] == {a}:
            return PruningOp.PENDANT_MINUS
    if (out[v] - {a}) != (out[a] - {v}):
        return None
    if (inn[v] - {a}) != (inn[a] - {v}):
        return None
    va = a in out[v]
    av = v in out[a]
    if va and av:
        return PruningOp.BI_TRUE_TWIN
    if va:
        return PruningOp.TRUE_IN_TWIN
    if av:
        return PruningOp.TRUE_OUT_TWIN
    return PruningOp.FALSE_TWIN


def validate_sequence(seq: PruningSequence, g: Digraph) -> SequenceValidation:
    """True iff applying the sequence reproduces g exactly.

    Because every step of the rebuilt graph realises its claimed relation by
    construction, exact equality of the final graphs also certifies every
    per-prefix claim; the slower step walk is only used to produce the
    first-mismatch report.
    """
    try:
        check_shape(seq)
    except MalformedSequenceError as exc:
        return SequenceValidation(False, exc.step_index, str(exc))
    rebuilt = apply_sequence(seq)
    if rebuilt.n != g.n:
        return SequenceValidation(
            False, None, f"sequence builds {rebuilt.n} vertices, graph has {g.n}"
        )
    if rebuilt.arcs == g.arcs:
        return SequenceValidation(True)
    report = _step_mismatch(seq, g)
    if report.step_index is not None:
        return report
    missing = sorted(rebuilt.arcs - g.arcs)
    extra = sorted(g.arcs - rebuilt.arcs)
    return SequenceValidation(
        False,
        None,
        f"arc mismatch: reconstruction adds {missing}, lacks {extra}",
    )


def _twin_pair_op(
    out: list[set[int]], inn: list[set[int]], u: int, v: int
) -> Optional[PruningOp]:
    """Twin flavor of the pair (u, v) where v would be deleted as a twin of
    u, or None when they are not directed twins."""
    if (out[u] - {v}) != (out[v] - {u}):
        return None
    if (inn[u] - {v}) != (inn[v] - {u}):
        return None
    vu = u in out[v]
    uv = v in out[u]
    if vu and uv:
        return PruningOp.BI_TRUE_TWIN
    if vu:
        return PruningOp.TRUE_IN_TWIN
    if uv:
        return PruningOp.TRUE_OUT_TWIN
    return PruningOp.FALSE_TWIN


def _delete_vertex(out: list[set[int]], inn: list[set[int]], v: int) -> None:
    for w in out[v]:
        inn[w].discard(v)
    for w in inn[v]:
        out[w].discard(v)
    out[v] = set()
    inn[v] = set()


def _greedy(g: Digraph) -> Optional[PruningSequence]:
    """Peel removable vertices, pendants first, then the lexicographically
    first twin pair (deleting the higher id).  Steps are recorded in reverse.
    """
    n = g.n
    out = [set(s) for s in g.out_sets]
    inn = [set(s) for s in g.in_sets]
    live = sorted(range(n))
    steps_rev: list[PruningStep] = []
    while len(live) > 1:
        chosen: Optional[PruningStep] = None
        for v in live:
            if len(out[v]) + len(inn[v]) == 1:
                if out[v]:
                    chosen = PruningStep(v, PruningOp.PENDANT_PLUS, next(iter(out[v])))
                else:
                    chosen = PruningStep(v, PruningOp.PENDANT_MINUS, next(iter(inn[v])))
                break
        if chosen is None:
            for u, v in combinations(live, 2):
                op = _twin_pair_op(out, inn, u, v)
                if op is not None:
                    chosen = PruningStep(v, op, u)
                    break
        if chosen is None:
            return None
        _delete_vertex(out, inn, chosen.vertex)
        live.remove(chosen.vertex)
        steps_rev.append(chosen)
    return PruningSequence(live[0], tuple(reversed(steps_rev)))


def _exact(g: Digraph, cap: int) -> Optional[PruningSequence]:
    """Backtracking over all removable vertices with memoized failures.

    States are vertex subsets of g (induced subgraphs), so the memo never
    needs canonicalization.  Deleting the lower vertex of a twin pair gives
    a graph isomorphic to deleting the higher one, so only the higher branch
    is explored.
    """
    n = g.n
    if n > cap:
        raise SizeCapError(
            f"exact recognition capped at {cap} vertices, got {n} "
            "(raise via TWINDH_SIZE_CAPS, e.g. exact=12)"
        )
    if n == 0:
        return None
    out_full = g.out_sets
    in_full = g.in_sets
    failed: set[frozenset[int]] = set()

    def candidates(sub: frozenset[int]) -> list[PruningStep]:
        out = {v: out_full[v] & sub for v in sub}
        inn = {v: in_full[v] & sub for v in sub}
        found: list[PruningStep] = []
        used: set[int] = set()
        for v in sorted(sub):
            if len(out[v]) + len(inn[v]) == 1:
                if out[v]:
                    found.append(
                        PruningStep(v, PruningOp.PENDANT_PLUS, next(iter(out[v])))
                    )
                else:
                    found.append(
                        PruningStep(v, PruningOp.PENDANT_MINUS, next(iter(inn[v])))
                    )
                used.add(v)
        ordered = sorted(sub)
        for i, u in enumerate(ordered):
            for v in ordered[i + 1 :]:
                if v in used:
                    continue
                if (out[u] - {v}) != (out[v] - {u}):
                    continue
                if (inn[u] - {v}) != (inn[v] - {u}):
                    continue
                vu = u in out[v]
                uv = v in out[u]
                if vu and uv:
                    op = PruningOp.BI_TRUE_TWIN
                elif vu:
                    op = PruningOp.TRUE_IN_TWIN
                elif uv:
                    op = PruningOp.TRUE_OUT_TWIN
                else:
                    op = PruningOp.FALSE_TWIN
                found.append(PruningStep(v, op, u))
                used.add(v)
        return found

    def search(sub: frozenset[int]) -> Optional[tuple[int, list[PruningStep]]]:
        if len(sub) == 1:
            return next(iter(sub)), []
        if sub in failed:
            return None
        for step in candidates(sub):
            result = search(sub - {step.vertex})
            if result is not None:
                root, steps = result
                steps.append(step)
                return root, steps
        failed.add(sub)
        return None

    result = search(frozenset(range(n)))
    if result is None:
        return None
    root, steps = result
    return PruningSequence(root, tuple(steps))


def recognize(
    g: Digraph, mode: str = "greedy", exact_cap: Optional[int] = None
) -> Optional[PruningSequence]:
    """Compute a pruning sequence for g, or None when no sequence is found.

    In exact mode a None answer is a certificate (the search is exhaustive);
    in greedy mode it is a claim that the test suite cross-checks against the
    forbidden-subdigraph oracle.  Every returned sequence validates against g.
    """
    if mode == "greedy":
        return _greedy(g)
    if mode == "exact":
        cap = exact_cap if exact_cap is not None else resolve_caps().exact
        return _exact(g, cap)
    raise ValueError(f"unknown recognition mode {mode!r}")


def _rewrite_without(
    root: int, steps: list[PruningStep], v: int
) -> tuple[int, list[PruningStep]]:
    """Remove vertex v from a pruning sequence by the single-vertex rewrite.

    Three cases: v is the root (its last twin dependent, if any, takes over
    as root); v anchors nothing after its creation (drop its step); v anchors
    later steps (its last twin dependent is substituted for v everywhere and
    that dependent's own step disappears).
    """
    dep_idx = [i for i, s in enumerate(steps) if s.anchor == v]
    if v == root:
        if not dep_idx:
            raise DerivationError("cannot delete the only vertex of a sequence")
        if len(dep_idx) == 1:
            i = dep_idx[0]
            return steps[i].vertex, steps[:i] + steps[i + 1 :]
        last = dep_idx[-1]
        if steps[last].op not in TWIN_OPS:
            raise DerivationError(
                f"deleting {v}: its last dependent step is a pendant insertion, "
                "so no twin can take its place"
            )
        sub = steps[last].vertex
        new_steps = [
            PruningStep(s.vertex, s.op, sub if s.anchor == v else s.anchor)
            for i, s in enumerate(steps)
            if i != last
        ]
        return sub, new_steps

    own = next(i for i, s in enumerate(steps) if s.vertex == v)
    deps_after = [i for i in dep_idx if i > own]
    if not deps_after:
        return root, steps[:own] + steps[own + 1 :]
    last = deps_after[-1]
    if steps[last].op not in TWIN_OPS:
        raise DerivationError(
            f"deleting {v}: its last dependent step is a pendant insertion, "
            "so no twin can take its place"
        )
    sub = steps[last].vertex
    new_steps: list[PruningStep] = []
    for i, s in enumerate(steps):
        if i == last:
            continue
        if i == own:
            new_steps.append(PruningStep(sub, s.op, s.anchor))
        elif s.anchor == v:
            new_steps.append(PruningStep(s.vertex, s.op, sub))
        else:
            new_steps.append(s)
    return root, new_steps


def derive_subgraph_sequence(
    seq: PruningSequence, keep: Iterable[int]
) -> tuple[PruningSequence, dict[int, int]]:
    """Pruning sequence for the induced subgraph on ``keep``.

    The kept subgraph must be weakly connected.  Vertices are deleted one at
    a time, latest-created first, each via the single-vertex rewrite; a
    vertex whose rewrite is blocked is retried after the others.  The result
    is remapped to dense ids exactly like induced_subgraph and returned with
    the remap table.
    """
    g = apply_sequence(seq)
    keep_set = set(keep)
    for v in keep_set:
        if not (0 <= v < g.n):
            raise GraphInputError(f"keep vertex {v} out of range for n={g.n}")
    if not keep_set:
        raise GraphInputError("keep set must be nonempty")
    from .digraph import induced_subgraph  # local import to avoid cycle noise

    sub, remap = induced_subgraph(g, keep_set)
    if not is_weakly_connected(sub):
        raise GraphInputError("kept vertices induce a non-weakly-connected digraph")

    root = seq.root
    steps = list(seq.steps)
    to_delete = set(range(g.n)) - keep_set
    while to_delete:
        order = [root] + [s.vertex for s in steps]
        pending = sorted(to_delete, key=order.index, reverse=True)
        progressed = False
        blocked: Optional[DerivationError] = None
        for v in pending:
            try:
                root, steps = _rewrite_without(root, steps, v)
            except DerivationError as exc:
                blocked = exc
                continue
            to_delete.discard(v)
            progressed = True
            break
        if not progressed:
            raise DerivationError(
                f"no deletable vertex among {sorted(to_delete)}: {blocked}"
            )
    new_steps = tuple(
        PruningStep(remap[s.vertex], s.op, remap[s.anchor]) for s in steps
    )
    return PruningSequence(remap[root], new_steps), remap


def parse_sequence(text: str) -> PruningSequence:
    """Parse the pruning-sequence text format.

    Line 1 is "root <id>"; each following line is "<vertex> <OP> <anchor>"
    with OP one of PP, PM, FT, TIT, TOT, TBT.
    """
    root: Optional[int] = None
    steps: list[PruningStep] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if root is None:
            if len(parts) != 2 or parts[0] != "root":
                raise SequenceParseError(f"expected 'root <id>', got {raw!r}", line_no)
            try:
                root = int(parts[1])
            except ValueError:
                raise SequenceParseError(f"bad root id in {raw!r}", line_no)
            continue
        if len(parts) != 3:
            raise SequenceParseError(
                f"expected '<vertex> <OP> <anchor>', got {raw!r}", line_no
            )
        if parts[1] not in _OP_BY_CODE:
            raise SequenceParseError(f"unknown operation {parts[1]!r}", line_no)
        try:
            vertex, anchor = int(parts[0]), int(parts[2])
        except ValueError:
            raise SequenceParseError(f"non-integer vertex id in {raw!r}", line_no)
        steps.append(PruningStep(vertex, _OP_BY_CODE[parts[1]], anchor))
    if root is None:
        raise SequenceParseError("empty input, expected 'root <id>'", 1)
    return PruningSequence(root, tuple(steps))


def format_sequence(seq: PruningSequence) -> str:
    lines = [f"root {seq.root}"]
    lines.extend(f"{s.vertex} {s.op.value} {s.anchor}" for s in seq.steps)
    return "\n".join(lines) + "\n"

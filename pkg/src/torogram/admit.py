"""Braid-admissibility verdicts and level decompositions.

A diagram is admissible when every nonempty reduced orientation-respecting
loop has homology class >= 1, weakly admissible when every such loop has
class >= 0.  Verdicts come with a certificate loop whenever the answer is
negative, so callers can re-check the claim with ``loop_homology``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagrams import (
    ArrowJump,
    CircleForward,
    DecoratedGaussDiagram,
    DiagramLoop,
    TDiagram,
    loop_homology,
    loop_to_json,
)
from .errors import NoLevels, NotPositive

ADMISSIBLE = "admissible"
WEAKLY_ONLY = "weakly_only"
NOT_WEAKLY = "not_weakly"


@dataclass(frozen=True)
class TransitionGraph:
    """Directed multigraph tracking how loops hop between arrows.

    One vertex per arrow; circle edge ``r`` becomes a graph edge from the
    arrow owning token ``r`` to the arrow owning token ``r + 1``, weighted by
    the marking count a refinement would place on that circle edge.  Closed
    walks correspond exactly to nonempty reduced orientation-respecting loops
    of the same homology class, so all verdicts reduce to cycle searches.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int, int], ...]  # (from arrow, to arrow, weight, circle edge)


def transition_graph(g: DecoratedGaussDiagram) -> TransitionGraph:
    counts = g.reference_counts
    m = 2 * g.n
    edges = tuple(
        (g.tokens[r].arrow, g.tokens[(r + 1) % m].arrow, counts[r], r) for r in range(m)
    )
    return TransitionGraph(g.n, edges)


def _walk_to_loop(g: DecoratedGaussDiagram, circle_edges: list[int]) -> DiagramLoop:
    """Closed walk in the transition graph, as a loop on the diagram."""
    m = 2 * g.n
    steps: list[CircleForward | ArrowJump] = []
    for i, e in enumerate(circle_edges):
        steps.append(CircleForward(e))
        nxt = circle_edges[(i + 1) % len(circle_edges)]
        if (e + 1) % m != nxt:
            tok = g.tokens[nxt]
            steps.append(ArrowJump(tok.arrow, "head" if tok.kind == "H" else "tail"))
    return DiagramLoop(tuple(steps))


def _pessimal_cycle(tg: TransitionGraph, scale: int, bias: int) -> list[int] | None:
    """A directed cycle with ``sum(scale*w + bias) < 0``, as circle-edge walk.

    Bellman-Ford from a virtual everywhere-source.  If some pass among the
    first ``vertex_count`` still relaxes, a cycle negative under the rescaled
    weights exists, and the predecessor chain of the last relaxed vertex is
    then long enough to be guaranteed to wrap around one.
    """
    n = tg.vertex_count
    edges = [(u, v, scale * w + bias, ce) for (u, v, w, ce) in tg.edges]
    dist = [0] * (n + 1)
    pred: dict[int, tuple[int, int]] = {}
    for _ in range(n):
        last = None
        for u, v, wt, ce in edges:
            nd = dist[u] + wt
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = (u, ce)
                last = v
        if last is None:
            return None
    seen: dict[int, int] = {}
    order: list[int] = []
    cur = last
    while cur not in seen:
        seen[cur] = len(order)
        order.append(cur)
        cur = pred[cur][0]
    cyc = order[seen[cur]:]  # backward list: pred(cyc[i]) == cyc[i + 1], wrapping
    c = len(cyc)
    return [pred[cyc[i]][1] for i in range(c - 2, -1, -1)] + [pred[cyc[c - 1]][1]]


def _negative_cycle(tg: TransitionGraph) -> list[int] | None:
    """A cycle of weight < 0, exactly.

    Rescaling w -> (E+1)*w + 1 keeps cycles of weight <= -1 negative, pushes
    weight >= 0 cycles strictly positive, and rules out rescaled-zero cycles
    altogether (a simple cycle's rescaled weight is its length mod E+1), so
    the predecessor-cycle extraction cannot return a zero-weight impostor.
    """
    return _pessimal_cycle(tg, len(tg.edges) + 1, 1)


def _zero_cycle(tg: TransitionGraph) -> list[int] | None:
    """A cycle of weight exactly 0; only sound once negative cycles are ruled out."""
    return _pessimal_cycle(tg, len(tg.edges) + 1, -1)


@dataclass(frozen=True)
class AdmissibilityReport:
    verdict: str  # one of ADMISSIBLE, WEAKLY_ONLY, NOT_WEAKLY
    certificate: DiagramLoop | None
    homology: int | None

    def to_json(self) -> dict:
        data: dict = {"verdict": self.verdict}
        if self.certificate is not None:
            data["class"] = self.homology
            data["loop"] = loop_to_json(self.certificate)
        return data


def _certified(
    g: DecoratedGaussDiagram, verdict: str, loop: DiagramLoop, homology: int
) -> AdmissibilityReport:
    assert loop_homology(g, loop) == homology
    return AdmissibilityReport(verdict, loop, homology)


def check_admissible(g: DecoratedGaussDiagram) -> AdmissibilityReport:
    """Classify the diagram, certifying negative answers with an explicit loop.

    Certificates prefer loops a reader can see at a glance: a distinguished
    loop of an offending arrow, then the circle, then a composite cycle dug
    out of the transition graph.
    """
    w = g.circle_valuation
    if g.n == 0:
        if w < 0:
            return _certified(g, NOT_WEAKLY, g.circle_loop(), w)
        if w == 0:
            return _certified(g, WEAKLY_ONLY, g.circle_loop(), 0)
        return AdmissibilityReport(ADMISSIBLE, None, None)
    for a in g.arrows:  # sorted by id
        if a.valuation < 0:
            return _certified(g, NOT_WEAKLY, g.distinguished_loop(a.id), a.valuation)
    if w < 0:
        return _certified(g, NOT_WEAKLY, g.circle_loop(), w)
    tg = transition_graph(g)
    walk = _negative_cycle(tg)
    if walk is not None:
        loop = _walk_to_loop(g, walk)
        counts = g.reference_counts
        return _certified(g, NOT_WEAKLY, loop, sum(counts[e] for e in walk))
    for a in g.arrows:
        if a.valuation == 0:
            return _certified(g, WEAKLY_ONLY, g.distinguished_loop(a.id), 0)
    if w == 0:
        return _certified(g, WEAKLY_ONLY, g.circle_loop(), 0)
    walk = _zero_cycle(tg)
    if walk is not None:
        return _certified(g, WEAKLY_ONLY, _walk_to_loop(g, walk), 0)
    return AdmissibilityReport(ADMISSIBLE, None, None)


# -- level decomposition ------------------------------------------------------


def level_decomposition(t: TDiagram, require_positive: bool = True) -> dict[int, int]:
    """Assign each arrow the round in which it peels off between markings.

    An arrow peels once both of its endpoints have at least one marking in
    the merged gap behind them (markings of removed arrows' edges merge into
    the surviving gaps).  Returns ``{arrow id: level}`` starting at 1, or
    raises :class:`NoLevels` carrying a marking-free loop of homology class 0
    that witnesses the blockage.
    """
    if require_positive and not t.is_positive:
        raise NotPositive("level decomposition needs a positive marking set")
    g = t.base
    n = g.n
    if n == 0:
        return {}
    m = 2 * n
    has_marks = [bool(t.markings[e]) for e in range(m)]
    alive = [True] * m
    levels: dict[int, int] = {}
    remaining = set(g.arrow_map)
    level = 0
    while remaining:
        level += 1
        alive_pos = [i for i in range(m) if alive[i]]
        anchored: dict[int, bool] = {}
        for idx, p in enumerate(alive_pos):
            e = alive_pos[idx - 1]  # previous alive token, cyclically
            found = False
            while e != p:
                if has_marks[e]:
                    found = True
                    break
                e = (e + 1) % m
            anchored[p] = found
        peeled = [
            k for k in sorted(remaining)
            if anchored[g.positions[k][0]] and anchored[g.positions[k][1]]
        ]
        if not peeled:
            raise NoLevels(_stuck_certificate(g, alive_pos, anchored))
        for k in peeled:
            levels[k] = level
            remaining.discard(k)
            h, tl = g.positions[k]
            alive[h] = alive[tl] = False
    return levels


def _stuck_certificate(
    g: DecoratedGaussDiagram, alive_pos: list[int], anchored: dict[int, bool]
) -> DiagramLoop:
    """A class-0 loop avoiding every marking, built from the blocked round.

    From each anchored token, jump its arrow and walk backward to the
    previous anchored token; iterating this map must cycle, and reversing
    the cycle yields an orientation-respecting loop that only ever crosses
    markless stretches of the circle.
    """
    m = 2 * g.n
    idx_of = {p: i for i, p in enumerate(alive_pos)}

    def other_end(p: int) -> int:
        h, tl = g.positions[g.tokens[p].arrow]
        return tl if p == h else h

    def back_to_anchor(p: int) -> int:
        # p is never anchored here: its arrow would have peeled otherwise
        while not anchored[p]:
            p = alive_pos[idx_of[p] - 1]
        return p

    start = next(p for p in alive_pos if anchored[p])
    seen: dict[int, int] = {}
    chain: list[int] = []
    a = start
    while a not in seen:
        seen[a] = len(chain)
        chain.append(a)
        a = back_to_anchor(other_end(a))
    cyc = chain[seen[a]:]
    steps: list[CircleForward | ArrowJump] = []
    c = len(cyc)
    for i in range(c - 1, -1, -1):
        here, target = cyc[(i + 1) % c], other_end(cyc[i])
        e = here
        while e != target:
            steps.append(CircleForward(e))
            e = (e + 1) % m
        tok = g.tokens[cyc[i]]
        steps.append(ArrowJump(tok.arrow, "head" if tok.kind == "H" else "tail"))
    return DiagramLoop(tuple(steps))

"""Rebuilding honest annular pictures from decorated data.

A decorated Gauss diagram whose decorations are not all zero can sometimes be
drawn as a real (virtual-free) knot diagram in the annulus.  The route taken
here: pick the cheapest refinement, cut the knot at its markings, turn each
group of arcs that share crossings into a tangle piece with an explicit
rotation system, then line the pieces up so the cut points meet the section
in matching columns.  Every obstruction along the way (a piece that does not
draw flat, ends spread over several faces, columns that refuse to pair up,
a glued surface that is not an annulus) raises :class:`NotRealRealizable`
with the reason, rather than silently producing a wrong picture.

Darts are triples ``(arc, segment, side)``; side 1 sits at the segment's end
in knot order.  Vertices are crossings ``("x", id)`` and loose ends
``("end", arc, side)`` until the gluing step merges mated ends.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagrams import (
    DecoratedGaussDiagram,
    TDiagram,
    Token,
    canonical_serialize,
    is_full,
    validate,
)
from .errors import InvalidDiagram, NotFull, NotRealRealizable
from .refine import minimal_refinement
from .slices import (
    Cap,
    Cup,
    RealCross,
    SliceWord,
    VirtualCross,
    _require_valid,
    _traverse,
    direction_levels,
    extract_tdiagram,
)

Dart = tuple[int, int, int]


def _alpha(d: Dart) -> Dart:
    return (d[0], d[1], 1 - d[2])


class _Web:
    """A refinement cut open at its markings: arcs of the knot between
    consecutive markings, each a chain of segments through its crossings."""

    def __init__(self, t: TDiagram):
        base = t.base
        k = t.marking_count
        if k == 0:
            raise NotRealRealizable("nothing to cut: the refinement has no markings")
        marks = t.markings_in_order()
        self.t = t
        self.base = base
        self.k = k
        self.signs = [s for _, _, s in marks]

        events: list[tuple[str, int]] = []
        for e in range(base.edge_count):
            if base.n:
                events.append(("tok", e))
            for j, (edge, _, _) in enumerate(marks):
                if edge == e:
                    events.append(("mark", j))
        first = events.index(("mark", 0))
        rotated = events[first:] + events[:first]
        arcs: list[list[int]] = []
        cur: list[int] | None = None
        for kind, v in rotated:
            if kind == "mark":
                if cur is not None:
                    arcs.append(cur)
                cur = []
            else:
                assert cur is not None
                cur.append(v)
        arcs.append(cur if cur is not None else [])
        assert len(arcs) == k
        self.arcs = arcs
        self.segs = [len(a) + 1 for a in arcs]

        self.at: dict[int, tuple[int, int]] = {}
        for a, toks in enumerate(arcs):
            for i, p in enumerate(toks):
                self.at[p] = (a, i)

        vertex_of: dict[Dart, tuple] = {}
        rotation: dict[tuple, tuple[Dart, ...]] = {}
        for a in range(k):
            vertex_of[(a, 0, 0)] = ("end", a, 0)
            vertex_of[(a, self.segs[a] - 1, 1)] = ("end", a, 1)
            rotation[("end", a, 0)] = ((a, 0, 0),)
            rotation[("end", a, 1)] = ((a, self.segs[a] - 1, 1),)
        self.over: set[Dart] = set()
        for arrow in base.arrows:
            h, tl = base.positions[arrow.id]
            ah, ih = self.at[h]
            at_, it_ = self.at[tl]
            oi, oo = (ah, ih, 1), (ah, ih + 1, 0)
            ui, uo = (at_, it_, 1), (at_, it_ + 1, 0)
            v = ("x", arrow.id)
            for d in (oi, oo, ui, uo):
                vertex_of[d] = v
            # counterclockwise around the crossing, over strand entering first
            rotation[v] = (oi, ui, oo, uo) if arrow.sign == 1 else (oi, uo, oo, ui)
            self.over.update((oi, oo))
        self.vertex_of = vertex_of
        self.rotation = rotation
        succ: dict[Dart, Dart] = {}
        for ring in rotation.values():
            for i, d in enumerate(ring):
                succ[d] = ring[(i + 1) % len(ring)]
        self.succ = succ

    def end_marking(self, a: int, side: int) -> int:
        return a if side == 0 else (a + 1) % self.k

    def end_is_bottom(self, a: int, side: int) -> bool:
        s = self.signs[self.end_marking(a, side)]
        return s == 1 if side == 0 else s == -1

    def end_mate(self, a: int, side: int) -> tuple[int, int]:
        """The other loose end cut at the same marking."""
        if side == 0:
            return ((a - 1) % self.k, 1)
        return ((a + 1) % self.k, 0)

    def end_dart(self, a: int, side: int) -> Dart:
        return (a, 0, 0) if side == 0 else (a, self.segs[a] - 1, 1)


def _faces(rotation: dict) -> list[tuple[Dart, ...]]:
    """Orbits of dart -> rotation successor of its reverse, sorted by least dart."""
    succ: dict[Dart, Dart] = {}
    for ring in rotation.values():
        for i, d in enumerate(ring):
            succ[d] = ring[(i + 1) % len(ring)]
    seen: set[Dart] = set()
    faces = []
    for d0 in sorted(succ):
        if d0 in seen:
            continue
        face = []
        d = d0
        while d not in seen:
            seen.add(d)
            face.append(d)
            d = succ[_alpha(d)]
        faces.append(tuple(face))
    return faces


def _components(web: _Web) -> list[list[int]]:
    parent = list(range(web.k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for arrow in web.base.arrows:
        h, tl = web.base.positions[arrow.id]
        ra, rb = find(web.at[h][0]), find(web.at[tl][0])
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for a in range(web.k):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values(), key=min)


def _component_ends(web: _Web, arcs: list[int]):
    """(bottoms, tops) of one piece, left to right, or the reason it fails."""
    arcset = set(arcs)
    rotation = {v: ring for v, ring in web.rotation.items() if ring[0][0] in arcset}
    faces = _faces(rotation)
    vcount = len(rotation)
    ecount = sum(web.segs[a] for a in arcs)
    if vcount - ecount + len(faces) != 2:
        raise NotRealRealizable("a tangle piece does not draw flat in the plane")
    where: dict[Dart, int] = {}
    for idx, face in enumerate(faces):
        for d in face:
            where[d] = idx
    outer_ids = {where[web.end_dart(a, s)] for a in arcs for s in (0, 1)}
    if len(outer_ids) != 1:
        raise NotRealRealizable("loose ends of a piece spread over several faces")
    outer = faces[outer_ids.pop()]
    seq = [
        (web.vertex_of[d][1], web.vertex_of[d][2])
        for d in outer
        if web.vertex_of[d][0] == "end"
    ]
    flags = [web.end_is_bottom(*e) for e in seq]
    if all(flags) or not any(flags):
        raise NotRealRealizable("a piece touches only one side of the section")
    switches = sum(1 for i in range(len(flags)) if flags[i] != flags[i - 1])
    if switches != 2:
        raise NotRealRealizable("bottom and top ends of a piece interleave")
    start = next(i for i in range(len(flags)) if flags[i] and not flags[i - 1])
    ordered = seq[start:] + seq[:start]
    nb = sum(flags)
    # walking the outer face lists bottoms left to right but tops right to left
    return ordered[:nb], list(reversed(ordered[nb:]))


def _order_components(web: _Web, comp_ends: list[tuple[list, list]]):
    """Left-to-right placement of the pieces, then the column pairing check."""
    owner: dict[tuple[int, int], int] = {}
    for i, (bots, tops) in enumerate(comp_ends):
        for e in bots:
            owner[e] = i
        for e in tops:
            owner[e] = i
    first = [
        i
        for i, (bots, tops) in enumerate(comp_ends)
        if web.end_mate(*bots[0]) == tops[0]
    ]
    if len(first) != 1:
        raise NotRealRealizable("no single piece can sit leftmost against the boundary")
    order = [first[0]]
    remaining = set(range(len(comp_ends))) - {first[0]}
    while remaining:
        nxt = None
        for which in (0, 1):  # placed bottoms first, then placed tops
            for i in order:
                for e in comp_ends[i][which]:
                    j = owner[web.end_mate(*e)]
                    if j in remaining:
                        nxt = j
                        break
                if nxt is not None:
                    break
            if nxt is not None:
                break
        if nxt is None:
            raise NotRealRealizable("the pieces do not chain up left to right")
        order.append(nxt)
        remaining.discard(nxt)
    bottoms = [e for i in order for e in comp_ends[i][0]]
    tops = [e for i in order for e in comp_ends[i][1]]
    assert len(bottoms) == web.k and len(tops) == web.k
    for b, tp in zip(bottoms, tops):
        if web.end_mate(*b) != tp:
            raise NotRealRealizable("cut points do not pair up column by column")
    return order, bottoms, tops


def _glued_face_check(web: _Web) -> None:
    """Merge mated ends and demand an annulus: crossings + 2 faces, and the
    multiset of face winding classes exactly {+1, -1, 0, ...}."""
    rotation = {v: ring for v, ring in web.rotation.items() if v[0] == "x"}
    for j in range(web.k):
        prev = (j - 1) % web.k
        before = (prev, web.segs[prev] - 1, 1)
        after = (j, 0, 0)
        rotation[("m", j)] = (before, after)
    faces = _faces(rotation)
    if len(faces) != web.base.n + 2:
        raise NotRealRealizable("the glued surface is not an annulus")
    owner = {d: v for v, ring in rotation.items() for d in ring}
    classes = []
    for face in faces:
        c = 0
        for d in face:
            x = _alpha(d)
            v = owner[x]
            if v[0] == "m":
                before, _ = rotation[v]
                c += web.signs[v[1]] if x == before else -web.signs[v[1]]
        classes.append(c)
    if sorted(classes) != sorted([1, -1] + [0] * web.base.n):
        raise NotRealRealizable("the glued faces wind wrongly around the annulus")


def _dart_label(d: Dart) -> str:
    return f"a{d[0]}s{d[1]}.{d[2]}"


def _vertex_label(v: tuple) -> str:
    return f"x{v[1]}" if v[0] == "x" else f"end{v[1]}.{v[2]}"


@dataclass(frozen=True)
class ComponentMap:
    """One tangle piece: its arcs and crossings, the rotation system that
    pins down the drawing, and its strand ends left to right on each side."""

    arcs: tuple[int, ...]
    crossings: tuple[int, ...]
    rotation: tuple[tuple[str, tuple[str, ...]], ...]
    bottoms: tuple[str, ...]
    tops: tuple[str, ...]


@dataclass(frozen=True)
class AnnularDiagram:
    """A real diagram of the annulus: tangle pieces in left-to-right order
    plus, per boundary column, the marking whose cut point sits there."""

    refinement: TDiagram
    components: tuple[ComponentMap, ...]
    column_markings: tuple[int, ...]


def _component_map(web: _Web, arcs: list[int], ends) -> ComponentMap:
    bottoms, tops = ends
    arcset = set(arcs)
    crossings = sorted(
        a.id for a in web.base.arrows if web.at[web.base.positions[a.id][0]][0] in arcset
    )
    rows = []
    for v, ring in web.rotation.items():
        if ring[0][0] not in arcset:
            continue
        key = (1, v[1], 0) if v[0] == "x" else (0, v[1], v[2])
        rows.append((key, (_vertex_label(v), tuple(_dart_label(d) for d in ring))))
    rows.sort()
    return ComponentMap(
        arcs=tuple(arcs),
        crossings=tuple(crossings),
        rotation=tuple(r for _, r in rows),
        bottoms=tuple(_vertex_label(("end", a, s)) for a, s in bottoms),
        tops=tuple(_vertex_label(("end", a, s)) for a, s in tops),
    )


def reconstruct(g: DecoratedGaussDiagram) -> AnnularDiagram:
    """The canonical real annular diagram of a full decorated Gauss diagram,
    built over its cheapest refinement; raises :class:`NotFull` or
    :class:`NotRealRealizable` when no such picture exists."""
    if not is_full(g):
        raise NotFull("only a diagram with nonzero decorations rebuilds to a real picture")
    t = minimal_refinement(g)
    web = _Web(t)
    comps = _components(web)
    comp_ends = [_component_ends(web, arcs) for arcs in comps]
    order, bottoms, _ = _order_components(web, comp_ends)
    _glued_face_check(web)
    return AnnularDiagram(
        refinement=t,
        components=tuple(_component_map(web, comps[i], comp_ends[i]) for i in order),
        column_markings=tuple(web.end_marking(*e) for e in bottoms),
    )


def annular_to_json(a: AnnularDiagram) -> dict:
    k = len(a.column_markings)
    signs = {arrow.id: arrow.sign for arrow in a.refinement.base.arrows}
    return {
        "refinement": canonical_serialize(a.refinement),
        "columns": [
            {"column": c + 1, "marking": m} for c, m in enumerate(a.column_markings)
        ],
        "mates": [
            {"marking": j, "ends": [f"end{(j - 1) % k}.1", f"end{j}.0"]}
            for j in range(k)
        ],
        "components": [
            {
                "arcs": list(comp.arcs),
                "crossings": list(comp.crossings),
                "signs": {str(i): signs[i] for i in comp.crossings},
                "rotation": {v: list(ring) for v, ring in comp.rotation},
                "bottoms": list(comp.bottoms),
                "tops": list(comp.tops),
            }
            for comp in a.components
        ],
    }


# -- drawing as a slice word --------------------------------------------------------


@dataclass
class _Wire:
    """A strand being drawn: the edge it is on, the dart at the vertex it is
    heading for, and the knot direction (+1 along the sweep)."""

    edge: tuple[int, int]
    target: Dart
    direction: int


def _push(web: _Web, exit_dart: Dart) -> _Wire:
    d = _alpha(exit_dart)
    return _Wire((exit_dart[0], exit_dart[1]), d, 1 if d[2] == 1 else -1)


def _top_end(web: _Web, j: int) -> tuple[int, int]:
    """The loose end that surfaces at the top of marking j's column."""
    if web.signs[j] == 1:
        return ((j - 1) % web.k, 1)
    return (j, 0)


def _targets_unplaced(web: _Web, w: _Wire, placed: set) -> bool:
    v = web.vertex_of[w.target]
    return v[0] == "x" and v not in placed


def _is_finished(web: _Web, w: _Wire) -> bool:
    v = web.vertex_of[w.target]
    return v[0] == "end" and not web.end_is_bottom(v[1], v[2])


def _close_cup(web, wires, slices, placed) -> bool:
    for i in range(len(wires) - 1):
        w1, w2 = wires[i], wires[i + 1]
        if w1.edge != w2.edge:
            continue
        if _targets_unplaced(web, w1, placed) or _targets_unplaced(web, w2, placed):
            continue  # a freshly capped pair has not met anything yet
        if _is_finished(web, w1) or _is_finished(web, w2):
            continue  # both halves already surfaced; nothing meets
        assert w1.direction == -w2.direction, "cup halves run the same way"
        slices.append(Cup(i + 1))
        del wires[i : i + 2]
        return True
    return False


def _draw_crossing(web, wires, slices, placed) -> bool:
    for i in range(len(wires) - 1):
        w1, w2 = wires[i], wires[i + 1]
        v = web.vertex_of[w1.target]
        if v[0] != "x" or v in placed or web.vertex_of[w2.target] != v:
            continue
        if web.succ[w1.target] != w2.target:
            continue
        da, db = w1.direction, w2.direction
        sign = da * db if w1.target in web.over else -da * db
        assert sign == web.base.arrow_map[v[1]].sign, "drawn sign disagrees"
        slices.append(RealCross(i + 1, sign))
        exit_r = web.succ[w2.target]
        exit_l = web.succ[exit_r]
        nl, nr = _push(web, exit_l), _push(web, exit_r)
        assert (nl.direction, nr.direction) == (db, da), "strand flow broke"
        wires[i : i + 2] = [nl, nr]
        placed.add(v)
        return True
    return False


def _birth_cap(web, wires, slices, placed) -> bool:
    for i, w in enumerate(wires):
        v = web.vertex_of[w.target]
        if v[0] != "x" or v in placed:
            continue
        q = web.succ[w.target]
        if any(x.edge == (q[0], q[1]) for x in wires):
            continue
        rd = 1 if q[2] == 1 else -1
        riser = _Wire((q[0], q[1]), q, rd)
        far = _Wire((q[0], q[1]), _alpha(q), -rd)
        slices.append(Cap(i + 2, rd))
        wires[i + 1 : i + 1] = [riser, far]
        return True
    return False


def _birth_hanging_arc(web, wires, slices, tops) -> bool:
    """An arc with no crossings and both ends on top only appears once the
    sweep reaches its height; nothing can nest inside it, so its two columns
    are adjacent."""
    if any(web.vertex_of[w.target][0] != "end" for w in wires):
        return False
    for arc in range(web.k):
        if web.arcs[arc] or any(w.edge[0] == arc for w in wires):
            continue
        if web.end_is_bottom(arc, 0) or web.end_is_bottom(arc, 1):
            continue
        c0, c1 = tops.index((arc, 0)), tops.index((arc, 1))
        assert abs(c0 - c1) == 1, "a hanging strand split at the top"
        current = [tops.index((web.vertex_of[w.target][1], web.vertex_of[w.target][2]))
                   for w in wires]
        insert = sum(1 for c in current if c < min(c0, c1))
        wl = _Wire((arc, 0), (arc, 0, 0), -1)
        wr = _Wire((arc, 0), (arc, 0, 1), 1)
        pair = [wl, wr] if c0 < c1 else [wr, wl]
        slices.append(Cap(insert + 1, pair[0].direction))
        wires[insert:insert] = pair
        return True
    return False


def to_sliceword(a: AnnularDiagram) -> SliceWord:
    """Draw the picture as stacked slices, sweeping bottom to top; the knot
    meets the glued boundary exactly at the chosen columns."""
    web = _Web(a.refinement)
    k = web.k
    tops = [_top_end(web, m) for m in a.column_markings]
    wires: list[_Wire] = []
    for m in a.column_markings:
        if web.signs[m] == 1:
            wires.append(_Wire((m, 0), (m, 0, 1), 1))
        else:
            prev = (m - 1) % k
            last = web.segs[prev] - 1
            wires.append(_Wire((prev, last), (prev, last, 0), -1))
    slices: list = []
    placed: set = set()
    for _ in range(4 * (sum(web.segs) + k) + 8):
        if not (
            _close_cup(web, wires, slices, placed)
            or _draw_crossing(web, wires, slices, placed)
            or _birth_cap(web, wires, slices, placed)
            or _birth_hanging_arc(web, wires, slices, tops)
        ):
            break
    else:
        raise AssertionError("the sweep did not settle")
    assert len(placed) == web.base.n, "the sweep missed crossings"
    assert len(wires) == k, "the sweep left stray strands"
    bottom = tuple(web.signs[m] for m in a.column_markings)
    for c, w in enumerate(wires):
        v = web.vertex_of[w.target]
        assert v[0] == "end" and (v[1], v[2]) == tops[c], "strands surfaced out of order"
        assert w.direction == bottom[c], "a strand crossed the boundary backwards"
    return SliceWord(bottom, tuple(slices))


def whitney_index(g: DecoratedGaussDiagram) -> int:
    """Rotation number of the rebuilt picture: every turning point is a cap
    or a cup, each worth half a turn with the sign of its left branch."""
    word = to_sliceword(reconstruct(g))
    levels = direction_levels(word)
    acc = 0
    for i, s in enumerate(word.slices):
        if isinstance(s, Cap):
            acc -= s.left_direction
        elif isinstance(s, Cup):
            acc -= levels[i][s.position - 1]
    assert acc % 2 == 0, "turning half-units must pair up"
    return acc // 2


# -- moving the section -------------------------------------------------------------


def _passage_table(word: SliceWord, base: DecoratedGaussDiagram):
    """Where the drawn knot pierces each horizontal line, keyed by
    (line, column): the diagram edge, the rank along that edge in knot
    order, and the strand direction."""
    _, _, trail = _traverse(word)
    ids: dict[int, int] = {}
    walk: list[Token] = []
    for ev in trail:
        if ev[0] == "cross":
            if ev[1] not in ids:
                ids[ev[1]] = len(ids) + 1
            walk.append(Token("H" if ev[2] else "T", ids[ev[1]]))
    m = len(walk)
    if m:
        stored = base.tokens
        shift = next(
            r for r in range(m) if stored == tuple(walk[r:] + walk[:r])
        )
    else:
        shift = 0
    raw: list[tuple[int, int, int, int]] = []
    pending: list[tuple[int, int, int]] = []
    seen = 0
    for ev in trail:
        if ev[0] == "cross":
            seen += 1
            continue
        _, l, c, d = ev
        if m == 0:
            raw.append((0, l, c, d))
        elif seen == 0:
            pending.append((l, c, d))
        else:
            raw.append((seen - 1, l, c, d))
    for l, c, d in pending:
        raw.append((m - 1, l, c, d))
    table: dict[tuple[int, int], tuple[int, int, int]] = {}
    counter: dict[int, int] = {}
    for we, l, c, d in raw:
        e = (we - shift) % m if m else 0
        r = counter.get(e, 0)
        counter[e] = r + 1
        table[(l, c)] = (e, r, d)
    return table


def _region_classes(word: SliceWord, levels) -> dict[tuple[int, int], tuple[int, int]]:
    """Union-find over the gaps (line, gap index) between strands; a gap is
    one connected piece of the cut-open annulus minus the knot."""
    lc = max(len(word.slices), 1)
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for l in range(lc):
        for j in range(len(levels[l]) + 1):
            find((l, j))
    for i, s in enumerate(word.slices):
        below = len(levels[i])
        up = (i + 1) % lc
        p = s.position
        if isinstance(s, (RealCross, VirtualCross)):
            for j in range(below + 1):
                if j != p:  # the crossing pinches the gap between its strands
                    union((i, j), (up, j))
        elif isinstance(s, Cap):
            for j in range(below + 1):
                union((i, j), (up, j if j < p else j + 2))
            union((i, p - 1), (up, p + 1))  # around the new tip; gap p is fresh
            find((up, p))
        else:
            for j in range(below + 1):
                if j < p:
                    union((i, j), (up, j))
                elif j >= p + 1:
                    union((i, j), (up, j - 2))
                # the gap between the dying strands stops here
    return {x: find(x) for x in list(parent)}


def find_section(word: SliceWord, t: TDiagram):
    """Move the section of a drawn full knot so it crosses the knot only at
    markings kept from ``t``: returns the surviving refinement and the
    crossing sequence (edge, index within the kept edge list, sign) read
    from the left boundary to the right one."""
    _require_valid(word)
    if any(isinstance(s, VirtualCross) for s in word.slices):
        raise InvalidDiagram("the drawing must be real: no virtual crossings")
    drawn = extract_tdiagram(word)
    if not is_full(drawn.base):
        raise NotFull("the drawn knot has zero decorations; no section separates it")
    report = validate(t)
    if not report.ok:
        raise InvalidDiagram("; ".join(report.problems))
    if canonical_serialize(t.base) != canonical_serialize(drawn.base):
        raise InvalidDiagram("the markings refine a different diagram")

    levels = direction_levels(word)
    table = _passage_table(word, drawn.base)
    region = _region_classes(word, levels)
    adj: dict[tuple[int, int], list] = {}
    for (l, c), (e, r, d) in sorted(table.items()):
        left, right = region[(l, c - 1)], region[(l, c)]
        if left == right:
            continue  # crossing it would revisit the region
        adj.setdefault(left, []).append(((l, c, 0), right, (e, r, d)))
        adj.setdefault(right, []).append(((l, c, 1), left, (e, r, -d)))
    for moves in adj.values():
        moves.sort()
    start = region[(0, 0)]
    goal = region[(0, len(levels[0]))]
    assert start != goal, "a full knot must separate the boundaries"

    def match(path):
        """Embed the path's crossings into t's markings, per edge, in knot
        order; None when some edge cannot absorb them."""
        by_edge: dict[int, list[tuple[int, int, int]]] = {}
        for idx, (e, r, s) in enumerate(path):
            by_edge.setdefault(e, []).append((r, s, idx))
        out = [None] * len(path)
        kept: dict[int, list[int]] = {}
        for e, runs in by_edge.items():
            runs.sort()
            marks = t.markings[e]
            slot = 0
            sel = []
            for _, s, _ in runs:
                while slot < len(marks) and marks[slot] != s:
                    slot += 1
                if slot == len(marks):
                    return None, None
                sel.append(slot)
                slot += 1
            kept[e] = sel
            for j, (_, s, idx) in enumerate(runs):
                out[idx] = (e, j, s)
        return kept, out

    regions = len(set(region.values()))
    for depth in range(1, regions):
        hit = _bounded_search(adj, start, goal, depth, match)
        if hit is not None:
            kept, seq = hit
            marks = tuple(
                tuple(t.markings[e][i] for i in kept.get(e, []))
                for e in range(t.base.edge_count)
            )
            return TDiagram(t.base, marks), tuple(seq)
    raise AssertionError("no transverse path found; the drawing should admit one")


def _bounded_search(adj, start, goal, depth, match):
    """First feasible simple path with exactly ``depth`` crossings, trying
    moves in a fixed lexicographic order."""

    path: list = []
    visited = {start}

    def go(at, left):
        if at == goal:
            if left == 0:
                kept, seq = match(path)
                if kept is not None:
                    return kept, seq
            return None
        if left == 0:
            return None
        for _, to, rec in adj.get(at, ()):
            if to in visited:
                continue
            visited.add(to)
            path.append(rec)
            found = go(to, left - 1)
            if found is not None:
                return found
            path.pop()
            visited.discard(to)
        return None

    return go(start, depth)


# -- SVG ----------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.1f}"


def render_svg(a: AnnularDiagram) -> str:
    """A fixed-layout picture of the rebuilt diagram: levels run left to
    right, the section is the dashed vertical line on either side, under
    strands are drawn broken."""
    word = to_sliceword(a)
    levels = direction_levels(word)
    lcount = max(len(word.slices), 1)
    unit = 36.0
    margin = 24.0
    cols = max(len(lv) for lv in levels)
    width = margin * 2 + lcount * unit
    height = margin * 2 + (cols + 1) * unit

    def x(l: float) -> float:
        return margin + l * unit

    def y(c: float) -> float:
        return margin + (cols + 1 - c) * unit

    body: list[str] = []

    def seg(x1, y1, x2, y2, broken=False):
        if not broken:
            return [
                f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}"/>'
            ]
        ax, ay = x1 + 0.38 * (x2 - x1), y1 + 0.38 * (y2 - y1)
        bx, by = x1 + 0.62 * (x2 - x1), y1 + 0.62 * (y2 - y1)
        return [
            f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(ax)} {_fmt(ay)}"/>',
            f'<path d="M {_fmt(bx)} {_fmt(by)} L {_fmt(x2)} {_fmt(y2)}"/>',
        ]

    if not word.slices:
        for c in range(1, len(word.bottom) + 1):
            body += seg(x(0), y(c), x(1), y(c))
    for i, s in enumerate(word.slices):
        below = len(levels[i])
        x1, x2 = x(i), x(i + 1)
        p = s.position
        if isinstance(s, RealCross):
            for c in range(1, below + 1):
                if c not in (p, p + 1):
                    body += seg(x1, y(c), x2, y(c))
            da, db = levels[i][p - 1], levels[i][p]
            rising_over = s.sign == da * db
            glyph = ['<g class="crossing">']
            glyph += seg(x1, y(p), x2, y(p + 1), broken=not rising_over)
            glyph += seg(x1, y(p + 1), x2, y(p), broken=rising_over)
            glyph.append("</g>")
            body += glyph
        elif isinstance(s, Cap):
            for c in range(1, below + 1):
                body += seg(x1, y(c), x2, y(c if c < p else c + 2))
            bend = x1 + 0.1 * unit
            body.append(
                f'<path d="M {_fmt(x2)} {_fmt(y(p))} C {_fmt(bend)} {_fmt(y(p))} '
                f'{_fmt(bend)} {_fmt(y(p + 1))} {_fmt(x2)} {_fmt(y(p + 1))}"/>'
            )
        else:
            for c in range(1, below + 1):
                if c < p:
                    body += seg(x1, y(c), x2, y(c))
                elif c > p + 1:
                    body += seg(x1, y(c), x2, y(c - 2))
            bend = x2 - 0.1 * unit
            body.append(
                f'<path d="M {_fmt(x1)} {_fmt(y(p))} C {_fmt(bend)} {_fmt(y(p))} '
                f'{_fmt(bend)} {_fmt(y(p + 1))} {_fmt(x1)} {_fmt(y(p + 1))}"/>'
            )
    top = margin * 0.5
    bot = height - margin * 0.5
    lines = [
        f'<line x1="{_fmt(x(0))}" y1="{_fmt(top)}" x2="{_fmt(x(0))}" '
        f'y2="{_fmt(bot)}" stroke-dasharray="6 4" class="section"/>',
        f'<line x1="{_fmt(x(lcount))}" y1="{_fmt(top)}" x2="{_fmt(x(lcount))}" '
        f'y2="{_fmt(bot)}" stroke-dasharray="6 4" class="section"/>',
    ]
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
            '<g fill="none" stroke="black" stroke-width="2">',
            *lines,
            *body,
            "</g>",
            "</svg>",
        ]
    )

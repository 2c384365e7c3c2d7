"""Slice words: annular knot diagrams read bottom to top, one event per level.

A slice word fixes strand directions on the bottom boundary circle and stacks
elementary levels above it: real or virtual crossings of adjacent strands,
births (cap) and deaths (cup) of adjacent strand pairs.  The top boundary is
glued back to the bottom, column to column.  Extraction walks the resulting
closed curve and reads off its T-diagram; representation builds a word
realizing any given T-diagram.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagrams import Arrow, DecoratedGaussDiagram, TDiagram, Token, assemble_tdiagram
from .errors import InvalidDiagram, ParseError


def _check_sign(value: int, what: str) -> None:
    if value not in (1, -1):
        raise InvalidDiagram(f"{what} must be +1 or -1, got {value!r}")


@dataclass(frozen=True)
class RealCross:
    """Crossing of the strands at columns (position, position + 1).

    The strand rising from the left column is over exactly when the sign
    equals the product of the two strand directions below the level.
    """

    position: int
    sign: int

    def __post_init__(self):
        _check_sign(self.sign, "crossing sign")
        if self.position < 1:
            raise InvalidDiagram(f"column {self.position} out of range")


@dataclass(frozen=True)
class VirtualCross:
    position: int

    def __post_init__(self):
        if self.position < 1:
            raise InvalidDiagram(f"column {self.position} out of range")


@dataclass(frozen=True)
class Cap:
    """Birth of two new adjacent strands at (position, position + 1); the left
    one carries left_direction, the right one its opposite."""

    position: int
    left_direction: int

    def __post_init__(self):
        _check_sign(self.left_direction, "cap direction")
        if self.position < 1:
            raise InvalidDiagram(f"column {self.position} out of range")


@dataclass(frozen=True)
class Cup:
    """Death of the two adjacent strands at (position, position + 1), which
    must run in opposite directions."""

    position: int

    def __post_init__(self):
        if self.position < 1:
            raise InvalidDiagram(f"column {self.position} out of range")


Slice = RealCross | VirtualCross | Cap | Cup


@dataclass(frozen=True)
class SliceWord:
    bottom: tuple[int, ...]
    slices: tuple[Slice, ...]

    def __post_init__(self):
        for d in self.bottom:
            _check_sign(d, "bottom direction")
        for s in self.slices:
            if not isinstance(s, (RealCross, VirtualCross, Cap, Cup)):
                raise InvalidDiagram(f"not a slice: {s!r}")


@dataclass(frozen=True)
class SliceReport:
    ok: bool
    problems: tuple[str, ...]

    def to_json(self) -> dict:
        return {"ok": self.ok, "problems": list(self.problems)}


def _apply_slice(dirs: list[int], s: Slice) -> str | None:
    """Update the direction tuple through one level; a string is a problem."""
    p = s.position
    if isinstance(s, (RealCross, VirtualCross)):
        if p + 1 > len(dirs):
            return f"column {p} needs two strands, only {len(dirs)} present"
        dirs[p - 1], dirs[p] = dirs[p], dirs[p - 1]
        return None
    if isinstance(s, Cap):
        if p > len(dirs) + 1:
            return f"cap at column {p} beyond the {len(dirs)} strands"
        dirs[p - 1:p - 1] = [s.left_direction, -s.left_direction]
        return None
    if p + 1 > len(dirs):
        return f"column {p} needs two strands, only {len(dirs)} present"
    if dirs[p - 1] != -dirs[p]:
        return f"cup at column {p} joins strands running the same way"
    del dirs[p - 1:p + 1]
    return None


def direction_levels(word: SliceWord) -> list[tuple[int, ...]]:
    """Strand directions at every gap, bottom boundary first; raises on
    illegal levels."""
    dirs = list(word.bottom)
    out = [tuple(dirs)]
    for i, s in enumerate(word.slices):
        problem = _apply_slice(dirs, s)
        if problem is not None:
            raise InvalidDiagram(f"level {i + 1}: {problem}")
        out.append(tuple(dirs))
    return out


def validate_sliceword(word: SliceWord) -> SliceReport:
    problems: list[str] = []
    dirs = list(word.bottom)
    levels = [tuple(dirs)]
    for i, s in enumerate(word.slices):
        problem = _apply_slice(dirs, s)
        if problem is not None:
            problems.append(f"level {i + 1}: {problem}")
            return SliceReport(False, tuple(problems))
        levels.append(tuple(dirs))
    if tuple(dirs) != word.bottom:
        problems.append(
            f"top boundary {_dir_text(tuple(dirs))!r} does not close up with "
            f"bottom {_dir_text(word.bottom)!r}"
        )
        return SliceReport(False, tuple(problems))

    # component count of the closed-up curve
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for g in range(len(levels)):
        for c in range(1, len(levels[g]) + 1):
            parent.setdefault((g, c), (g, c))
    for i, s in enumerate(word.slices):
        below, above = i, i + 1
        p = s.position
        width = len(levels[below])
        if isinstance(s, (RealCross, VirtualCross)):
            for c in range(1, width + 1):
                target = p + 1 if c == p else p if c == p + 1 else c
                union((below, c), (above, target))
        elif isinstance(s, Cap):
            union((above, p), (above, p + 1))
            for c in range(1, width + 1):
                union((below, c), (above, c if c < p else c + 2))
        else:
            union((below, p), (below, p + 1))
            for c in range(1, width + 1):
                if c in (p, p + 1):
                    continue
                union((below, c), (above, c if c < p else c - 2))
    top = len(word.slices)
    for c in range(1, len(word.bottom) + 1):
        union((top, c), (0, c))
    roots = {find(x) for x in parent}
    if len(roots) != 1:
        problems.append(
            "the word draws nothing" if not roots else f"{len(roots)} closed curves, need exactly one"
        )
    return SliceReport(not problems, tuple(problems))


# -- text format -----------------------------------------------------------------


_SIGN_TEXT = {1: "+", -1: "-"}


def _dir_text(dirs: tuple[int, ...]) -> str:
    return " ".join(_SIGN_TEXT[d] for d in dirs)


def serialize_sliceword(word: SliceWord) -> str:
    lines = [("bottom " + _dir_text(word.bottom)).rstrip()]
    for s in word.slices:
        if isinstance(s, RealCross):
            lines.append(f"cross {s.position} {_SIGN_TEXT[s.sign]}")
        elif isinstance(s, VirtualCross):
            lines.append(f"virtual {s.position}")
        elif isinstance(s, Cap):
            lines.append(f"cap {s.position} {_SIGN_TEXT[s.left_direction]}")
        else:
            lines.append(f"cup {s.position}")
    return "\n".join(lines) + "\n"


def _parse_sign(tok: str, lineno: int) -> int:
    if tok == "+":
        return 1
    if tok == "-":
        return -1
    raise ParseError(f"expected + or -, got {tok!r}", line=lineno)


def _parse_position(tok: str, lineno: int) -> int:
    try:
        p = int(tok)
    except ValueError:
        raise ParseError(f"expected a column number, got {tok!r}", line=lineno) from None
    if p < 1:
        raise ParseError(f"columns start at 1, got {p}", line=lineno)
    return p


def parse_sliceword(text: str) -> SliceWord:
    bottom: tuple[int, ...] | None = None
    slices: list[Slice] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind, args = fields[0], fields[1:]
        if kind == "bottom":
            if bottom is not None:
                raise ParseError("repeated bottom line", line=lineno)
            bottom = tuple(_parse_sign(tok, lineno) for tok in args)
            continue
        if bottom is None:
            raise ParseError("the bottom line must come first", line=lineno)
        if kind == "cross":
            if len(args) != 2:
                raise ParseError("cross takes a column and a sign", line=lineno)
            slices.append(RealCross(_parse_position(args[0], lineno), _parse_sign(args[1], lineno)))
        elif kind == "virtual":
            if len(args) != 1:
                raise ParseError("virtual takes a column", line=lineno)
            slices.append(VirtualCross(_parse_position(args[0], lineno)))
        elif kind == "cap":
            if len(args) != 2:
                raise ParseError("cap takes a column and a direction", line=lineno)
            slices.append(Cap(_parse_position(args[0], lineno), _parse_sign(args[1], lineno)))
        elif kind == "cup":
            if len(args) != 1:
                raise ParseError("cup takes a column", line=lineno)
            slices.append(Cup(_parse_position(args[0], lineno)))
        else:
            raise ParseError(f"unknown level {kind!r}", line=lineno)
    if bottom is None:
        raise ParseError("missing bottom line")
    return SliceWord(bottom, tuple(slices))


# -- extraction -------------------------------------------------------------------


def _traverse(word: SliceWord):
    """Walk the closed curve once; returns (events, levels, trail).

    Events are ("mark", sign) at boundary passages and
    ("cross", level_index, over) at real crossings, in curve order.  The walk
    starts at the bottom of column 1, or on the left branch of the first cap
    when the boundary is empty.  The trail interleaves ("cross", ...) entries
    with one ("line", line, column, direction) entry per passage through a
    horizontal boundary line, lines numbered 0..len(slices)-1 with the glued
    boundary as line 0.
    """
    levels = direction_levels(word)
    slices = word.slices
    m = len(slices)
    trail: list[tuple] = []

    def record(g: int, c: int, d: int) -> None:
        trail.append(("line", 0 if g == m else g, c, d))

    if word.bottom:
        if word.bottom[0] == 1:
            start = (0, 1, 1)
        else:
            start = (m, 1, -1)
        events: list[tuple] = [("mark", word.bottom[0])]
        record(*start)
    else:
        start = None
        for i, s in enumerate(slices):
            if isinstance(s, Cap):
                start = (i + 1, s.position, s.left_direction)
                break
        if start is None:
            raise InvalidDiagram("the word draws nothing")
        events = []
        record(*start)

    state = start
    limit = 4 * sum(len(lv) for lv in levels) + 4
    for _ in range(limit):
        g, c, d = state
        if d == 1:
            if g == m:
                nxt = (0, c, 1)
                if nxt == start:
                    return events, levels, trail
                events.append(("mark", 1))
                record(*nxt)
                state = nxt
                continue
            s = slices[g]
            p = s.position
            if isinstance(s, (RealCross, VirtualCross)):
                if c == p or c == p + 1:
                    if isinstance(s, RealCross):
                        da, db = levels[g][p - 1], levels[g][p]
                        rising_left_over = s.sign == da * db
                        over = rising_left_over if c == p else not rising_left_over
                        events.append(("cross", g, over))
                        trail.append(("cross", g, over))
                    nxt = (g + 1, p + 1 if c == p else p, 1)
                else:
                    nxt = (g + 1, c, 1)
            elif isinstance(s, Cap):
                nxt = (g + 1, c if c < p else c + 2, 1)
            else:
                if c == p or c == p + 1:
                    nxt = (g, p + 1 if c == p else p, -1)
                else:
                    nxt = (g + 1, c if c < p else c - 2, 1)
        else:
            if g == 0:
                nxt = (m, c, -1)
                if nxt == start:
                    return events, levels, trail
                events.append(("mark", -1))
                record(*nxt)
                state = nxt
                continue
            s = slices[g - 1]
            p = s.position
            if isinstance(s, (RealCross, VirtualCross)):
                if c == p or c == p + 1:
                    if isinstance(s, RealCross):
                        da, db = levels[g - 1][p - 1], levels[g - 1][p]
                        rising_left_over = s.sign == da * db
                        over = not rising_left_over if c == p else rising_left_over
                        events.append(("cross", g - 1, over))
                        trail.append(("cross", g - 1, over))
                    nxt = (g - 1, p + 1 if c == p else p, -1)
                else:
                    nxt = (g - 1, c, -1)
            elif isinstance(s, Cup):
                nxt = (g - 1, c if c < p else c + 2, -1)
            else:
                if c == p or c == p + 1:
                    nxt = (g, p + 1 if c == p else p, 1)
                else:
                    nxt = (g - 1, c if c < p else c - 2, -1)
        if nxt == start:
            return events, levels, trail
        # a state about to bounce off the glued boundary is the same passage
        # as its successor, so only the post-bounce state is recorded
        if not ((nxt[0] == m and nxt[2] == 1) or (nxt[0] == 0 and nxt[2] == -1)):
            record(*nxt)
        state = nxt
    raise InvalidDiagram("the walk never closes up; is the word valid?")


def _require_valid(word: SliceWord) -> None:
    report = validate_sliceword(word)
    if not report.ok:
        raise InvalidDiagram("; ".join(report.problems))


def extract_tdiagram(word: SliceWord) -> TDiagram:
    """The T-diagram of the closed-up curve: crossings become arrows (numbered
    by first visit, overpass first letter H), boundary passages become
    markings on the edges between them."""
    _require_valid(word)
    events, _, _ = _traverse(word)
    ids: dict[int, int] = {}
    tokens: list[Token] = []
    edge_marks: list[list[int]] = []
    leading: list[int] = []
    for ev in events:
        if ev[0] == "mark":
            (edge_marks[-1] if tokens else leading).append(ev[1])
            continue
        _, level, over = ev
        if level not in ids:
            ids[level] = len(ids) + 1
        tokens.append(Token("H" if over else "T", ids[level]))
        edge_marks.append([])
    if tokens:
        edge_marks[-1].extend(leading)
    else:
        edge_marks = [leading]
    w = sum(s for row in edge_marks for s in row)
    positions: dict[int, list[int]] = {}
    for pos, tok in enumerate(tokens):
        positions.setdefault(tok.arrow, []).append(pos)
    arrows = []
    npos = len(tokens)
    for level, k in sorted(ids.items(), key=lambda kv: kv[1]):
        first, second = positions[k]
        h = first if tokens[first].kind == "H" else second
        t = second if h == first else first
        val = 0
        e = h
        while True:
            val += sum(edge_marks[e])
            e = (e + 1) % npos
            if e == t:
                break
        arrows.append(Arrow(k, word.slices[level].sign, val))
    return assemble_tdiagram(
        tuple(tokens), tuple(arrows), w, tuple(tuple(row) for row in edge_marks)
    )


def crossing_records(word: SliceWord) -> tuple[tuple[int, int, int, int], ...]:
    """(level, column, sign, arrow id) per real crossing, in word order; the
    arrow ids match :func:`extract_tdiagram`."""
    _require_valid(word)
    events, _, _ = _traverse(word)
    ids: dict[int, int] = {}
    for ev in events:
        if ev[0] == "cross" and ev[1] not in ids:
            ids[ev[1]] = len(ids) + 1
    return tuple(
        (i + 1, s.position, s.sign, ids[i])
        for i, s in enumerate(word.slices)
        if isinstance(s, RealCross)
    )


# -- representation ----------------------------------------------------------------


class _Strand:
    __slots__ = ("direction",)

    def __init__(self, direction: int):
        self.direction = direction


def represent_tdiagram(t: TDiagram) -> SliceWord:
    """A slice word whose extraction gives back the T-diagram.

    One moving pen strand traces the curve event by event.  Boundary passages
    are parked lane strands, ordered along the curve from its first upward
    passage.  Each crossing is built in full at its first visit: a cap births
    a short transversal, the pen crosses it, and both loose ends park until
    the second visit cups them back onto the curve.  Parking and retrieval
    move strands with virtual crossings only.
    """
    base = t.base
    events: list[tuple] = []
    if base.n:
        for i in range(2 * base.n):
            events.append(("token", i))
            events.extend(("mark", s) for s in t.markings[i])
    else:
        events = [("mark", s) for s in t.markings[0]]

    mark_positions = [i for i, ev in enumerate(events) if ev[0] == "mark"]
    start_idx = next(
        (i for i in mark_positions if events[i][1] == 1),
        mark_positions[0] if mark_positions else None,
    )
    if start_idx is not None:
        events = events[start_idx:] + events[:start_idx]
    lane_signs = [ev[1] for ev in events if ev[0] == "mark"]
    k = len(lane_signs)

    letters: list[Slice] = []
    frontier: list[_Strand] = []
    port_bottom = [_Strand(s) for s in lane_signs]
    frontier.extend(port_bottom)
    top_lane: dict[_Strand, int] = {}

    def slide_and_cup(pen: _Strand, target: _Strand) -> int:
        """Bring the pen next to the target, cup them away, return the gap index."""
        i = frontier.index(pen)
        j = frontier.index(target)
        while j - i > 1:
            letters.append(VirtualCross(i + 1))
            frontier[i], frontier[i + 1] = frontier[i + 1], frontier[i]
            i += 1
        while i - j > 1:
            letters.append(VirtualCross(i))
            frontier[i - 1], frontier[i] = frontier[i], frontier[i - 1]
            i -= 1
        left = min(i, j)
        letters.append(Cup(left + 1))
        del frontier[left:left + 2]
        return left

    if start_idx is None:
        returner = _Strand(-1)
        pen = _Strand(1)
        letters.append(Cap(1, -1))
        frontier[0:0] = [returner, pen]
    elif lane_signs[0] == 1:
        pen = port_bottom[0]
    else:
        parked = _Strand(-1)
        top_lane[parked] = 1
        pen = _Strand(1)
        letters.append(Cap(1, -1))
        frontier[0:0] = [parked, pen]

    stub_down: dict[int, _Strand] = {}
    stub_up: dict[int, _Strand] = {}
    next_lane = 2
    for ev in events[1:] if start_idx is not None else events:
        if ev[0] == "token":
            tok = base.tokens[ev[1]]
            arrow = base.arrow_map[tok.arrow]
            if tok.arrow not in stub_down:
                db = arrow.sign if tok.kind == "H" else -arrow.sign
                left = _Strand(db)
                right = _Strand(-db)
                i = frontier.index(pen)
                letters.append(Cap(i + 2, db))
                frontier[i + 1:i + 1] = [left, right]
                letters.append(RealCross(i + 1, arrow.sign))
                frontier[i], frontier[i + 1] = frontier[i + 1], frontier[i]
                stub_down[tok.arrow] = left if db == -1 else right
                stub_up[tok.arrow] = right if db == -1 else left
            else:
                slide_and_cup(pen, stub_down.pop(tok.arrow))
                pen = stub_up.pop(tok.arrow)
        else:
            lane = next_lane
            next_lane += 1
            if ev[1] == 1:
                top_lane[pen] = lane
                pen = port_bottom[lane - 1]
            else:
                at = slide_and_cup(pen, port_bottom[lane - 1])
                parked = _Strand(-1)
                top_lane[parked] = lane
                pen = _Strand(1)
                letters.append(Cap(at + 1, -1))
                frontier[at:at] = [parked, pen]

    if start_idx is None:
        slide_and_cup(pen, returner)
    elif lane_signs[0] == 1:
        top_lane[pen] = 1
    else:
        slide_and_cup(pen, port_bottom[0])

    order = [top_lane[s] for s in frontier]
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(order) - 1):
            if order[i] > order[i + 1]:
                order[i], order[i + 1] = order[i + 1], order[i]
                letters.append(VirtualCross(i + 1))
                swapped = True
    assert order == sorted(order) == list(range(1, k + 1))
    return SliceWord(tuple(lane_signs), tuple(letters))


def represent_dgd(g: DecoratedGaussDiagram) -> SliceWord:
    """A slice word realizing the diagram, markings taken from the reference
    refinement."""
    from .refine import find_refinement

    return represent_tdiagram(find_refinement(g))

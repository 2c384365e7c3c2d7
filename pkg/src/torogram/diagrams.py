"""Decorated Gauss diagrams of knots in a solid torus.

A diagram is a cyclic word of arrow endpoints on an oriented circle, one
``H`` (overpass) and one ``T`` (underpass) token per arrow, plus a sign and
an integer valuation per arrow and one integer valuation for the circle.
A T-diagram adds an ordered list of signed markings to every edge (the arc
between two consecutive tokens).

Instances are stored in a canonical rotation chosen at construction, so
edge indices are reproducible across runs: edge ``i`` is the arc directly
after the ``i``-th stored token, and edge ``2n - 1`` wraps back to token 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import InvalidDiagram, ParseError


class Token(NamedTuple):
    kind: str  # "H" at the overpass end, "T" at the underpass end
    arrow: int


@dataclass(frozen=True)
class Arrow:
    id: int
    sign: int
    valuation: int

    def __post_init__(self) -> None:
        if self.id < 1:
            raise InvalidDiagram(f"arrow id must be >= 1, got {self.id}")
        if self.sign not in (1, -1):
            raise InvalidDiagram(f"arrow sign must be +1 or -1, got {self.sign}")


def _rotation_key(tokens: tuple[Token, ...], arrows: dict[int, Arrow], shift: int):
    """Comparison key of one rotation, insensitive to arrow relabeling."""
    m = len(tokens)
    relabel: dict[int, int] = {}
    codes = []
    for i in range(m):
        tok = tokens[(i + shift) % m]
        fresh = relabel.setdefault(tok.arrow, len(relabel) + 1)
        codes.append((0 if tok.kind == "H" else 1, fresh))
    by_first_seen = sorted(relabel, key=relabel.__getitem__)
    signs = tuple(arrows[a].sign for a in by_first_seen)
    vals = tuple(arrows[a].valuation for a in by_first_seen)
    return (tuple(codes), signs, vals)


def _canonical_shift(tokens: tuple[Token, ...], arrows: dict[int, Arrow]) -> int:
    if not tokens:
        return 0
    best = 0
    best_key = _rotation_key(tokens, arrows, 0)
    for r in range(1, len(tokens)):
        key = _rotation_key(tokens, arrows, r)
        if key < best_key:
            best, best_key = r, key
    return best


@dataclass(frozen=True)
class DecoratedGaussDiagram:
    """Arrow endpoints on the circle plus signs, valuations and the circle valuation."""

    tokens: tuple[Token, ...]
    arrows: tuple[Arrow, ...]
    circle_valuation: int

    def __post_init__(self) -> None:
        tokens = tuple(Token(k, a) for k, a in self.tokens)
        arrows = tuple(sorted(self.arrows, key=lambda a: a.id))
        ids = [a.id for a in arrows]
        n = len(arrows)
        if ids != list(range(1, n + 1)):
            raise InvalidDiagram(f"arrow ids must be exactly 1..{n}, got {ids}")
        seen: dict[tuple[str, int], int] = {}
        for tok in tokens:
            if tok.kind not in ("H", "T"):
                raise InvalidDiagram(f"unknown token kind {tok.kind!r}")
            if tok.arrow not in {a.id for a in arrows}:
                raise InvalidDiagram(f"token for undeclared arrow {tok.arrow}")
            if tok in seen:
                raise InvalidDiagram(f"duplicate token {tok.kind}{tok.arrow}")
            seen[tok] = 1
        if len(tokens) != 2 * n:
            raise InvalidDiagram(
                f"expected {2 * n} tokens for {n} arrows, got {len(tokens)}"
            )
        shift = _canonical_shift(tokens, {a.id: a for a in arrows})
        tokens = tokens[shift:] + tokens[:shift]
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "arrows", arrows)

    @property
    def n(self) -> int:
        return len(self.arrows)

    @property
    def edge_count(self) -> int:
        return 2 * self.n if self.n else 1

    @cached_property
    def arrow_map(self) -> dict[int, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def positions(self) -> dict[int, tuple[int, int]]:
        """arrow id -> (position of H token, position of T token)."""
        heads: dict[int, int] = {}
        tails: dict[int, int] = {}
        for i, tok in enumerate(self.tokens):
            (heads if tok.kind == "H" else tails)[tok.arrow] = i
        return {a.id: (heads[a.id], tails[a.id]) for a in self.arrows}

    @cached_property
    def _minimal_shifts(self) -> tuple[int, ...]:
        """All rotations of the stored word tying for the canonical key."""
        if not self.tokens:
            return (0,)
        keys = [_rotation_key(self.tokens, self.arrow_map, r) for r in range(len(self.tokens))]
        best = min(keys)
        return tuple(r for r, k in enumerate(keys) if k == best)

    @cached_property
    def reference_counts(self) -> tuple[int, ...]:
        """One integer solution of the marking-count equations, per edge.

        Built from prefix sums pinned at the basepoint: each arrow ties the
        prefix values at its two endpoints together, and pairs not containing
        position 0 get the smaller endpoint zeroed.  O(n), deterministic.
        """
        n = self.n
        w = self.circle_valuation
        if n == 0:
            return (w,)
        m = 2 * n
        prefix = [0] * (m + 1)
        prefix[m] = w
        for arrow in self.arrows:
            h, t = self.positions[arrow.id]
            # sum of counts over edges h..t-1 (cyclically) equals the valuation,
            # so prefix[t] - prefix[h] is the valuation (minus w when wrapping).
            # Anchoring the smaller endpoint at 0 keeps prefix[0] = 0 because every
            # position sits on exactly one arrow.
            delta = arrow.valuation if h < t else arrow.valuation - w
            if h < t:
                prefix[h] = 0
                prefix[t] = delta
            else:
                prefix[t] = 0
                prefix[h] = -delta
        counts = []
        for e in range(m):
            nxt = prefix[m] if e == m - 1 else prefix[e + 1]
            counts.append(nxt - prefix[e])
        return tuple(counts)

    def distinguished_loop(self, arrow_id: int) -> "DiagramLoop":
        """Head to tail along the circle, then back across the arrow."""
        if arrow_id not in self.arrow_map:
            raise InvalidDiagram(f"unknown arrow {arrow_id}")
        h, t = self.positions[arrow_id]
        m = 2 * self.n
        steps: list[CircleForward | ArrowJump] = []
        e = h
        while e != t:
            steps.append(CircleForward(e))
            e = (e + 1) % m
        steps.append(ArrowJump(arrow_id, "head"))
        return DiagramLoop(tuple(steps))

    def circle_loop(self) -> "DiagramLoop":
        steps = tuple(CircleForward(e) for e in range(self.edge_count))
        return DiagramLoop(steps)

    def __str__(self) -> str:
        return canonical_serialize(self)


@dataclass(frozen=True)
class TDiagram:
    """A decorated Gauss diagram with ordered signed markings on every edge."""

    base: DecoratedGaussDiagram
    markings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        marks = tuple(tuple(edge) for edge in self.markings)
        if len(marks) != self.base.edge_count:
            raise InvalidDiagram(
                f"expected marking lists for {self.base.edge_count} edges, got {len(marks)}"
            )
        for edge in marks:
            for s in edge:
                if s not in (1, -1):
                    raise InvalidDiagram(f"marking sign must be +1 or -1, got {s}")
        object.__setattr__(self, "markings", marks)

    @property
    def marking_count(self) -> int:
        return sum(len(edge) for edge in self.markings)

    @property
    def is_nonnegative(self) -> bool:
        return all(s == 1 for edge in self.markings for s in edge)

    @property
    def is_positive(self) -> bool:
        return self.is_nonnegative and self.marking_count >= 1

    def net_counts(self) -> tuple[int, ...]:
        return tuple(sum(edge) for edge in self.markings)

    def markings_in_order(self) -> list[tuple[int, int, int]]:
        """All markings as (edge, index within edge, sign), edge-major order."""
        out = []
        for e, edge in enumerate(self.markings):
            for i, s in enumerate(edge):
                out.append((e, i, s))
        return out

    def __str__(self) -> str:
        return canonical_serialize(self)


def forget_markings(t: TDiagram) -> DecoratedGaussDiagram:
    return t.base


def assemble_tdiagram(
    tokens: Iterable[tuple[str, int]],
    arrows: Iterable[Arrow],
    circle_valuation: int,
    markings: Iterable[Iterable[int]],
) -> TDiagram:
    """Build a T-diagram with markings indexed by the given token order.

    The base diagram stores a canonical rotation of ``tokens``, so marking
    lists supplied alongside an arbitrary rotation must be re-indexed to the
    stored edge order; this does that bookkeeping.
    """
    toks = tuple(Token(k, a) for k, a in tokens)
    g = DecoratedGaussDiagram(toks, tuple(arrows), circle_valuation)
    marks = [tuple(edge) for edge in markings]
    m = len(toks)
    if m == 0:
        return TDiagram(g, tuple(marks))
    if len(marks) != m:
        raise InvalidDiagram(f"expected {m} marking lists, got {len(marks)}")
    # tokens are pairwise distinct, so exactly one rotation matches
    shift = next(r for r in range(m) if g.tokens == toks[r:] + toks[:r])
    return TDiagram(g, tuple(marks[(e + shift) % m] for e in range(m)))


@dataclass(frozen=True)
class CircleForward:
    """Advance along the circle across one edge, in the circle orientation."""

    edge: int


@dataclass(frozen=True)
class ArrowJump:
    """Cross an arrow from one endpoint to the other; ``to`` names the landing end."""

    arrow: int
    to: str  # "head" or "tail"


@dataclass(frozen=True)
class DiagramLoop:
    steps: tuple[CircleForward | ArrowJump, ...]


def _loop_endpoints(
    g: DecoratedGaussDiagram, step: CircleForward | ArrowJump
) -> tuple[int, int]:
    """(start token position, end token position) of one step."""
    m = 2 * g.n
    if isinstance(step, CircleForward):
        if not 0 <= step.edge < g.edge_count:
            raise InvalidDiagram(f"loop step crosses unknown edge {step.edge}")
        if g.n == 0:
            return (0, 0)
        return (step.edge, (step.edge + 1) % m)
    if step.to not in ("head", "tail"):
        raise InvalidDiagram(f"arrow jump must land on 'head' or 'tail', got {step.to!r}")
    if step.arrow not in g.arrow_map:
        raise InvalidDiagram(f"loop step jumps unknown arrow {step.arrow}")
    h, t = g.positions[step.arrow]
    return (t, h) if step.to == "head" else (h, t)


def check_loop(g: DecoratedGaussDiagram, loop: DiagramLoop) -> None:
    """Raise unless the loop is a nonempty closed walk on the diagram."""
    if not loop.steps:
        raise InvalidDiagram("a loop needs at least one step")
    ends = [_loop_endpoints(g, s) for s in loop.steps]
    for i, (_, stop) in enumerate(ends):
        start_next = ends[(i + 1) % len(ends)][0]
        if stop != start_next:
            raise InvalidDiagram(
                f"loop step {i} ends at token {stop} but step {i + 1} starts at {start_next}"
            )


def is_reduced(g: DecoratedGaussDiagram, loop: DiagramLoop) -> bool:
    """No arrow jump immediately undone by the reverse jump."""
    steps = loop.steps
    for i, step in enumerate(steps):
        nxt = steps[(i + 1) % len(steps)]
        if (
            isinstance(step, ArrowJump)
            and isinstance(nxt, ArrowJump)
            and step.arrow == nxt.arrow
            and step.to != nxt.to
        ):
            return False
    return True


def loop_homology(g: DecoratedGaussDiagram, loop: DiagramLoop) -> int:
    """Homology class of the loop in the solid torus.

    Equals the number of markings the loop would cross in any valid
    refinement, so it is computed against one fixed integer solution.
    """
    check_loop(g, loop)
    counts = g.reference_counts
    return sum(counts[s.edge] for s in loop.steps if isinstance(s, CircleForward))


def is_full(g: DecoratedGaussDiagram) -> bool:
    """At least one valuation (arrow or circle) is nonzero."""
    return g.circle_valuation != 0 or any(a.valuation != 0 for a in g.arrows)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    arrow_violations: tuple[tuple[int, int, int], ...]  # (arrow id, expected, actual)
    circle_violation: tuple[int, int] | None  # (expected, actual)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "arrows": [
                {"arrow": a, "expected": e, "actual": x} for a, e, x in self.arrow_violations
            ],
            "circle": None
            if self.circle_violation is None
            else {"expected": self.circle_violation[0], "actual": self.circle_violation[1]},
        }


def validate(t: TDiagram) -> ValidationReport:
    """Check every arrow valuation and the circle valuation against the markings."""
    g = t.base
    counts = t.net_counts()
    m = 2 * g.n
    bad = []
    for arrow in g.arrows:
        h, tl = g.positions[arrow.id]
        total = 0
        e = h
        while e != tl:
            total += counts[e]
            e = (e + 1) % m
        if total != arrow.valuation:
            bad.append((arrow.id, arrow.valuation, total))
    circle_total = sum(counts)
    circle = None
    if circle_total != g.circle_valuation:
        circle = (g.circle_valuation, circle_total)
    return ValidationReport(not bad and circle is None, tuple(bad), circle)


# -- serialization ----------------------------------------------------------


def _serialize_lines(
    tokens: tuple[Token, ...],
    arrows: Iterable[Arrow],
    circle: int,
    markings: tuple[tuple[int, ...], ...] | None,
    shift: int,
) -> str:
    """Serialize one chosen rotation, relabeling arrows by first appearance."""
    m = len(tokens)
    relabel: dict[int, int] = {}
    for i in range(m):
        tok = tokens[(i + shift) % m]
        relabel.setdefault(tok.arrow, len(relabel) + 1)
    n = len(relabel)
    items: list[str] = []
    edge_count = m if m else 1
    for i in range(m):
        if markings is not None:
            wrap = (i - 1 + shift) % edge_count
            items.extend("M+" if s == 1 else "M-" for s in markings[wrap])
        tok = tokens[(i + shift) % m]
        items.append(f"{tok.kind}{relabel[tok.arrow]}")
    if m == 0 and markings is not None:
        items.extend("M+" if s == 1 else "M-" for s in markings[0])
    lines = [f"circle {circle}", f"arrows {n}", ("seq " + " ".join(items)).rstrip()]
    by_new = sorted(relabel, key=relabel.__getitem__)
    arrow_map = {a.id: a for a in arrows}
    for old in by_new:
        a = arrow_map[old]
        lines.append(
            f"arrow {relabel[old]} sign {'+' if a.sign == 1 else '-'} val {a.valuation}"
        )
    return "\n".join(lines) + "\n"


def canonical_serialize(d: DecoratedGaussDiagram | TDiagram) -> str:
    """Deterministic text form, identical for rotated or relabeled copies."""
    if isinstance(d, DecoratedGaussDiagram):
        return _serialize_lines(d.tokens, d.arrows, d.circle_valuation, None, 0)
    g = d.base
    if g.n == 0:
        marks = d.markings[0]
        if marks:
            rotations = [marks[r:] + marks[:r] for r in range(len(marks))]
            marks = min(rotations)
        return _serialize_lines(g.tokens, g.arrows, g.circle_valuation, (marks,), 0)
    edge_count = g.edge_count
    best_shift = None
    best_tuple = None
    for r in g._minimal_shifts:
        rotated = tuple(d.markings[(e + r) % edge_count] for e in range(edge_count))
        if best_tuple is None or rotated < best_tuple:
            best_tuple, best_shift = rotated, r
    return _serialize_lines(g.tokens, g.arrows, g.circle_valuation, d.markings, best_shift)


_TOKEN_KINDS = ("H", "T")


def parse_diagram(text: str) -> DecoratedGaussDiagram | TDiagram:
    """Parse the ``.gd`` format; returns a T-diagram iff markings appear.

    T-diagram consistency is not checked here; run :func:`validate` for that.
    """
    lines = text.splitlines()
    fields: dict[str, tuple[int, list[str]]] = {}
    arrow_lines: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        head = parts[0]
        if head == "arrow":
            arrow_lines.append((lineno, parts[1:]))
        elif head in ("circle", "arrows", "seq"):
            if head in fields:
                raise ParseError(f"duplicate '{head}' line", lineno)
            fields[head] = (lineno, parts[1:])
        else:
            raise ParseError(f"unexpected line starting with {head!r}", lineno)
    for need in ("circle", "arrows", "seq"):
        if need not in fields:
            raise ParseError(f"missing '{need}' line")

    def _int(value: str, lineno: int, what: str) -> int:
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"{what} must be an integer, got {value!r}", lineno) from None

    lineno, vals = fields["circle"]
    if len(vals) != 1:
        raise ParseError("'circle' takes exactly one integer", lineno)
    circle = _int(vals[0], lineno, "circle valuation")
    lineno, vals = fields["arrows"]
    if len(vals) != 1:
        raise ParseError("'arrows' takes exactly one integer", lineno)
    n = _int(vals[0], lineno, "arrow count")
    if n < 0:
        raise ParseError("arrow count must be >= 0", lineno)

    seq_line, seq_items = fields["seq"]
    tokens: list[Token] = []
    pending: list[int] = []
    leading: list[int] = []
    edge_marks: dict[int, list[int]] = {}
    any_marks = False
    raw_line = lines[seq_line - 1]
    cursor = 0
    for item in seq_items:
        col = raw_line.index(item, cursor) + 1
        cursor = col - 1 + len(item)
        if item == "M+" or item == "M-":
            any_marks = True
            pending.append(1 if item == "M+" else -1)
        elif item[:1] in _TOKEN_KINDS:
            arrow_id = _int(item[1:], seq_line, "arrow id") if item[1:] else None
            if arrow_id is None:
                raise ParseError(f"token {item!r} is missing its arrow id", seq_line, col)
            if not tokens:
                leading = pending
            else:
                edge_marks[len(tokens) - 1] = pending
            pending = []
            tokens.append(Token(item[:1], arrow_id))
        else:
            raise ParseError(f"unknown token {item!r}", seq_line, col)
    if len(tokens) != 2 * n:
        raise ParseError(
            f"'seq' lists {len(tokens)} endpoints but 'arrows {n}' needs {2 * n}", seq_line
        )
    if n == 0:
        edge_marks[0] = pending + leading
    else:
        edge_marks[2 * n - 1] = pending + leading

    counts: dict[tuple[str, int], int] = {}
    for tok in tokens:
        counts[tok] = counts.get(tok, 0) + 1
    for kind in _TOKEN_KINDS:
        for a in range(1, n + 1):
            c = counts.get((kind, a), 0)
            if c == 0:
                raise ParseError(f"missing endpoint {kind}{a}", seq_line)
            if c > 1:
                raise ParseError(f"duplicate endpoint {kind}{a}", seq_line)
    if len(counts) != 2 * n:
        extra = sorted(set(counts) - {(k, a) for k in _TOKEN_KINDS for a in range(1, n + 1)})
        k, a = extra[0]
        raise ParseError(f"endpoint {k}{a} is out of range for {n} arrows", seq_line)

    arrows: dict[int, Arrow] = {}
    for lineno, parts in arrow_lines:
        if len(parts) != 5 or parts[1] != "sign" or parts[3] != "val":
            raise ParseError("arrow line must read 'arrow <k> sign <+|-> val <int>'", lineno)
        aid = _int(parts[0], lineno, "arrow id")
        if parts[2] not in ("+", "-"):
            raise ParseError(f"arrow sign must be + or -, got {parts[2]!r}", lineno)
        if aid in arrows:
            raise ParseError(f"duplicate 'arrow {aid}' line", lineno)
        if not 1 <= aid <= n:
            raise ParseError(f"arrow id {aid} out of range 1..{n}", lineno)
        arrows[aid] = Arrow(aid, 1 if parts[2] == "+" else -1, _int(parts[4], lineno, "valuation"))
    if len(arrows) != n:
        missing = sorted(set(range(1, n + 1)) - set(arrows))
        raise ParseError(f"missing 'arrow {missing[0]}' line")

    tokens_t = tuple(tokens)
    arrow_t = tuple(arrows[a] for a in sorted(arrows))
    g = DecoratedGaussDiagram(tokens_t, arrow_t, circle)
    if not any_marks:
        return g
    shift = _canonical_shift(tokens_t, arrows)
    edge_count = g.edge_count
    marks = tuple(
        tuple(edge_marks.get((e + shift) % edge_count, ())) for e in range(edge_count)
    )
    return TDiagram(g, marks)


# -- loop JSON ---------------------------------------------------------------


def loop_to_json(loop: DiagramLoop) -> list[dict]:
    out = []
    for step in loop.steps:
        if isinstance(step, CircleForward):
            out.append({"step": "circle", "edge": step.edge})
        else:
            out.append({"step": "arrow", "arrow": step.arrow, "to": step.to})
    return out


def loop_from_json(data: list[dict]) -> DiagramLoop:
    steps: list[CircleForward | ArrowJump] = []
    for item in data:
        if item.get("step") == "circle":
            steps.append(CircleForward(int(item["edge"])))
        elif item.get("step") == "arrow":
            steps.append(ArrowJump(int(item["arrow"]), str(item["to"])))
        else:
            raise InvalidDiagram(f"unknown loop step {item!r}")
    return DiagramLoop(tuple(steps))

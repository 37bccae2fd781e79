"""Short scoring game trees: numbers and switch-like nodes.

A game is either a number (an empty position with settled score) or a node
with nonempty sets of Left and Right options.  Trees are hash-consed:
structurally equal games are the same object, so equality is identity and
caches key on the object.  All scores are exact rationals because cooling
(see :mod:`bipartite_influence.thermo`) moves them off the integers.

The universe of interest is Milnor's: every nonempty position has moves for
both players (true by construction here) and no position is zugzwang
(``ls >= rs`` everywhere), which :func:`audit_universe` checks.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import count
from typing import Iterable, Sequence

from .graphs import BLACK, WHITE, Position, apply_move, legal_moves, strip_isolated


class ExpansionLimitError(RuntimeError):
    pass


class Game:
    __slots__ = ("value", "left", "right", "uid", "_ls", "_rs")

    def __init__(self, value, left, right, uid):
        self.value = value  # Fraction for numbers, None for nodes
        self.left = left  # tuple[Game] sorted by uid, deduped
        self.right = right
        self.uid = uid
        self._ls = None
        self._rs = None

    @property
    def is_number(self) -> bool:
        return self.value is not None

    def __repr__(self) -> str:
        return f"Game({format_game(self)})"


_intern: dict[tuple, Game] = {}
_uid = count(1)


def number(value) -> Game:
    value = Fraction(value)
    key = ("n", value)
    g = _intern.get(key)
    if g is None:
        g = Game(value, (), (), next(_uid))
        _intern[key] = g
    return g


def node(left_options: Iterable[Game], right_options: Iterable[Game]) -> Game:
    left = _canonical_options(left_options)
    right = _canonical_options(right_options)
    if not left or not right:
        raise ValueError("a non-number game needs options for both players")
    key = ("o", tuple(g.uid for g in left), tuple(g.uid for g in right))
    g = _intern.get(key)
    if g is None:
        g = Game(None, left, right, next(_uid))
        _intern[key] = g
    return g


def _canonical_options(options: Iterable[Game]) -> tuple[Game, ...]:
    out: list[Game] = []
    seen = set()
    for g in options:
        if g.uid not in seen:
            seen.add(g.uid)
            out.append(g)
    out.sort(key=lambda g: g.uid)
    return tuple(out)


# ---------------------------------------------------------------------------
# scores


def ls(g: Game) -> Fraction:
    """Best score with Left moving first."""
    if g._ls is None:
        g._ls = g.value if g.is_number else max(rs(o) for o in g.left)
    return g._ls


def rs(g: Game) -> Fraction:
    """Best score with Right moving first."""
    if g._rs is None:
        g._rs = g.value if g.is_number else min(ls(o) for o in g.right)
    return g._rs


_length_cache: dict[int, int] = {}


def length(g: Game) -> int:
    """Number of moves in the longest line of play."""
    hit = _length_cache.get(g.uid)
    if hit is not None:
        return hit
    val = 0 if g.is_number else 1 + max(
        length(o) for o in g.left + g.right
    )
    _length_cache[g.uid] = val
    return val


# ---------------------------------------------------------------------------
# algebra


_negate_cache: dict[int, Game] = {}


def negate(g: Game) -> Game:
    hit = _negate_cache.get(g.uid)
    if hit is not None:
        return hit
    if g.is_number:
        out = number(-g.value)
    else:
        out = node([negate(o) for o in g.right], [negate(o) for o in g.left])
    _negate_cache[g.uid] = out
    _negate_cache[out.uid] = g
    return out


_add_cache: dict[tuple[int, int], Game] = {}


def add(g: Game, h: Game) -> Game:
    """Disjunctive sum.  Numbers shift every option of the other side."""
    if g.uid > h.uid:
        g, h = h, g
    key = (g.uid, h.uid)
    hit = _add_cache.get(key)
    if hit is not None:
        return hit
    if g.is_number and h.is_number:
        out = number(g.value + h.value)
    elif g.is_number:
        out = node((add(g, o) for o in h.left), (add(g, o) for o in h.right))
    elif h.is_number:
        out = node((add(o, h) for o in g.left), (add(o, h) for o in g.right))
    else:
        lefts = [add(o, h) for o in g.left] + [add(g, o) for o in h.left]
        rights = [add(o, h) for o in g.right] + [add(g, o) for o in h.right]
        out = node(lefts, rights)
    _add_cache[key] = out
    return out


def add_all(games: Sequence[Game]) -> Game:
    total = number(0)
    for g in games:
        total = add(total, g)
    return total


def repeated(g: Game, n: int) -> Game:
    if n < 1:
        raise ValueError("need at least one copy")
    return add_all([g] * n)


# ---------------------------------------------------------------------------
# universe audit, comparison, simplification


def audit_universe(g: Game) -> str | None:
    """Return a description of the first zugzwang subtree, or None.

    Games built by :func:`node` are dicotic by construction, so the audit
    reduces to checking ``ls >= rs`` on every subtree.
    """
    seen: set[int] = set()

    def visit(sub: Game) -> str | None:
        if sub.uid in seen:
            return None
        seen.add(sub.uid)
        if not sub.is_number:
            if ls(sub) < rs(sub):
                return (
                    f"zugzwang subtree {format_game(sub)}: "
                    f"Ls={ls(sub)} < Rs={rs(sub)}"
                )
            for o in sub.left + sub.right:
                bad = visit(o)
                if bad:
                    return bad
        return None

    return visit(g)


def equivalent(g: Game, h: Game, audit: bool = True) -> bool:
    """Whether the two games are interchangeable in any sum.

    Tests Ls = Rs = 0 on their difference, which characterizes equality in
    the zugzwang-free dicotic universe.  The universe audit can be waived
    when inputs are known good.
    """
    if audit:
        for side in (g, h):
            bad = audit_universe(side)
            if bad:
                raise ValueError(f"input outside the universe: {bad}")
    diff = add(g, negate(h))
    return ls(diff) == 0 and rs(diff) == 0


def dominates(g: Game, h: Game) -> bool:
    """Whether ``g >= h`` as games (Right cannot profit from the swap)."""
    return rs(add(g, negate(h))) >= 0


_simplify_cache: dict[int, Game] = {}


def simplify(g: Game) -> Game:
    """Remove dominated options bottom-up; the result is an equal game.

    A Left option is dropped when a sibling dominates it; a Right option is
    dropped when it dominates a sibling.  Ties keep one representative.
    """
    hit = _simplify_cache.get(g.uid)
    if hit is not None:
        return hit
    if g.is_number:
        out = g
    else:
        lefts = [simplify(o) for o in g.left]
        rights = [simplify(o) for o in g.right]
        out = node(_maximal(lefts), _minimal(rights))
    _simplify_cache[g.uid] = out
    _simplify_cache[out.uid] = out
    return out


def _maximal(options: list[Game]) -> list[Game]:
    kept: list[Game] = []
    for opt in options:
        if any(dominates(k, opt) for k in kept):
            continue
        kept = [k for k in kept if not dominates(opt, k)]
        kept.append(opt)
    return kept


def _minimal(options: list[Game]) -> list[Game]:
    kept: list[Game] = []
    for opt in options:
        if any(dominates(opt, k) for k in kept):
            continue
        kept = [k for k in kept if not dominates(k, opt)]
        kept.append(opt)
    return kept


# ---------------------------------------------------------------------------
# positions -> trees

DEFAULT_EXPANSION_LIMIT = 16

_tree_cache: dict[tuple[int, int], Game] = {}


def from_position(position: Position, limit: int = DEFAULT_EXPANSION_LIMIT) -> Game:
    """Expand a position into its full game tree.

    Every legal move becomes an option; leaves are the final net scores.
    Positions above ``limit`` alive vertices are rejected, since the tree
    grows too fast to be useful.
    """
    position = strip_isolated(position)
    if position.vertex_count > limit:
        raise ExpansionLimitError(
            f"position has {position.vertex_count} vertices, limit is {limit}"
        )
    return add(number(position.offset), _tree(position))


def _tree(position: Position) -> Game:
    """Offset-free game tree of the alive set."""
    key = (position.ground.uid, position.alive)
    hit = _tree_cache.get(key)
    if hit is not None:
        return hit
    if position.alive == 0:
        out = number(0)
    else:
        base = Position(position.ground, position.alive, 0)
        lefts = []
        for move in legal_moves(base, BLACK):
            succ = apply_move(base, move)
            lefts.append(add(number(succ.offset), _tree(succ)))
        rights = []
        for move in legal_moves(base, WHITE):
            succ = apply_move(base, move)
            rights.append(add(number(succ.offset), _tree(succ)))
        out = node(lefts, rights)
    _tree_cache[key] = out
    return out


def leaf_values(g: Game) -> set[Fraction]:
    """The set of final scores appearing in the tree."""
    seen: set[int] = set()
    out: set[Fraction] = set()

    def visit(sub: Game):
        if sub.uid in seen:
            return
        seen.add(sub.uid)
        if sub.is_number:
            out.add(sub.value)
        else:
            for o in sub.left + sub.right:
                visit(o)

    visit(g)
    return out


# ---------------------------------------------------------------------------
# notation


def format_game(g: Game) -> str:
    if g.is_number:
        return str(g.value)
    left = ",".join(format_game(o) for o in g.left)
    right = ",".join(format_game(o) for o in g.right)
    return f"<{left}|{right}>"


def parse_game(text: str) -> Game:
    """Parse the notation produced by :func:`format_game`."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse_g() -> Game:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise ValueError("unexpected end of game notation")
        if text[pos] == "<":
            pos += 1
            lefts = parse_options("|")
            pos += 1  # consume '|'
            rights = parse_options(">")
            pos += 1  # consume '>'
            return node(lefts, rights)
        return parse_number()

    def parse_options(stop: str) -> list[Game]:
        nonlocal pos
        out = [parse_g()]
        skip_ws()
        while pos < len(text) and text[pos] == ",":
            pos += 1
            out.append(parse_g())
            skip_ws()
        if pos >= len(text) or text[pos] != stop:
            raise ValueError(f"expected {stop!r} at position {pos}")
        return out

    def parse_number() -> Game:
        nonlocal pos
        start = pos
        if pos < len(text) and text[pos] in "+-":
            pos += 1
        while pos < len(text) and (text[pos].isdigit() or text[pos] == "/"):
            pos += 1
        if pos == start:
            raise ValueError(f"expected a number at position {start}")
        return number(Fraction(text[start:pos]))

    g = parse_g()
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input at position {pos}")
    return g

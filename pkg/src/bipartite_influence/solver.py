"""Exact game-value search for Bipartite Influence positions.

Left score Ls is the best final score (Left points minus Right points) when
Left moves first and both players play perfectly; Rs is the same with Right
moving first.  The solver runs a memoized minimax over sums of connected
components.  Transposition keys canonicalize path components, and exact
negative pairs of components cancel out of the sum before lookup, which is
score-preserving because every position here is dicotic and free of
zugzwang, so a game plus its negative is equivalent to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import (
    BLACK,
    WHITE,
    Position,
    RemovalSet,
    VertexColor,
    apply_move,
    canonical_key,
    components,
    legal_moves,
    segment_value,
    strip_isolated,
)

DEFAULT_NODE_BUDGET = 100_000_000


class SearchBudgetError(RuntimeError):
    """Raised when the solver exceeds its node budget."""

    def __init__(self, budget: int):
        super().__init__(f"search budget of {budget} node expansions exhausted")
        self.budget = budget


@dataclass(frozen=True)
class ScorePair:
    ls: int
    rs: int


class TranspositionTable:
    """Score store keyed by canonical component multisets.

    Entries are final once written; concurrent inserts of the same key are
    idempotent, so the table can be shared freely.
    """

    def __init__(self):
        self._data: dict[tuple, list] = {}
        self.hits = 0
        self.lookups = 0

    def entry(self, key: tuple) -> list:
        self.lookups += 1
        e = self._data.get(key)
        if e is None:
            e = [None, None]
            self._data[key] = e
        else:
            self.hits += 1
        return e

    def __len__(self) -> int:
        return len(self._data)


def prune_dominated(moves: list[RemovalSet]) -> list[RemovalSet]:
    """Drop moves whose removed set is contained in another move's set.

    All moves must belong to the same mover.  Playing the larger set is at
    least as good, since it only hands the opponent a position that is a
    gift of extra removals away.  Equal sets keep one representative.
    """
    if len(moves) <= 1:
        return list(moves)
    signs = {m.gain > 0 for m in moves}
    if len(signs) > 1:
        raise ValueError("prune_dominated expects moves of a single mover")
    kept: list[RemovalSet] = []
    for m in moves:
        drop = False
        for other in moves:
            if other is m:
                continue
            union = m.removed | other.removed
            if union == other.removed and m.removed != other.removed:
                drop = True  # strictly contained in another removal
                break
            if m.removed == other.removed and other.played < m.played:
                drop = True  # duplicate set; keep the lowest vertex id
                break
        if not drop:
            kept.append(m)
    return kept


def _negated_pair(a: Position, b: Position, cache: dict) -> bool:
    """True when component ``b`` is the negative of component ``a``."""
    sa, sb = segment_value(a), segment_value(b)
    if sa is not None or sb is not None:
        if sa is None or sb is None:
            return False
        if sa % 2 == 0:
            return sa == sb  # even paths are their own negatives
        return sa == -sb
    if a.vertex_count != b.vertex_count or a.vertex_count > 10:
        return False
    key = (canonical_key(a), canonical_key(b))
    hit = cache.get(key)
    if hit is None:
        hit = _color_swap_isomorphic(a, b)
        cache[key] = hit
    return hit


def _color_swap_isomorphic(a: Position, b: Position) -> bool:
    """Exhaustive matching of ``a`` onto ``b`` with colors exchanged."""
    ga, gb = a.ground, b.ground
    va = a.alive_vertices()
    vb = b.alive_vertices()
    if len(va) != len(vb):
        return False

    def profile(pos, v):
        g = pos.ground
        return (
            g.colors[v].value,
            (g.adj[v] & pos.alive).bit_count(),
        )

    from collections import Counter

    ca = Counter(profile(a, v) for v in va)
    cb = Counter((("B", d) if c == "W" else ("W", d)) for (c, d) in
                 (profile(b, v) for v in vb))
    if ca != cb:
        return False

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(va):
            return True
        u = va[i]
        for w in vb:
            if w in used:
                continue
            if ga.colors[u] is gb.colors[w]:
                continue
            if (ga.adj[u] & a.alive).bit_count() != (gb.adj[w] & b.alive).bit_count():
                continue
            ok = True
            for prev_u, prev_w in mapping.items():
                adj_a = bool(ga.adj[u] & (1 << prev_u))
                adj_b = bool(gb.adj[w] & (1 << prev_w))
                if adj_a != adj_b:
                    ok = False
                    break
            if ok:
                mapping[u] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[u]
                used.discard(w)
        return False

    return extend(0)


class Solver:
    """Memoized exact minimax over sums of components."""

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET, prune: bool = True):
        self.table = TranspositionTable()
        self.node_budget = node_budget
        self.prune = prune
        self.nodes = 0
        self._iso_cache: dict = {}

    # -- public API --------------------------------------------------------

    def scores(self, position: Position) -> ScorePair:
        return self.score_of_sum([position])

    def left_score(self, position: Position) -> int:
        return self.score_of_sum([position]).ls

    def right_score(self, position: Position) -> int:
        return self.score_of_sum([position]).rs

    def score_of_sum(self, parts: list[Position]) -> ScorePair:
        offset = 0
        comps: list[Position] = []
        for part in parts:
            part = strip_isolated(part)
            offset += part.offset
            comps.extend(components(part))
        comps = self._cancel(comps)
        return ScorePair(
            offset + self._score(tuple(comps), BLACK),
            offset + self._score(tuple(comps), WHITE),
        )

    # -- internals ---------------------------------------------------------

    def _cancel(self, comps: list[Position]) -> list[Position]:
        comps = sorted(comps, key=canonical_key)
        out: list[Position] = []
        for c in comps:
            for i, other in enumerate(out):
                if _negated_pair(other, c, self._iso_cache):
                    del out[i]
                    break
            else:
                out.append(c)
        return out

    def _score(self, comps: tuple[Position, ...], mover: VertexColor) -> int:
        """Offset-free score of a canceled, sorted component multiset."""
        if not comps:
            return 0
        key = tuple(canonical_key(c) for c in comps)
        slot = 0 if mover is BLACK else 1
        entry = self.table.entry(key)
        if entry[slot] is not None:
            return entry[slot]
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise SearchBudgetError(self.node_budget)
        best = None
        seen_keys = set()
        seen_succ = set()
        for idx, comp in enumerate(comps):
            ckey = canonical_key(comp)
            if ckey in seen_keys:
                continue  # identical component, symmetric moves
            seen_keys.add(ckey)
            rest = comps[:idx] + comps[idx + 1 :]
            moves = legal_moves(comp, mover)
            if self.prune:
                moves = prune_dominated(moves)
            moves.sort(key=lambda m: -m.removed.bit_count())
            for move in moves:
                succ = apply_move(comp, move)
                delta = succ.offset
                merged = self._cancel(list(rest) + components(succ))
                mkey = (delta, tuple(canonical_key(c) for c in merged))
                if mkey in seen_succ:
                    continue
                seen_succ.add(mkey)
                val = delta + self._score(tuple(merged), mover.opponent)
                if best is None:
                    best = val
                elif mover is BLACK:
                    best = max(best, val)
                else:
                    best = min(best, val)
        assert best is not None, "nonempty stripped position always has moves"
        entry[slot] = best
        return best


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class AuditReport:
    positions_checked: int
    dicotic_ok: bool
    nonzugzwang_ok: bool
    first_violation: str | None = None

    @property
    def clean(self) -> bool:
        return self.dicotic_ok and self.nonzugzwang_ok


def milnor_audit(position: Position, depth: int = 3, solver: Solver | None = None) -> AuditReport:
    """Check the universe conditions on every position reachable in
    ``depth`` moves: both players can move iff the position is nonempty
    (dicotic) and Ls >= Rs (no zugzwang)."""
    solver = solver or Solver()
    seen: set[tuple] = set()
    report = AuditReport(0, True, True)

    def visit(pos: Position, remaining: int) -> bool:
        key = (pos.ground.uid, pos.alive)
        if key in seen:
            return True
        seen.add(key)
        report.positions_checked += 1
        black_moves = legal_moves(pos, BLACK)
        white_moves = legal_moves(pos, WHITE)
        if bool(black_moves) != bool(white_moves):
            report.dicotic_ok = False
            report.first_violation = f"one-sided position at alive={pos.alive:#x}"
            return False
        pair = solver.scores(pos)
        if pair.ls < pair.rs:
            report.nonzugzwang_ok = False
            report.first_violation = (
                f"zugzwang at alive={pos.alive:#x}: Ls={pair.ls} < Rs={pair.rs}"
            )
            return False
        if remaining == 0:
            return True
        for move in black_moves + white_moves:
            if not visit(apply_move(pos, move), remaining - 1):
                return False
        return True

    visit(strip_isolated(position), depth)
    return report


@dataclass
class GiftReport:
    base: ScorePair
    without_white_gift: ScorePair
    without_black_gift: ScorePair
    white_gift_size: int
    black_gift_size: int
    ls_upper_ok: bool = field(init=False)
    rs_upper_ok: bool = field(init=False)
    ls_lower_ok: bool = field(init=False)
    rs_lower_ok: bool = field(init=False)

    def __post_init__(self):
        w, b = self.white_gift_size, self.black_gift_size
        self.ls_upper_ok = self.base.ls <= self.without_white_gift.ls + w
        self.rs_upper_ok = self.base.rs <= self.without_white_gift.rs + w
        self.ls_lower_ok = self.base.ls >= self.without_black_gift.ls - b
        self.rs_lower_ok = self.base.rs >= self.without_black_gift.rs - b

    @property
    def all_ok(self) -> bool:
        return (
            self.ls_upper_ok
            and self.rs_upper_ok
            and self.ls_lower_ok
            and self.rs_lower_ok
        )


def gift_bounds_check(
    position: Position,
    black_gift: int = 0,
    white_gift: int = 0,
    solver: Solver | None = None,
) -> GiftReport:
    """Deleting a set of White vertices costs Left at most its size, and
    symmetrically for Black.  ``black_gift`` / ``white_gift`` are bitmasks
    of alive vertices of the matching color."""
    g = position.ground
    if black_gift & ~(position.alive & g.black_mask):
        raise ValueError("black gift must be a set of alive Black vertices")
    if white_gift & ~(position.alive & g.white_mask):
        raise ValueError("white gift must be a set of alive White vertices")
    solver = solver or Solver()
    base = solver.scores(position)
    no_white = solver.scores(
        Position.make(g, position.alive & ~white_gift, position.offset)
    )
    no_black = solver.scores(
        Position.make(g, position.alive & ~black_gift, position.offset)
    )
    return GiftReport(
        base,
        no_white,
        no_black,
        white_gift.bit_count(),
        black_gift.bit_count(),
    )

"""Shared helpers: an independent reference solver and random graphs.

The reference solver implements the game rules in their rawest form: a
move removes the played vertex and its alive neighbors, nothing else, and
isolated vertices stay on the board as ordinary one-point moves.  When the
player to move has nothing left, every remaining vertex is isolated and of
the opponent's color, and counts for its owner.  This is deliberately
independent of the package's closure-and-strip pipeline so that agreement
between the two is meaningful.
"""

from __future__ import annotations

import random

import pytest

from bipartite_influence.graphs import (
    BLACK,
    WHITE,
    GroundGraph,
    Position,
    _bits,
)


def raw_score(ground: GroundGraph, alive: int, black_to_move: bool, memo=None) -> int:
    if memo is None:
        memo = {}
    key = (alive, black_to_move)
    hit = memo.get(key)
    if hit is not None:
        return hit
    mover_mask = alive & (ground.black_mask if black_to_move else ground.white_mask)
    if mover_mask == 0:
        blacks = (alive & ground.black_mask).bit_count()
        whites = (alive & ground.white_mask).bit_count()
        result = blacks - whites  # leftovers count for their owner
    else:
        best = None
        for v in _bits(mover_mask):
            removed = (1 << v) | (ground.adj[v] & alive)
            gain = removed.bit_count()
            if not black_to_move:
                gain = -gain
            val = gain + raw_score(ground, alive & ~removed, not black_to_move, memo)
            if best is None or (black_to_move and val > best) or (
                not black_to_move and val < best
            ):
                best = val
        result = best
    memo[key] = result
    return result


def raw_scores(ground: GroundGraph, alive: int | None = None) -> tuple[int, int]:
    if alive is None:
        alive = ground.full_mask
    memo: dict = {}
    return (
        raw_score(ground, alive, True, memo),
        raw_score(ground, alive, False, memo),
    )


def random_ground(rng: random.Random, max_n: int = 10, p: float = 0.4) -> GroundGraph:
    n = rng.randint(1, max_n)
    colors = [BLACK if rng.random() < 0.5 else WHITE for _ in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if colors[u] is not colors[v] and rng.random() < p:
                edges.append((u, v))
    return GroundGraph(colors, edges, name=f"rand{n}")


def random_position(rng: random.Random, max_n: int = 10, p: float = 0.4) -> Position:
    g = random_ground(rng, max_n, p)
    if rng.random() < 0.3:
        alive = rng.getrandbits(g.n) & g.full_mask
    else:
        alive = g.full_mask
    return Position.make(g, alive)


@pytest.fixture
def rng():
    return random.Random(20260819)


ACCEPTANCE_VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    ACCEPTANCE_VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Replay the acceptance scorecard where capture cannot swallow it."""
    del exitstatus, config
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


def _rows(start, ls_values, rs_values):
    return [
        (start + i, ls_v, rs_v)
        for i, (ls_v, rs_v) in enumerate(zip(ls_values, rs_values))
    ]


# Exact single-segment scores, frozen from independent recomputation.  The
# first forty rows were additionally cross-checked against the generic
# solver on the path graphs; sizes 41 to 120 settle into alternating Left
# scores 3/2 with spikes of 5 at 77 and 117, over a Right period of four.
FROZEN_TABLE_120 = (
    _rows(
        1,
        [1, 2, 3, 4, 5, 2, 1, 2, 3, 2, 1, 2, 3, 4, 3, 2, 3, 2, 3, 2],
        [1, -2, -3, -4, -1, -2, -3, -2, -1, -2, -3, -2, -1, -4, -3, -2, -1,
         -2, -3, -2],
    )
    + _rows(
        21,
        [5, 4, 3, 2, 3, 2, 3, 2, 5, 4, 3, 2, 3, 2, 3, 2, 5, 2, 3, 2],
        [-1, -4, -3, -2, -1, -2, -3, -2, -1, -4, -3, -2, -1, -2, -3, -2, -1,
         -2, -3, -2],
    )
    + [
        (n, 5 if n in (77, 117) else (3 if n % 2 else 2),
         [-1, -2, -3, -2][(n - 41) % 4])
        for n in range(41, 121)
    ]
)

FROZEN_TABLE_38 = FROZEN_TABLE_120[:38]

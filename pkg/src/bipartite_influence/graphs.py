"""Bicolored graphs and game positions for Bipartite Influence.

The game is played on a properly 2-colored bipartite graph.  Black vertices
belong to Left, White vertices to Right.  A move picks a vertex of the
mover's color and removes its closed neighborhood together with any vertex of
the mover's color that the removal just isolated; the mover scores one point
per removed vertex (Left counts positive, Right negative).  Isolated vertices
never offer interaction, so positions keep the invariant that no alive vertex
is isolated: such vertices are converted into banked points for their owner
(the ``offset`` of a :class:`Position`).

Graphs are immutable and small (at most 128 vertices); alive sets are stored
as integer bitmasks, which keeps positions hashable and move generation
cheap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from itertools import count
from typing import Iterable, Iterator, Sequence

MAX_VERTICES = 128

_uid_counter = count(1)


class VertexColor(Enum):
    BLACK = "B"
    WHITE = "W"

    @property
    def opponent(self) -> "VertexColor":
        return WHITE if self is BLACK else BLACK


BLACK = VertexColor.BLACK
WHITE = VertexColor.WHITE


def _bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GroundGraph:
    """An immutable bicolored bipartite graph.

    Vertices are integers ``0..n-1``.  Every edge must join a Black vertex
    and a White vertex; self-loops and duplicate edges are rejected.
    """

    __slots__ = (
        "name",
        "n",
        "colors",
        "adj",
        "black_mask",
        "white_mask",
        "full_mask",
        "uid",
        "_edge_list",
        "_swapped",
    )

    def __init__(
        self,
        colors: Sequence[VertexColor],
        edges: Iterable[tuple[int, int]],
        name: str = "",
    ):
        n = len(colors)
        if n > MAX_VERTICES:
            raise ValueError(
                f"graph has {n} vertices, capacity is {MAX_VERTICES}"
            )
        self.name = name
        self.n = n
        self.colors = tuple(colors)
        adj = [0] * n
        edge_list = []
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if self.colors[u] is self.colors[v]:
                raise ValueError(
                    f"edge ({u}, {v}) joins two {self.colors[u].value} vertices"
                )
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            edge_list.append(key)
        self.adj = tuple(adj)
        self._edge_list = tuple(sorted(edge_list))
        black = 0
        for i, c in enumerate(self.colors):
            if c is BLACK:
                black |= 1 << i
        self.black_mask = black
        self.full_mask = (1 << n) - 1
        self.white_mask = self.full_mask ^ black
        self.uid = next(_uid_counter)
        self._swapped = None

    def color(self, v: int) -> VertexColor:
        return self.colors[v]

    def color_mask(self, color: VertexColor) -> int:
        return self.black_mask if color is BLACK else self.white_mask

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edge_list

    @property
    def edge_count(self) -> int:
        return len(self._edge_list)

    def color_swapped(self) -> "GroundGraph":
        """The same graph with Black and White exchanged (the negative)."""
        if self._swapped is None:
            g = GroundGraph(
                [c.opponent for c in self.colors],
                self._edge_list,
                name=f"-{self.name}" if self.name else "",
            )
            g._swapped = self
            self._swapped = g
        return self._swapped

    def __repr__(self) -> str:
        label = self.name or f"graph#{self.uid}"
        return f"GroundGraph({label}, n={self.n}, m={self.edge_count})"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [
                {"id": i, "color": c.value} for i, c in enumerate(self.colors)
            ],
            "edges": [[u, v] for u, v in self._edge_list],
        }


def graph_from_json(data: dict) -> GroundGraph:
    """Parse the JSON graph format (see FORMATS.md)."""
    try:
        vertices = data["vertices"]
        edges = data["edges"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"graph object missing field: {exc}") from exc
    ids = [v["id"] for v in vertices]
    if sorted(ids) != list(range(len(ids))):
        raise ValueError("vertex ids must be exactly 0..n-1")
    colors: list[VertexColor] = [BLACK] * len(ids)
    for v in vertices:
        raw = v["color"]
        if raw not in ("B", "W"):
            raise ValueError(f"bad color {raw!r} (expected 'B' or 'W')")
        colors[v["id"]] = BLACK if raw == "B" else WHITE
    return GroundGraph(colors, [tuple(e) for e in edges], name=data.get("name", ""))


def load_graph(path) -> GroundGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# builders


def build_segment(n: int) -> GroundGraph:
    """Path on ``|n|`` vertices; the first vertex is Black iff ``n > 0``."""
    if n == 0:
        raise ValueError("segment length must be nonzero")
    length = abs(n)
    first = BLACK if n > 0 else WHITE
    colors = [first if i % 2 == 0 else first.opponent for i in range(length)]
    edges = [(i, i + 1) for i in range(length - 1)]
    return GroundGraph(colors, edges, name=f"S_{n}")


def _grid_colors(rows: int, cols: int) -> list[VertexColor]:
    # vertex (i, j) -> index i * cols + j; Black on even i + j
    return [
        BLACK if (i + j) % 2 == 0 else WHITE
        for i in range(rows)
        for j in range(cols)
    ]


def build_grid(rows: int, cols: int) -> GroundGraph:
    """Grid graph with checkerboard coloring, Black in the corner (0, 0)."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be at least 1")
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return GroundGraph(_grid_colors(rows, cols), edges, name=f"G_{rows}x{cols}")


def build_cylinder(rows: int, cols: int) -> GroundGraph:
    """Grid whose rows wrap around (column cycles).  ``rows`` must be even
    so the wrap edge joins opposite colors, and at least 4 so the cycle is
    simple."""
    if rows % 2 != 0 or rows < 4:
        raise ValueError("cylinder needs an even number of rows, at least 4")
    if cols < 1:
        raise ValueError("cylinder needs at least one column")
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            edges.append((v, ((i + 1) % rows) * cols + j))
    return GroundGraph(_grid_colors(rows, cols), edges, name=f"C_{rows}x{cols}")


def build_torus(rows: int, cols: int) -> GroundGraph:
    """Grid wrapping in both directions; both dimensions even and >= 4."""
    if rows % 2 != 0 or cols % 2 != 0 or rows < 4 or cols < 4:
        raise ValueError("torus needs even dimensions, both at least 4")
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            edges.append((v, i * cols + (j + 1) % cols))
            edges.append((v, ((i + 1) % rows) * cols + j))
    return GroundGraph(_grid_colors(rows, cols), edges, name=f"T_{rows}x{cols}")


def build_hypercube(dim: int) -> GroundGraph:
    """Hypercube of dimension ``dim``; labels with odd bit parity are Black."""
    if dim < 1:
        raise ValueError("hypercube dimension must be at least 1")
    if dim > 20:
        raise ValueError("hypercube dimension above 20 is rejected outright")
    n = 1 << dim
    colors = [BLACK if i.bit_count() % 2 == 1 else WHITE for i in range(n)]
    edges = []
    for v in range(n):
        for b in range(dim):
            u = v ^ (1 << b)
            if u > v:
                edges.append((v, u))
    return GroundGraph(colors, edges, name=f"H_{dim}")


# ---------------------------------------------------------------------------
# positions


class Position:
    """An alive subset of a ground graph plus banked points.

    ``offset`` is the net score already settled (Left points minus Right
    points).  Positions are always stripped: no alive vertex is isolated.
    Use :meth:`make` to build one from an arbitrary alive mask.
    """

    __slots__ = ("ground", "alive", "offset")

    def __init__(self, ground: GroundGraph, alive: int, offset: int = 0):
        self.ground = ground
        self.alive = alive
        self.offset = offset

    @classmethod
    def make(cls, ground: GroundGraph, alive: int | None = None, offset: int = 0) -> "Position":
        """Build a position, stripping isolated vertices into the offset."""
        if alive is None:
            alive = ground.full_mask
        if alive & ~ground.full_mask:
            raise ValueError("alive mask has bits outside the graph")
        adj = ground.adj
        isolated = 0
        for v in _bits(alive):
            if adj[v] & alive == 0:
                isolated |= 1 << v
        if isolated:
            offset += (isolated & ground.black_mask).bit_count()
            offset -= (isolated & ground.white_mask).bit_count()
            alive &= ~isolated
        return cls(ground, alive, offset)

    @property
    def is_empty(self) -> bool:
        return self.alive == 0

    @property
    def vertex_count(self) -> int:
        return self.alive.bit_count()

    def alive_vertices(self) -> list[int]:
        return list(_bits(self.alive))

    def alive_of_color(self, color: VertexColor) -> int:
        return self.alive & self.ground.color_mask(color)

    def negated(self) -> "Position":
        return Position(self.ground.color_swapped(), self.alive, -self.offset)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Position)
            and self.ground is other.ground
            and self.alive == other.alive
            and self.offset == other.offset
        )

    def __hash__(self) -> int:
        return hash((self.ground.uid, self.alive, self.offset))

    def __repr__(self) -> str:
        return (
            f"Position({self.ground!r}, alive={self.alive:#x}, "
            f"offset={self.offset})"
        )


def strip_isolated(position: Position) -> Position:
    """Bank every isolated alive vertex for its owner.  Idempotent."""
    return Position.make(position.ground, position.alive, position.offset)


@dataclass(frozen=True)
class RemovalSet:
    """One legal move: the vertex played, the full removed set, the score."""

    played: int
    removed: int
    gain: int

    def vertices(self) -> list[int]:
        return list(_bits(self.removed))


def removal_closure(position: Position, v: int) -> RemovalSet:
    """The move made by playing alive vertex ``v``.

    Removes ``v``, its alive neighbors, and every vertex of ``v``'s color
    whose alive neighborhood that just emptied.  The gain is the signed
    count of removed vertices (positive for Black).
    """
    g = position.ground
    bit = 1 << v
    if not position.alive & bit:
        raise ValueError(f"vertex {v} is not alive")
    removed = bit | (g.adj[v] & position.alive)
    rest = position.alive & ~removed
    mover = g.colors[v]
    for w in _bits(rest & g.color_mask(mover)):
        if g.adj[w] & rest == 0:
            removed |= 1 << w
    size = removed.bit_count()
    return RemovalSet(v, removed, size if mover is BLACK else -size)


def legal_moves(position: Position, color: VertexColor) -> list[RemovalSet]:
    """All moves of the given color, one per alive vertex of that color."""
    return [
        removal_closure(position, v)
        for v in _bits(position.alive_of_color(color))
    ]


def apply_move(position: Position, move: RemovalSet) -> Position:
    """Play a move: bank its gain, drop the removed set, re-strip."""
    return Position.make(
        position.ground,
        position.alive & ~move.removed,
        position.offset + move.gain,
    )


def components(position: Position) -> list[Position]:
    """Connected components as offset-free positions, canonically ordered."""
    g = position.ground
    rest = position.alive
    out = []
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            grow = 0
            for v in _bits(frontier):
                grow |= g.adj[v] & rest
            frontier = grow & ~comp
            comp |= frontier
        out.append(Position(g, comp, 0))
        rest &= ~comp
    out.sort(key=canonical_key)
    return out


def segment_value(position: Position) -> int | None:
    """Signed segment length if the (connected) position is a path.

    Even paths read the same from both ends up to a color swap, so they are
    normalized to a positive value.  Returns None for non-paths.
    """
    g = position.ground
    alive = position.alive
    n = alive.bit_count()
    if n < 2:
        return None
    ends = []
    edge_bits = 0
    for v in _bits(alive):
        d = (g.adj[v] & alive).bit_count()
        if d > 2:
            return None
        if d == 1:
            ends.append(v)
        edge_bits += d
    if len(ends) != 2 or edge_bits != 2 * (n - 1):
        return None
    if n % 2 == 0:
        return n
    return n if g.colors[ends[0]] is BLACK else -n


def canonical_key(position: Position) -> tuple:
    """Hashable key identifying a connected position up to isomorphism for
    path components, and exactly otherwise.  Equal keys imply equal scores.
    """
    seg = segment_value(position)
    if seg is not None:
        return ("seg", seg)
    return ("g", position.ground.uid, position.alive)


def twin_classes(position: Position) -> list[list[int]]:
    """Group alive vertices by color and alive neighborhood.

    Twins are interchangeable: any removal set containing one contains the
    whole class, so they index symmetric moves.
    """
    g = position.ground
    groups: dict[tuple, list[int]] = {}
    for v in _bits(position.alive):
        key = (g.colors[v].value, g.adj[v] & position.alive)
        groups.setdefault(key, []).append(v)
    return sorted(groups.values())

"""Cooling, thermographs, means and temperatures, all in exact rationals.

Cooling by ``t`` taxes each move: Left options lose ``t`` points, Right
options gain ``t``.  As ``t`` grows the advantage of moving first shrinks;
the temperature ``sigma`` is the least tax at which the cooled Left and
Right scores meet, and the shared frozen value is the mast, which equals
the mean value of the game (the per-copy score of a large sum of copies).

Score trajectories of cooled games are piecewise linear in ``t`` with
rational breakpoints, so everything here works on exact piecewise-linear
functions over ``[0, oo)`` rather than floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .games import Game, audit_universe, ls, repeated, rs


class PiecewiseLinear:
    """A continuous piecewise-linear function on [0, oo).

    ``pieces`` is a tuple of ``(start, a, b)`` triples meaning value
    ``a + b*t`` from ``start`` up to the next piece's start (the last piece
    extends to infinity).  Starts are strictly increasing and begin at 0;
    adjacent pieces agree at the joins and never share the same line.
    """

    __slots__ = ("pieces",)

    def __init__(self, pieces):
        merged: list[tuple[Fraction, Fraction, Fraction]] = []
        for start, a, b in pieces:
            start, a, b = Fraction(start), Fraction(a), Fraction(b)
            if merged and (a, b) == merged[-1][1:]:
                continue  # same line, extend the previous piece
            if merged and start <= merged[-1][0]:
                raise ValueError("piece starts must increase strictly")
            if merged:
                prev_start, pa, pb = merged[-1]
                if pa + pb * start != a + b * start:
                    raise ValueError("pieces must join continuously")
            merged.append((start, a, b))
        if not merged or merged[0][0] != 0:
            raise ValueError("function must start at t = 0")
        self.pieces = tuple(merged)

    @classmethod
    def constant(cls, value) -> "PiecewiseLinear":
        return cls([(0, value, 0)])

    def value(self, t) -> Fraction:
        t = Fraction(t)
        if t < 0:
            raise ValueError("domain is t >= 0")
        chosen = self.pieces[0]
        for piece in self.pieces:
            if piece[0] <= t:
                chosen = piece
            else:
                break
        _, a, b = chosen
        return a + b * t

    def breakpoints(self) -> list[Fraction]:
        return [p[0] for p in self.pieces]

    def plus_linear(self, a0, b0) -> "PiecewiseLinear":
        a0, b0 = Fraction(a0), Fraction(b0)
        return PiecewiseLinear(
            [(s, a + a0, b + b0) for s, a, b in self.pieces]
        )

    def negated(self) -> "PiecewiseLinear":
        return PiecewiseLinear([(s, -a, -b) for s, a, b in self.pieces])

    def minus(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        cuts = sorted({s for s, _, _ in self.pieces}
                      | {s for s, _, _ in other.pieces})
        out = []
        for s in cuts:
            _, a1, b1 = self._piece_at(s)
            _, a2, b2 = other._piece_at(s)
            out.append((s, a1 - a2, b1 - b2))
        return PiecewiseLinear(out)

    def clamped_after(self, t0, value) -> "PiecewiseLinear":
        """Keep the function before ``t0``, constant ``value`` afterwards."""
        t0, value = Fraction(t0), Fraction(value)
        out = [(s, a, b) for s, a, b in self.pieces if s < t0]
        if not out:
            return PiecewiseLinear([(0, value, 0)])
        return PiecewiseLinear(out + [(t0, value, 0)])

    def _piece_at(self, t):
        chosen = self.pieces[0]
        for piece in self.pieces:
            if piece[0] <= t:
                chosen = piece
            else:
                break
        return chosen

    def first_root(self) -> Fraction | None:
        """Least ``t >= 0`` with value 0, or None."""
        for i, (s, a, b) in enumerate(self.pieces):
            end = self.pieces[i + 1][0] if i + 1 < len(self.pieces) else None
            v0 = a + b * s
            if v0 == 0:
                return s
            if b != 0:
                t_star = -a / b
                if t_star > s and (end is None or t_star < end):
                    return t_star
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, PiecewiseLinear) and self.pieces == other.pieces

    def __hash__(self) -> int:
        return hash(self.pieces)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"[{s}: {a}{'+' if b >= 0 else '-'}{abs(b)}t]" for s, a, b in self.pieces
        )
        return f"PiecewiseLinear({parts})"


def upper_envelope(fns: list[PiecewiseLinear]) -> PiecewiseLinear:
    """Pointwise maximum of several piecewise-linear functions."""
    if not fns:
        raise ValueError("need at least one function")
    cuts = sorted({s for f in fns for s, _, _ in f.pieces})
    refined: list[Fraction] = []
    for i, u in enumerate(cuts):
        v = cuts[i + 1] if i + 1 < len(cuts) else None
        refined.append(u)
        lines = {f._piece_at(u)[1:] for f in fns}
        lines = list(lines)
        inner: set[Fraction] = set()
        for j in range(len(lines)):
            a1, b1 = lines[j]
            for k in range(j + 1, len(lines)):
                a2, b2 = lines[k]
                if b1 == b2:
                    continue
                t_star = (a2 - a1) / (b1 - b2)
                if t_star > u and (v is None or t_star < v):
                    inner.add(t_star)
        refined.extend(sorted(inner))
    pieces = []
    for s in refined:
        best = None
        for f in fns:
            _, a, b = f._piece_at(s)
            val = a + b * s
            if best is None or val > best[0] or (val == best[0] and b > best[1]):
                best = (val, b, a)
        pieces.append((s, best[2], best[1]))
    return PiecewiseLinear(pieces)


def lower_envelope(fns: list[PiecewiseLinear]) -> PiecewiseLinear:
    return upper_envelope([f.negated() for f in fns]).negated()


# ---------------------------------------------------------------------------
# thermographs


@dataclass(frozen=True)
class Thermograph:
    """Frozen cooled-score trajectories of one game.

    ``ls_trajectory(t)`` and ``rs_trajectory(t)`` give the scores of the
    game cooled by ``t``; past ``sigma`` both sit at the mast value.
    """

    ls_trajectory: PiecewiseLinear
    rs_trajectory: PiecewiseLinear
    sigma: Fraction
    mast: Fraction


_thermo_cache: dict[int, Thermograph] = {}


def _thermograph_unchecked(g: Game) -> Thermograph:
    hit = _thermo_cache.get(g.uid)
    if hit is not None:
        return hit
    if g.is_number:
        flat = PiecewiseLinear.constant(g.value)
        out = Thermograph(flat, flat, Fraction(0), g.value)
    else:
        ls_tilde = upper_envelope(
            [_thermograph_unchecked(o).rs_trajectory.plus_linear(0, -1)
             for o in g.left]
        )
        rs_tilde = lower_envelope(
            [_thermograph_unchecked(o).ls_trajectory.plus_linear(0, 1)
             for o in g.right]
        )
        gap = ls_tilde.minus(rs_tilde)
        sigma = gap.first_root()
        assert sigma is not None, "trajectories of a short game must meet"
        mast = ls_tilde.value(sigma)
        out = Thermograph(
            ls_tilde.clamped_after(sigma, mast),
            rs_tilde.clamped_after(sigma, mast),
            sigma,
            mast,
        )
    _thermo_cache[g.uid] = out
    return out


def thermograph(g: Game) -> Thermograph:
    """Exact thermograph of a game inside the universe.

    Rejects zugzwang games: cooling is only meaningful when moving first
    is never a burden.
    """
    bad = audit_universe(g)
    if bad:
        raise ValueError(f"cannot cool a game outside the universe: {bad}")
    return _thermograph_unchecked(g)


def mean(g: Game) -> Fraction:
    """The mast value: per-copy score of arbitrarily large sums of copies."""
    return thermograph(g).mast


def mean_by_repetition(g: Game, n: int) -> tuple[Fraction, Fraction]:
    """Average first-player scores of ``n`` copies, an independent estimate
    of the mean (both sides converge to it as ``n`` grows)."""
    if n < 1:
        raise ValueError("need at least one copy")
    total = repeated(g, n)
    return Fraction(ls(total), n), Fraction(rs(total), n)


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CoolingReport:
    t: Fraction
    ls_hot: Fraction
    ls_cool: Fraction
    rs_hot: Fraction
    rs_cool: Fraction

    @property
    def ls_ok(self) -> bool:
        return 0 <= self.ls_hot - self.ls_cool <= self.t

    @property
    def rs_ok(self) -> bool:
        return -self.t <= self.rs_hot - self.rs_cool <= 0

    @property
    def all_ok(self) -> bool:
        return self.ls_ok and self.rs_ok


def cooled_score_bounds_check(g: Game, t) -> CoolingReport:
    """Cooling by ``t`` moves each score toward the other by at most ``t``."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("cooling tax must be nonnegative")
    tg = thermograph(g)
    return CoolingReport(
        t,
        ls(g),
        tg.ls_trajectory.value(t),
        rs(g),
        tg.rs_trajectory.value(t),
    )


@dataclass(frozen=True)
class SumTemperatureReport:
    sigma_g: Fraction
    sigma_h: Fraction
    sigma_sum: Fraction
    mast_g: Fraction
    mast_h: Fraction
    mast_sum: Fraction
    ls_sum: Fraction
    rs_sum: Fraction

    @property
    def sigma_bounded(self) -> bool:
        return self.sigma_sum <= max(self.sigma_g, self.sigma_h)

    @property
    def sigma_exact_when_distinct(self) -> bool:
        if self.sigma_g == self.sigma_h:
            return True
        return self.sigma_sum == max(self.sigma_g, self.sigma_h)

    @property
    def mast_additive(self) -> bool:
        return self.mast_sum == self.mast_g + self.mast_h

    @property
    def sandwich_ok(self) -> bool:
        m = self.mast_g + self.mast_h
        s = max(self.sigma_g, self.sigma_h)
        return m - s <= self.rs_sum <= m <= self.ls_sum <= m + s

    @property
    def all_ok(self) -> bool:
        return (
            self.sigma_bounded
            and self.sigma_exact_when_distinct
            and self.mast_additive
            and self.sandwich_ok
        )


def sum_temperature_check(g: Game, h: Game) -> SumTemperatureReport:
    """Temperature of a sum never exceeds the hottest summand (with equality
    when the summands' temperatures differ), means add, and both scores of
    the sum stay within the hottest temperature of the total mean."""
    from .games import add

    tg, th = thermograph(g), thermograph(h)
    total = add(g, h)
    tsum = thermograph(total)
    return SumTemperatureReport(
        tg.sigma,
        th.sigma,
        tsum.sigma,
        tg.mast,
        th.mast,
        tsum.mast,
        ls(total),
        rs(total),
    )


# ---------------------------------------------------------------------------
# export


def _frac_str(x: Fraction) -> str:
    return str(x)


def _pl_to_json(f: PiecewiseLinear) -> list[dict]:
    return [
        {"start": _frac_str(s), "value_at_start": _frac_str(a + b * s),
         "slope": _frac_str(b)}
        for s, a, b in f.pieces
    ]


def thermograph_to_json(tg: Thermograph) -> dict:
    return {
        "sigma": _frac_str(tg.sigma),
        "mast": _frac_str(tg.mast),
        "ls_trajectory": _pl_to_json(tg.ls_trajectory),
        "rs_trajectory": _pl_to_json(tg.rs_trajectory),
    }


def thermograph_csv_rows(tg: Thermograph) -> list[tuple[str, str, str]]:
    """Plot-ready (t, ls, rs) rows at every breakpoint plus one past freeze."""
    cuts = sorted(
        set(tg.ls_trajectory.breakpoints())
        | set(tg.rs_trajectory.breakpoints())
        | {tg.sigma, tg.sigma + 1}
    )
    return [
        (
            _frac_str(t),
            _frac_str(tg.ls_trajectory.value(t)),
            _frac_str(tg.rs_trajectory.value(t)),
        )
        for t in cuts
    ]

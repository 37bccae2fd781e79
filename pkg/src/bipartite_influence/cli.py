"""Command line front end.

Exit codes: 0 success, 1 a checked property failed, 2 bad input,
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .games import Game, parse_game, format_game, simplify
from .graphs import (
    GroundGraph,
    Position,
    build_cylinder,
    build_grid,
    build_hypercube,
    build_segment,
    build_torus,
    load_graph,
)
from .reduction import (
    gadget_graph,
    parse_pos_cnf,
    reduction_soundness_check,
)
from .segments import (
    SegmentEngine,
    SegmentSum,
    segment_union_tree,
    periodicity_scan,
    write_table_csv,
)
from .solver import SearchBudgetError, Solver, milnor_audit
from .symmetry import certify_draw
from .thermo import thermograph, thermograph_csv_rows, thermograph_to_json

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

ENV_PREFIX = "INFLUENCE_"
CONFIG_KEYS = ("node_budget", "cache_dir", "threads", "search_budget")


def load_config(path: str | None) -> dict:
    """Settings from a key=value file, overridden by INFLUENCE_* env vars."""
    settings: dict[str, str] = {}
    if path:
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"unknown config key: {key}")
            settings[key] = value.strip()
    for key in CONFIG_KEYS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            settings[key] = env
    return settings


def default_cache_dir() -> Path:
    root = os.environ.get("XDG_CACHE_HOME")
    base = Path(root) if root else Path.home() / ".cache"
    return base / "bipartite-influence"


# ---------------------------------------------------------------------------
# graph sources


def add_source_args(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("graph source (pick one)")
    src.add_argument("--segment", type=int, metavar="N",
                     help="path on |N| vertices, Black end iff N > 0")
    src.add_argument("--segments", metavar="LIST",
                     help="comma-separated union of segments, e.g. 5,5,2")
    src.add_argument("--grid", metavar="RxC", help="grid, e.g. 2x3")
    src.add_argument("--cylinder", metavar="RxC", help="grid with wrapped rows")
    src.add_argument("--torus", metavar="RxC", help="grid wrapped both ways")
    src.add_argument("--hypercube", type=int, metavar="D", help="dimension D")
    src.add_argument("--file", metavar="PATH", help="graph JSON file")


def _parse_dims(text: str) -> tuple[int, int]:
    m = text.lower().split("x")
    if len(m) != 2:
        raise ValueError(f"expected RxC, got {text!r}")
    return int(m[0]), int(m[1])


def parse_segment_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad segment list {text!r}") from exc


def graph_from_args(args) -> GroundGraph:
    picks = [
        args.segment is not None,
        getattr(args, "segments", None) is not None,
        args.grid is not None,
        args.cylinder is not None,
        args.torus is not None,
        args.hypercube is not None,
        args.file is not None,
    ]
    if sum(picks) != 1:
        raise ValueError("pick exactly one graph source")
    if args.segment is not None:
        return build_segment(args.segment)
    if getattr(args, "segments", None) is not None:
        raise ValueError("--segments only applies to solve and thermo")
    if args.grid is not None:
        return build_grid(*_parse_dims(args.grid))
    if args.cylinder is not None:
        return build_cylinder(*_parse_dims(args.cylinder))
    if args.torus is not None:
        return build_torus(*_parse_dims(args.torus))
    if args.hypercube is not None:
        return build_hypercube(args.hypercube)
    return load_graph(args.file)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args, settings) -> int:
    budget = int(args.node_budget or settings.get("node_budget")
                 or 100_000_000)
    solver = Solver(node_budget=budget, prune=not args.no_prune)
    if args.segments is not None:
        parts = parse_segment_list(args.segments)
        positions = [Position.make(build_segment(p)) for p in parts]
        pair = solver.score_of_sum(positions)
        label = f"segments {parts}"
    else:
        g = graph_from_args(args)
        pair = solver.scores(Position.make(g))
        label = g.name or "graph"
    payload = {
        "input": label,
        "ls": pair.ls,
        "rs": pair.rs,
        "nodes": solver.nodes,
        "table_entries": len(solver.table),
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"{label}: Ls = {pair.ls}, Rs = {pair.rs} "
              f"({solver.nodes} nodes, {len(solver.table)} table entries)")
    return EXIT_OK


def cmd_table(args, settings) -> int:
    engine = SegmentEngine()
    cache_file = None
    if not args.no_cache:
        cache_dir = Path(args.cache_dir or settings.get("cache_dir")
                         or default_cache_dir())
        cache_file = cache_dir / "segment-scores.json"
        if cache_file.exists():
            engine.load(cache_file)
    threads = int(args.threads or settings.get("threads") or 1)
    if threads > 1:
        # Rows share the engine; memo inserts are idempotent, so the result
        # does not depend on scheduling.
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(
                lambda n: engine.scores(SegmentSum([n])),
                range(1, args.max + 1),
            ))
    rows = []
    for n in range(1, args.max + 1):
        pair = engine.scores(SegmentSum([n]))
        rows.append((n, pair.ls, pair.rs))
    if cache_file is not None:
        engine.save(cache_file)
    if args.check_period:
        period, preperiod = args.check_period
        bad = periodicity_scan(rows, period, preperiod)
        print(f"# periodicity({period}, {preperiod}): "
              + (f"violations at {bad}" if bad else "no violations"),
              file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_table_csv(rows, fh)
    else:
        write_table_csv(rows, sys.stdout)
    return EXIT_OK


def game_from_args(args) -> Game:
    sources = [
        args.game is not None,
        args.segment is not None,
        getattr(args, "segments", None) is not None,
    ]
    if sum(sources) != 1:
        raise ValueError("pick exactly one of --game, --segment, --segments")
    if args.game is not None:
        return parse_game(args.game)
    if args.segment is not None:
        return segment_union_tree([args.segment])
    return segment_union_tree(parse_segment_list(args.segments))


def cmd_thermo(args, settings) -> int:
    g = game_from_args(args)
    if not args.raw:
        g = simplify(g)
    tg = thermograph(g)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("t,ls,rs\n")
            for t, a, b in thermograph_csv_rows(tg):
                fh.write(f"{t},{a},{b}\n")
    if args.json:
        print(json.dumps({"game": format_game(g)} | thermograph_to_json(tg)))
    else:
        print(f"game: {format_game(g)}")
        print(f"temperature = {tg.sigma}, mean = {tg.mast}")
    return EXIT_OK


def cmd_equiv(args, settings) -> int:
    from .games import add, number, equivalent

    def side(sum_text, game_text, offset):
        if (sum_text is None) == (game_text is None):
            raise ValueError("give each side exactly one of a sum or a game")
        if game_text is not None:
            g = parse_game(game_text)
        else:
            g = segment_union_tree(parse_segment_list(sum_text))
        if offset:
            g = add(number(offset), g)
        return g

    sum_a, sum_b = args.sum_a, args.sum_b
    if args.sums:
        if len(args.sums) > 2 or sum_a is not None or sum_b is not None:
            raise ValueError("--sum may appear at most twice, A then B, "
                             "and not together with --sum-a/--sum-b")
        sum_a = args.sums[0]
        if len(args.sums) == 2:
            sum_b = args.sums[1]
    a = side(sum_a, args.game_a, args.offset_a)
    b = side(sum_b, args.game_b, args.offset_b)
    verdict = equivalent(a, b)
    if args.json:
        print(json.dumps({"equivalent": verdict}))
    else:
        print(f"equivalent: {'yes' if verdict else 'no'}")
    return EXIT_OK


def cmd_symmetry(args, settings) -> int:
    g = graph_from_args(args)
    budget = int(args.budget or settings.get("search_budget") or 2_000_000)
    report = certify_draw(g, budget=budget,
                          solve_limit=0 if args.no_solve else args.solve_limit)
    payload = {
        "graph": g.name or "graph",
        "status": report.status,
        "mapping": list(report.mapping) if report.mapping else None,
        "search_nodes": report.search_nodes,
        "scores": (
            {"ls": report.scores.ls, "rs": report.scores.rs}
            if report.scores else None
        ),
        "draw_certified": report.draw_certified,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"{payload['graph']}: {report.status}"
              + (f", mapping {payload['mapping']}" if report.mapping else ""))
        if report.scores:
            print(f"scores: Ls = {report.scores.ls}, Rs = {report.scores.rs}")
    if report.status == "budget":
        return EXIT_BUDGET
    if not report.consistent:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_reduce(args, settings) -> int:
    text = (sys.stdin.read() if args.cnf == "-"
            else Path(args.cnf).read_text(encoding="utf-8"))
    formula = parse_pos_cnf(text)
    g = gadget_graph(formula)
    out = json.dumps(g.to_json())
    if args.out:
        Path(args.out).write_text(out + "\n", encoding="utf-8")
    else:
        print(out)
    if args.check:
        report = reduction_soundness_check(formula)
        print(
            f"# picking game: {'Alice' if report.alice_wins else 'Bob'} wins; "
            f"Ls = {report.left_score}, threshold = {report.threshold}",
            file=sys.stderr,
        )
        if not report.sound:
            return EXIT_VIOLATION
    return EXIT_OK


def cmd_audit(args, settings) -> int:
    g = graph_from_args(args)
    report = milnor_audit(Position.make(g), depth=args.depth)
    payload = {
        "graph": g.name or "graph",
        "positions_checked": report.positions_checked,
        "dicotic_ok": report.dicotic_ok,
        "nonzugzwang_ok": report.nonzugzwang_ok,
        "first_violation": report.first_violation,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        verdict = "clean" if report.clean else f"VIOLATION: {report.first_violation}"
        print(f"{payload['graph']}: {report.positions_checked} positions, {verdict}")
    return EXIT_OK if report.clean else EXIT_VIOLATION


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="influence",
        description="Exact solver workbench for the Bipartite Influence scoring game.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", metavar="FILE",
                   help="key=value settings file (overridden by INFLUENCE_* env)")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="exact Left and Right scores")
    add_source_args(ps)
    ps.add_argument("--node-budget", type=int)
    ps.add_argument("--no-prune", action="store_true",
                    help="keep dominated moves (for cross-checking)")
    ps.add_argument("--json", action="store_true")
    ps.set_defaults(func=cmd_solve)

    pt = sub.add_parser("table", help="segment score table as CSV")
    pt.add_argument("--max", type=int, required=True, metavar="N")
    pt.add_argument("--out", metavar="FILE")
    pt.add_argument("--no-cache", action="store_true")
    pt.add_argument("--cache-dir", metavar="DIR")
    pt.add_argument("--threads", type=int)
    pt.add_argument("--check-period", nargs=2, type=int,
                    metavar=("PERIOD", "PREPERIOD"))
    pt.set_defaults(func=cmd_table)

    pth = sub.add_parser("thermo", help="temperature, mean and trajectories")
    pth.add_argument("--segment", type=int, metavar="N")
    pth.add_argument("--segments", metavar="LIST")
    pth.add_argument("--game", metavar="NOTATION",
                     help="explicit game, e.g. '<5|<-1|-5>>'")
    pth.add_argument("--raw", action="store_true",
                     help="cool the unsimplified tree")
    pth.add_argument("--csv", metavar="FILE")
    pth.add_argument("--json", action="store_true")
    pth.set_defaults(func=cmd_thermo)

    pe = sub.add_parser("equiv", help="test two games for equality")
    pe.add_argument("--sum", metavar="LIST", action="append", dest="sums",
                    help="segments for one side; give twice, A then B")
    pe.add_argument("--sum-a", metavar="LIST", help="segments of side A")
    pe.add_argument("--sum-b", metavar="LIST", help="segments of side B")
    pe.add_argument("--game-a", metavar="NOTATION")
    pe.add_argument("--game-b", metavar="NOTATION")
    pe.add_argument("--offset-a", type=int, default=0)
    pe.add_argument("--offset-b", type=int, default=0)
    pe.add_argument("--json", action="store_true")
    pe.set_defaults(func=cmd_equiv)

    py = sub.add_parser("symmetry", help="search for a mirror-draw certificate")
    add_source_args(py)
    py.add_argument("--budget", type=int)
    py.add_argument("--no-solve", action="store_true",
                    help="skip the exact-score cross-check")
    py.add_argument("--solve-limit", type=int, default=26)
    py.add_argument("--json", action="store_true")
    py.set_defaults(func=cmd_symmetry)

    pr = sub.add_parser("reduce", help="POS-CNF formula to graph JSON")
    pr.add_argument("--cnf", required=True, metavar="FILE",
                    help="formula file, or - for stdin")
    pr.add_argument("--out", metavar="FILE")
    pr.add_argument("--check", action="store_true",
                    help="verify the board agrees with the picking game")
    pr.set_defaults(func=cmd_reduce)

    pa = sub.add_parser("audit", help="universe conditions on reachable positions")
    add_source_args(pa)
    pa.add_argument("--depth", type=int, default=3)
    pa.add_argument("--json", action="store_true")
    pa.set_defaults(func=cmd_audit)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_config(args.config)
        return args.func(args, settings)
    except SearchBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

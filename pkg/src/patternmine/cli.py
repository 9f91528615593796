"""Command-line front end.

Every report starts with ``# key value`` header lines followed by result
rows. Exit status is 0 on success, 2 on a usage error and 3 when an input
file is missing or malformed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .aggregation import format_support_table
from .apps import (
    ConfigurationError,
    cc_bound,
    clique_count,
    exists_clique,
    fsm,
    motif_count,
    motif_name,
    pattern_match,
)
from .datagraph import GraphFormatError, load_graph, save_snapshot
from .matcher import prepare
from .pattern import PatternError, load_patterns
from .plan import explain_plan

__all__ = ["run", "main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _default_threads() -> int:
    env = os.environ.get("PM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise _UsageError(f"PM_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise _UsageError("PM_THREADS must be positive")
        return n
    return os.cpu_count() or 1


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive, default=None, help="worker threads (default: $PM_THREADS or CPU count)")
    common.add_argument("--timing", action="store_true", help="add an elapsed-ms header line")

    graph = _Parser(add_help=False)
    graph.add_argument("graph", help="edge list or binary snapshot")
    graph.add_argument("--labels", default=None, help="vertex label file for an edge list")

    p = _Parser(prog="patternmine", description="Pattern-aware graph mining.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("convert", help="write a binary snapshot of an edge list")
    c.add_argument("edges")
    c.add_argument("output")
    c.add_argument("--labels", default=None)
    c.add_argument("--timing", action="store_true")

    m = sub.add_parser("motifs", parents=[common, graph], help="count vertex-induced motifs")
    m.add_argument("-k", type=int, required=True)

    q = sub.add_parser("cliques", parents=[common, graph], help="count k-cliques")
    q.add_argument("-k", type=int, required=True)

    f = sub.add_parser("fsm", parents=[common, graph], help="frequent subgraph mining")
    f.add_argument("--tau", type=_positive, required=True)
    f.add_argument("--max-edges", type=_positive, default=3)

    mt = sub.add_parser("match", parents=[common, graph], help="count matches of patterns from a file")
    mt.add_argument("patterns")
    mt.add_argument("--mode", choices=("edge", "vertex"), default="edge")
    mt.add_argument("--no-symmetry-breaking", action="store_true")

    e = sub.add_parser("exists", parents=[common, graph], help="does a k-clique exist")
    e.add_argument("-k", type=int, required=True)

    cc = sub.add_parser("cc", parents=[common, graph], help="is the clustering coefficient at least a bound")
    cc.add_argument("--bound", type=float, required=True)

    pl = sub.add_parser("plan", help="print exploration plans for a pattern file")
    pl.add_argument("patterns")
    pl.add_argument("--mode", choices=("edge", "vertex"), default="edge")
    pl.add_argument("--no-symmetry-breaking", action="store_true")
    pl.add_argument("--timing", action="store_true")
    return p


def _bool(x: bool) -> str:
    return "true" if x else "false"


def _dispatch(args, out) -> list[str]:
    """Run the command; returns the header lines and writes rows to ``out``."""
    headers: list[str] = []
    cmd = args.command
    if cmd == "plan":
        plans = [prepare(p, args.mode, not args.no_symmetry_breaking) for p in load_patterns(args.patterns)]
        headers.append(f"# patterns {args.patterns}")
        for i, plan in enumerate(plans):
            out.append(f"## pattern {i}")
            out.extend(explain_plan(plan).rstrip("\n").split("\n"))
        return headers
    if cmd == "convert":
        g = load_graph(args.edges, args.labels)
        save_snapshot(g, args.output)
        headers.append(f"# graph {args.edges}")
        out.append(f"vertices {g.vertex_count}")
        out.append(f"edges {g.edge_count}")
        out.append(f"labeled {_bool(g.is_labeled)}")
        return headers

    threads = args.threads or _default_threads()
    g = load_graph(args.graph, args.labels)
    headers += [f"# graph {args.graph}", f"# threads {threads}"]
    if cmd == "motifs":
        for p, n in motif_count(args.k, g, threads).items():
            out.append(f"{motif_name(p)} {n}")
    elif cmd == "cliques":
        out.append(f"clique{args.k} {clique_count(args.k, g, threads)}")
    elif cmd == "exists":
        out.append(f"clique{args.k} {_bool(exists_clique(args.k, g, threads))}")
    elif cmd == "cc":
        out.append(f"gcc>={args.bound:g} {_bool(cc_bound(g, args.bound, threads))}")
    elif cmd == "match":
        results = pattern_match(args.patterns, g, args.mode, threads, not args.no_symmetry_breaking)
        for i, (_, n) in enumerate(results):
            out.append(f"pattern{i} {n}")
    elif cmd == "fsm":
        res = fsm(g, args.max_edges, args.tau, threads)
        table = {code: s for code, (_, s) in res.frequent.items()}
        out.extend(format_support_table(table).splitlines())
    return headers


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the command and print the report. Returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    rows: list[str] = []
    t0 = time.perf_counter()
    try:
        headers = _dispatch(args, rows)
    except (_UsageError, ConfigurationError) as exc:
        print(f"patternmine: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (GraphFormatError, PatternError, OSError) as exc:
        print(f"patternmine: error: {exc}", file=stderr)
        return EXIT_DATA
    if args.timing:
        headers.append(f"# elapsed-ms {(time.perf_counter() - t0) * 1000:.1f}")
    stdout.write("".join(line + "\n" for line in headers + rows))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

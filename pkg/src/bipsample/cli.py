"""Command-line front end: instance/realization file formats, the analyze
pipeline, sampling, enumeration and the verification suite.

Exit codes: 0 success, 1 parse error, 2 infeasible instance, 3 verification
failure, 4 instance too large, 64 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import chains, oracle
from .analysis import analyze
from .core import (
    FORCED_EDGE,
    FORCED_NON_EDGE,
    FREE,
    DegreeSequence,
    FixedSet,
    Infeasible,
    Instance,
    MoveSet,
    NoUsableBound,
    NotRealizable,
    Realization,
    TooLarge,
)
from .realizability import (
    gale_ryser_realizable,
    initial_realization,
    partition_fixed_set,
    static_set,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAIL = 3
EXIT_TOO_LARGE = 4
EXIT_USAGE = 64

_MASK_CHARS = {"0": FORCED_NON_EDGE, "1": FORCED_EDGE, "*": FREE}
_MASK_REV = {FORCED_NON_EDGE: "0", FORCED_EDGE: "1", FREE: "*"}


class ParseError(ValueError):
    """File-format error with position information."""

    def __init__(self, message: str, line: int, col: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def location(self) -> str:
        if self.col is not None:
            return f"{self.line}:{self.col}"
        return str(self.line)


def _content_lines(text: str):
    """(line_number, stripped_text) for non-blank non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _parse_int_list(body: str, lineno: int, what: str) -> list[int]:
    out = []
    for token in body.split():
        try:
            value = int(token)
        except ValueError:
            raise ParseError(f"bad {what} value {token!r}", lineno) from None
        if value < 0:
            raise ParseError(f"{what} must be nonnegative, got {value}", lineno)
        out.append(value)
    if not out:
        raise ParseError(f"empty {what} list", lineno)
    return out


def parse_instance(text: str) -> Instance:
    """Parse the instance file format.

    Header lines ``rows:``, ``cols:``, ``row_degrees:``, ``col_degrees:``
    in order, then ``mask:`` followed by one line per row with characters
    0 (forced non-edge), 1 (forced edge) and * (free).  ``#`` starts a
    comment line; blank lines are ignored.
    """
    lines = list(_content_lines(text))
    pos = 0

    def take(key: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ParseError(f"missing {key!r} line", last)
        lineno, content = lines[pos]
        if not content.startswith(key):
            raise ParseError(f"expected {key!r} line, got {content!r}", lineno)
        pos += 1
        return lineno, content[len(key):].strip()

    lineno, body = take("rows:")
    n = _parse_int_list(body, lineno, "rows")[0]
    lineno, body = take("cols:")
    nc = _parse_int_list(body, lineno, "cols")[0]
    if n < 1 or nc < 1:
        raise ParseError("rows and cols must be positive", lineno)
    lineno, body = take("row_degrees:")
    row_degrees = _parse_int_list(body, lineno, "row degree")
    if len(row_degrees) != n:
        raise ParseError(
            f"expected {n} row degrees, got {len(row_degrees)}", lineno
        )
    lineno, body = take("col_degrees:")
    col_degrees = _parse_int_list(body, lineno, "col degree")
    if len(col_degrees) != nc:
        raise ParseError(
            f"expected {nc} col degrees, got {len(col_degrees)}", lineno
        )
    lineno, body = take("mask:")
    if body:
        raise ParseError("mask: line takes no inline value", lineno)

    grid = []
    for _ in range(n):
        if pos >= len(lines):
            raise ParseError(f"expected {n} mask lines, got {len(grid)}", lineno)
        lineno, content = lines[pos]
        pos += 1
        if len(content) != nc:
            raise ParseError(
                f"mask line has {len(content)} cells, expected {nc}",
                lineno,
                len(content) + 1 if len(content) < nc else nc + 1,
            )
        row = []
        for col, ch in enumerate(content, start=1):
            if ch not in _MASK_CHARS:
                raise ParseError(f"bad mask character {ch!r}", lineno, col)
            row.append(_MASK_CHARS[ch])
        grid.append(row)
    if pos < len(lines):
        lineno, content = lines[pos]
        raise ParseError(f"unexpected content {content!r}", lineno)
    return Instance(DegreeSequence(row_degrees, col_degrees), FixedSet(grid))


def format_instance(inst: Instance) -> str:
    lines = [
        f"rows: {inst.n}",
        f"cols: {inst.n_cols}",
        "row_degrees: " + " ".join(map(str, inst.degrees.row_degrees)),
        "col_degrees: " + " ".join(map(str, inst.degrees.col_degrees)),
        "mask:",
    ]
    for row in inst.fixed.mask:
        lines.append("".join(_MASK_REV[v] for v in row))
    return "\n".join(lines) + "\n"


def parse_realization(text: str, inst: Instance) -> Realization:
    """Parse a realization file (0/1 grid) against its instance."""
    lines = list(_content_lines(text))
    if len(lines) != inst.n:
        lineno = lines[-1][0] if lines else 1
        raise ParseError(f"expected {inst.n} lines, got {len(lines)}", lineno)
    matrix = []
    for lineno, content in lines:
        if len(content) != inst.n_cols:
            raise ParseError(
                f"line has {len(content)} cells, expected {inst.n_cols}", lineno
            )
        row = []
        for col, ch in enumerate(content, start=1):
            if ch not in "01":
                raise ParseError(f"bad cell character {ch!r}", lineno, col)
            row.append(int(ch))
        matrix.append(row)
    return Realization(inst, matrix)


def format_realization(g: Realization) -> str:
    return "\n".join("".join(str(v) for v in row) for row in g.matrix) + "\n"


def _chain_label(move_set: MoveSet) -> str:
    if move_set.kind == MoveSet.TRADES:
        return "trades"
    if move_set.kind == MoveSet.TRADES_PLUS_CIRCLE:
        return "trades+circle"
    if move_set.kind == MoveSet.SWAPS4:
        return "swap"
    if move_set.kind == MoveSet.SWAPS46:
        return "cycle:6"
    return f"cycle:{move_set.limit}"


def _pipeline(inst: Instance, reduce_static: bool):
    """Shared analyze/sample pipeline.

    Returns (f_prime, working_fixed, redundant_cells, report_or_None).
    The report is None when no bounded move set is usable.
    """
    if reduce_static:
        f_prime = static_set(inst.degrees)
        working, redundant = partition_fixed_set(inst, f_prime)
    else:
        f_prime = None
        working, redundant = inst.fixed, frozenset()
    try:
        report = analyze(working, inst.n, inst.n_cols)
    except NoUsableBound:
        report = None
    return f_prime, working, redundant, report


def _load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def cmd_analyze(args) -> int:
    try:
        inst = _load_instance(args.path)
    except ParseError as exc:
        print(f"{args.path}:{exc.location()}: {exc.message}", file=sys.stderr)
        return EXIT_PARSE

    realizable = gale_ryser_realizable(inst.degrees)
    print(f"realizable: {'yes' if realizable else 'no'}")
    if not realizable:
        print("feasible: no")
        return EXIT_INFEASIBLE
    try:
        initial_realization(inst)
    except Infeasible as exc:
        print("feasible: no")
        print(f"reason: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print("feasible: yes")

    f_prime, working, redundant, report = _pipeline(inst, not args.no_reduce)
    if f_prime is None:
        print("static cells: skipped (--no-reduce)")
    else:
        print(
            f"static cells: {f_prime.size()} "
            f"(edges={len(f_prime.forced_edges)}, "
            f"non-edges={len(f_prime.forced_non_edges)})"
        )
    n_working = len(working.cells)
    print(f"|F|: {n_working}")
    print(f"|F*|: {len(redundant)}")
    if n_working == 0:
        print("|F| = 0; plain Curveball applies")
    if report is not None:
        print(f"has 3-matching: {'yes' if report.has_3_matching else 'no'}")
        print(f"has 8-cycle: {'yes' if report.has_8_cycle else 'no'}")
        print(f"forest: {'yes' if report.is_forest else 'no'}")
        ell = report.min_excluded_ell
        print(f"min excluded ell: {ell if ell is not None else 'none'}")
        print(f"recommended: {_chain_label(report.recommended)}")
    else:
        fallback = 2 * min(inst.n, inst.n_cols)
        print(
            f"recommended: cycle:{fallback} "
            "(fallback: every shorter cycle length occurs in the fixed set)"
        )
    return EXIT_OK


def _resolve_chain(inst: Instance, spec: str, reduce_static: bool) -> MoveSet:
    if spec == "auto":
        _, _, _, report = _pipeline(inst, reduce_static)
        if report is None:
            return MoveSet.swaps_up_to(2 * min(inst.n, inst.n_cols))
        return report.recommended
    if spec == "swap":
        return MoveSet.swaps4()
    if spec == "curveball":
        return MoveSet.trades()
    if spec == "circle":
        return MoveSet.trades_plus_circle()
    assert spec.startswith("cycle:")
    return MoveSet.swaps_up_to(int(spec.split(":", 1)[1]))


def cmd_sample(args) -> int:
    try:
        inst = _load_instance(args.path)
    except ParseError as exc:
        print(f"{args.path}:{exc.location()}: {exc.message}", file=sys.stderr)
        return EXIT_PARSE
    try:
        move_set = _resolve_chain(inst, args.chain, not args.no_reduce)
    except (Infeasible, NotRealizable) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"chain: {_chain_label(move_set)}", file=sys.stderr)

    outputs = []
    try:
        for c in range(args.count):
            cfg = chains.ChainConfig(
                move_set=move_set,
                steps=args.steps,
                seed=args.seed + c,
                sample_gap=args.gap,
                mh_correction=args.mh == "on",
            )
            samples = chains.run(inst, cfg)
            outputs.append(format_realization(samples[-1]))
    except (Infeasible, NotRealizable) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for c, text in enumerate(outputs):
            with open(
                os.path.join(args.out, f"sample_{c:04d}.txt"), "w", encoding="utf-8"
            ) as fh:
                fh.write(text)
    else:
        sys.stdout.write("\n".join(outputs))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    try:
        inst = _load_instance(args.path)
    except ParseError as exc:
        print(f"{args.path}:{exc.location()}: {exc.message}", file=sys.stderr)
        return EXIT_PARSE
    try:
        states = oracle.enumerate_realizations(inst)
    except TooLarge as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    print(len(states))
    if args.list:
        blocks = [format_realization(g) for g in states]
        sys.stdout.write("\n".join(blocks))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.max_rows * args.max_cols > oracle.ENUMERATION_CELL_LIMIT:
        print("too large: max-rows * max-cols must be <= 36", file=sys.stderr)
        return EXIT_TOO_LARGE
    result = oracle.run_verification(
        max_rows=args.max_rows,
        max_cols=args.max_cols,
        random_count=args.random,
        seed=args.seed,
        emit=print,
        quiet=args.quiet,
    )
    print(f"checks run: {result.checks_run}")
    for name in sorted(result.counts):
        print(f"  {name}: {result.counts[name]}")
    print(f"informational findings: {len(result.info_lines)}")
    print(f"failures: {len(result.failures)}")
    print(f"elapsed: {result.elapsed:.1f}s")
    if not result.passed:
        print(f"result: FAIL ({result.witness_check})")
        if result.witness is not None:
            print("witness instance:", file=sys.stderr)
            sys.stderr.write(format_instance(result.witness))
        return EXIT_VERIFY_FAIL
    print("result: PASS")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def _chain_spec(text: str) -> str:
    if text in ("auto", "swap", "curveball", "circle"):
        return text
    if text.startswith("cycle:"):
        try:
            limit = int(text.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError("cycle:L needs an integer L") from None
        if limit % 2 or limit < 4:
            raise argparse.ArgumentTypeError("cycle:L needs an even L >= 4")
        return text
    raise argparse.ArgumentTypeError(
        "chain must be auto, swap, curveball, circle or cycle:L"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bipsample",
        description="Sample bipartite 0/1 matrices with prescribed margins "
        "and pinned cells.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="report feasibility and the recommended chain")
    p.add_argument("path")
    p.add_argument("--no-reduce", action="store_true",
                   help="skip the static-cell reduction")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="draw samples with a Markov chain")
    p.add_argument("path")
    p.add_argument("--chain", type=_chain_spec, default="auto")
    p.add_argument("--steps", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--gap", type=_positive_int, default=1)
    p.add_argument("--mh", choices=("on", "off"), default="on")
    p.add_argument("--out", help="write samples to this directory instead of stdout")
    p.add_argument("--no-reduce", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="count (and list) all realizations")
    p.add_argument("path")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run the brute-force verification suite")
    p.add_argument("--max-rows", type=_positive_int, default=5)
    p.add_argument("--max-cols", type=_positive_int, default=5)
    p.add_argument("--random", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true",
                   help="only print failures and the summary")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command == "sample" and args.gap > args.steps:
        print("bipsample: error: --gap must not exceed --steps", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

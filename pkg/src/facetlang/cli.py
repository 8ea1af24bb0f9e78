"""Command line front end: run, repl, check, serve.

Exit codes: 0 on success, 1 on a language error, 2 on a syntax error or an
unusable path.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import LangError, NotOracleSafeError, ParseError
from .facets import render
from .interp import Interp
from .oracle import check_projection_equivalence, render_view
from .reader import balanced, parse_program


def _trace_sink(line: str) -> None:
    print(line, file=sys.stderr)


def cmd_run(args) -> int:
    path = Path(args.file)
    try:
        source = path.read_text()
    except OSError as e:
        print("error: cannot read %s: %s" % (path, e.strerror), file=sys.stderr)
        return 2
    try:
        program = parse_program(source)
    except ParseError as e:
        print("syntax error: %s" % e, file=sys.stderr)
        return 2
    interp = Interp(trace=_trace_sink if args.trace else None)
    try:
        values = interp.run_program(program)
    except LangError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    for v in values:
        print(render(v))
    if args.print_store:
        for i, v in interp.store.items():
            print("@%d = %s" % (i, render(v)))
    return 0


def cmd_repl(args) -> int:
    interp = Interp(trace=_trace_sink if args.trace else None)
    buffer = ""
    while True:
        try:
            prompt = "> " if not buffer else ". "
            sys.stdout.write(prompt)
            sys.stdout.flush()
            line = input()
        except EOFError:
            print()
            return 0
        if not buffer:
            stripped = line.strip()
            if stripped == ":quit":
                return 0
            if stripped.startswith(":trace"):
                arg = stripped.split()[1:] or ["on"]
                interp.trace = _trace_sink if arg[0] == "on" else None
                continue
        buffer += line + "\n"
        if not balanced(buffer):
            continue
        text, buffer = buffer, ""
        if not text.strip():
            continue
        try:
            program = parse_program(text)
            for value in interp.run_program(program):
                print(render(value))
        except LangError as e:
            print("error: %s" % e, file=sys.stderr)


def _collect_files(paths: list) -> list:
    files = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.glob("*.rkts")))
        elif path.exists():
            files.append(path)
        else:
            raise FileNotFoundError(p)
    return files


def cmd_check(args) -> int:
    try:
        files = _collect_files(args.paths)
    except FileNotFoundError as e:
        print("error: no such path: %s" % e, file=sys.stderr)
        return 2
    failures = 0
    summaries = []
    for path in files:
        try:
            report = check_projection_equivalence(
                path.read_text(), program_id=str(path), max_labels=args.max_labels
            )
        except ParseError as e:
            failures += 1
            summaries.append({"program": str(path), "verdict": "fail", "error": "syntax error: %s" % e})
            if not args.json:
                print("%s: FAIL (syntax error: %s)" % (path, e))
            continue
        except NotOracleSafeError as e:
            summaries.append({"program": str(path), "verdict": "skip", "reason": str(e)})
            if not args.json:
                print("%s: SKIP (not oracle-safe: %s)" % (path, e))
            continue
        summaries.append(report.summary())
        if report.passed:
            if not args.json:
                print("%s: PASS (%d labels, %d views)" % (path, report.label_count, len(report.rows)))
        else:
            failures += 1
            if not args.json:
                if report.error:
                    print("%s: FAIL (%s)" % (path, report.error))
                for row in report.rows:
                    if not row.ok:
                        print(
                            "%s: FAIL view %s: faceted=%s standard=%s"
                            % (path, render_view(row.view), row.faceted, row.standard)
                        )
    if args.json:
        print(json.dumps(summaries, indent=2))
    return 1 if failures else 0


def _read_board(path: str) -> list:
    words = Path(path).read_text().split()
    if len(words) % 2 != 0:
        raise ValueError("board file %s must hold x y pairs" % path)
    coords = [int(w) for w in words]
    return list(zip(coords[0::2], coords[1::2]))


def cmd_serve(args) -> int:
    from . import battleship

    try:
        board1 = _read_board(args.board1) if args.board1 else [(1, 2), (2, 3)]
        board2 = _read_board(args.board2) if args.board2 else [(4, 5), (6, 7)]
    except (OSError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    try:
        game = battleship.Game(board1, board2)
    except battleship.InvalidBoardError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    server = battleship.make_server(game, args.port, ui_dir=args.ui_dir)
    print("serving battleship on port %d" % server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facetlang", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a program file")
    p_run.add_argument("file")
    p_run.add_argument("--trace", action="store_true", help="log each rule firing to stderr")
    p_run.add_argument("--print-store", action="store_true", help="dump the store after the run")
    p_run.set_defaults(fn=cmd_run)

    p_repl = sub.add_parser("repl", help="interactive session")
    p_repl.add_argument("--trace", action="store_true")
    p_repl.set_defaults(fn=cmd_repl)

    p_check = sub.add_parser("check", help="projection-equivalence oracle over files or directories")
    p_check.add_argument("paths", nargs="+")
    p_check.add_argument("--max-labels", type=int, default=3)
    p_check.add_argument("--json", action="store_true", help="machine-readable summary")
    p_check.set_defaults(fn=cmd_check)

    p_serve = sub.add_parser("serve", help="start the battleship service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--board1", help="file of whitespace-separated x y pairs")
    p_serve.add_argument("--board2", help="file of whitespace-separated x y pairs")
    p_serve.add_argument("--ui-dir", help="directory of static files to serve at /")
    p_serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

"""Command line interface: batch checking, the interactive REPL, and the
session protocol server (optionally also serving the browser bundle)."""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="lflogic",
        description="proof assistant for typing properties of dependently "
                    "typed specifications")
    ap.add_argument("--search-depth", type=int, default=5,
                    help="bound for the search tactic (default 5)")
    ap.add_argument("--trace", action="store_true",
                    help="print each rule application")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_check = sub.add_parser("check", help="run proof scripts in batch")
    p_check.add_argument("files", nargs="+")

    p_repl = sub.add_parser("repl", help="interactive proof session")
    p_repl.add_argument("files", nargs="*")

    p_serve = sub.add_parser("serve", help="speak the session protocol on stdio")
    p_serve.add_argument("--web", type=int, metavar="PORT", default=None,
                         help="serve the browser interface over HTTP instead")
    p_serve.add_argument("--web-root", default=None,
                         help="directory with the static browser bundle")

    p_enum = sub.add_parser("enumerate",
                            help="developer oracle: list inhabitants of a type")
    p_enum.add_argument("signature")
    p_enum.add_argument("type")
    p_enum.add_argument("--max-size", type=int, default=6)

    args = ap.parse_args(argv)

    if args.cmd == "check":
        from .session import check_files
        code, msgs = check_files(args.files, search_depth=args.search_depth,
                                 trace=args.trace)
        for m in msgs:
            print(m)
        return code

    if args.cmd == "repl":
        from .session import repl
        return repl(args.files, search_depth=args.search_depth,
                    trace=args.trace)

    if args.cmd == "serve":
        if args.web is not None:
            from .webserve import serve_web
            return serve_web(args.web, web_root=args.web_root,
                             search_depth=args.search_depth)
        from .session import serve_session
        return serve_session(search_depth=args.search_depth)

    if args.cmd == "enumerate":
        from pathlib import Path

        from .oracle import enumerate_terms
        from .parser import Parser, Scope, parse_signature, tokenize
        from .printer import print_term
        from .syntax import EMPTY_CTX
        sig = parse_signature(Path(args.signature).read_text())
        p = Parser(tokenize(args.type))
        a = p.parse_type(Scope(sig, {}))
        for m in enumerate_terms(sig, EMPTY_CTX, a, args.max_size):
            print(print_term(m))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())

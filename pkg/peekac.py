#!/usr/bin/env python3
"""
Thin CLI entrypoint for peekac.

Business logic lives in dedicated modules:
- peekac_config: constants, caps and budgets
- peekac_structures / peekac_homs / peekac_pp / peekac_io: relational structures
- peekac_ac / peekac_pac: arc consistency and peek arc consistency
- peekac_templates / peekac_setcon: built-in constraint languages
- peekac_meta: characterization checks
- peekac_commands: CLI command handlers
"""
import argparse
import logging
import sys

import peekac_commands as cmd
import peekac_config as cfg
from peekac_utils import PeekacError


def _add_template(parser, required: bool = True):
    parser.add_argument(
        "--template", required=required,
        help=f"Built-in template ({', '.join(cfg.BUILTIN_TEMPLATES)}) or a structure file",
    )


def build_parser():
    parser = argparse.ArgumentParser(description="peekac: arc consistency and peek arc consistency for CSPs")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    subparsers = parser.add_subparsers(dest="command")

    solve = subparsers.add_parser("solve", help="Decide one instance")
    _add_template(solve)
    solve.add_argument("--instance", required=True, help="Structure file, .cnf file (2sat) or set-constraint file (setcon)")
    solve.add_argument("--method", choices=cfg.METHODS, default="pac")
    solve.add_argument("--workers", type=int, help="Peek workers (default: available CPUs)")
    solve.add_argument("--seed", type=int, help="Shuffle the AC worklist order; decisions do not change")
    solve.add_argument("--budget", type=int, default=cfg.HOM_SEARCH_BUDGET, help="Node budget for brute-force search")
    solve.add_argument("--format", choices=cfg.FORMATS, default="text")
    solve.add_argument("--full-report", action="store_true", help="Run every peek instead of short-circuiting")

    gen = subparsers.add_parser("gen", help="Write a random instance")
    gen.add_argument("kind", choices=cfg.GEN_KINDS)
    gen.add_argument("size", type=int, help="Number of variables")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", help="Write to this file instead of stdout")
    gen.add_argument("--edge-prob", type=float, default=cfg.DEFAULT_EDGE_PROB)
    gen.add_argument("--clauses", type=int, help="Number of 2-CNF clauses (default: size)")
    gen.add_argument("--le-density", type=float, default=cfg.DEFAULT_LE_DENSITY)
    gen.add_argument("--ne-density", type=float, default=cfg.DEFAULT_NE_DENSITY)
    gen.add_argument("--density", type=float, default=cfg.DEFAULT_SETCON_DENSITY, help="Set-constraint density")

    bench = subparsers.add_parser("bench", help="Time PAC over growing instances and worker counts")
    _add_template(bench, required=False)
    bench.set_defaults(template="pointalg")
    bench.add_argument("--method", choices=["ac", "pac"], default="pac")
    bench.add_argument("--sizes", default=cfg.DEFAULT_BENCH_SIZES, help="Comma separated instance sizes")
    bench.add_argument("--workers-list", default=cfg.DEFAULT_BENCH_WORKERS, help="Comma separated worker counts")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--timeout", type=float, default=cfg.DEFAULT_BENCH_TIMEOUT, help="Seconds per cell")
    bench.add_argument("--output")
    bench.add_argument("--edge-prob", type=float, default=cfg.DEFAULT_EDGE_PROB)
    bench.add_argument("--clauses", type=int)
    bench.add_argument("--le-density", type=float, default=cfg.DEFAULT_LE_DENSITY)
    bench.add_argument("--ne-density", type=float, default=cfg.DEFAULT_NE_DENSITY)
    bench.add_argument("--density", type=float, default=cfg.DEFAULT_SETCON_DENSITY)

    char = subparsers.add_parser("characterize", help="Bounded AC/PAC characterization of a finite template")
    _add_template(char)
    char.add_argument("--nmax", type=int, default=cfg.DEFAULT_NMAX)
    char.add_argument("--cap-universe", type=int, default=cfg.MAX_POWER_UNIVERSE)
    char.add_argument("--max-vars", type=int, default=cfg.DEFAULT_ENUM_VARS)
    char.add_argument("--max-tuples", type=int, default=cfg.DEFAULT_ENUM_TUPLES)
    char.add_argument("--no-shrink", action="store_true", help="Keep the first counterexample as found")
    char.add_argument("--format", choices=cfg.FORMATS, default="text")
    char.add_argument("--output")

    orbits = subparsers.add_parser("orbits", help="Automorphism orbits of a template")
    _add_template(orbits)
    orbits.add_argument("--orbit-cap", type=int, default=cfg.ORBIT_CAP)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING, format=cfg.LOG_FORMAT, stream=sys.stderr
    )

    try:
        if args.command == "solve":
            code = cmd.cmd_solve(args)
        elif args.command == "gen":
            code = cmd.cmd_gen(args)
        elif args.command == "bench":
            code = cmd.cmd_bench(args)
        elif args.command == "characterize":
            code = cmd.cmd_characterize(args)
        elif args.command == "orbits":
            code = cmd.cmd_orbits(args)
        else:
            parser.print_help()
            code = cfg.EXIT_ERROR
    except PeekacError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        code = cfg.EXIT_ERROR
    sys.exit(code)


if __name__ == "__main__":
    main()

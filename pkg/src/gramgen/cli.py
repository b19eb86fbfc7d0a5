"""Command-line front end: ``gramgen gen | parse | dot | audit``."""

from __future__ import annotations

import argparse
import sys

from .cnf import cyk_parse
from .dot import export_dot
from .errors import DomainError, GrammarError, InfeasibleParams, UnknownTerminal
from .feasibility import GenerationParams
from .grammar import load_grammar
from .pipeline import RunConfig, audit, load_any_grammar, run

# options that belong to whichever set flag precedes them
_SET_OPTIONS = {
    "pos_uniform": {"max_len", "per_len"},
    "neg_random": {"count", "min_len", "max_len"},
    "neg_lev": {"count", "distance"},
}
_CONFIG_FIELD = {
    ("pos_uniform", "max_len"): "uniform_max_len",
    ("pos_uniform", "per_len"): "uniform_per_len",
    ("neg_random", "count"): "random_count",
    ("neg_random", "min_len"): "random_min_len",
    ("neg_random", "max_len"): "random_max_len",
    ("neg_lev", "count"): "lev_count",
    ("neg_lev", "distance"): "lev_distance",
}


class _SetFlag(argparse.Action):
    def __init__(self, option_strings, dest, **kwargs):
        super().__init__(option_strings, dest, nargs=0, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, True)
        namespace.current_set = self.dest


class _SetOption(argparse.Action):
    """Integer option bound to the most recent set flag, e.g. ``--neg-random --count 5``."""

    def __call__(self, parser, namespace, values, option_string=None):
        current = getattr(namespace, "current_set", None)
        if current is None or self.dest not in _SET_OPTIONS.get(current, ()):
            owners = [f"--{k.replace('_', '-')}" for k, opts in _SET_OPTIONS.items() if self.dest in opts]
            parser.error(f"{option_string} must follow one of {', '.join(owners)}")
        if getattr(namespace, "set_options", None) is None:
            namespace.set_options = {}
        namespace.set_options[(current, self.dest)] = values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gramgen", description="Random context-free grammar benchmark kits.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate (or load) a grammar and its example sets")
    gen.add_argument("--rules", type=int, help="total rule count; symbol maxima and split are drawn")
    gen.add_argument("--paren-no", type=int, help="rules A -> a b")
    gen.add_argument("--paren-with", type=int, default=0, help="rules A -> a B b")
    gen.add_argument("--iter", type=int, default=0, help="rules A -> c E and A -> E c")
    gen.add_argument("--branch", type=int, default=0, help="rules A -> C D")
    gen.add_argument("--max-t", type=int, help="maximum number of terminals")
    gen.add_argument("--max-nt", type=int, help="maximum number of nonterminals")
    gen.add_argument("--load", metavar="PATH", help="use an existing grammar file instead of generating")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="out", help="output directory (default: out)")
    gen.add_argument("--pos-optimal", action=_SetFlag, default=False)
    gen.add_argument("--pos-uniform", action=_SetFlag, default=False)
    gen.add_argument("--neg-random", action=_SetFlag, default=False)
    gen.add_argument("--neg-lev", action=_SetFlag, default=False)
    for opt in ("--max-len", "--per-len", "--count", "--min-len", "--distance"):
        gen.add_argument(opt, type=int, action=_SetOption, help="applies to the preceding set flag")
    gen.set_defaults(current_set=None, set_options=None)

    p = sub.add_parser("parse", help="CYK membership query; exit 0 member, 1 non-member, 2 error")
    p.add_argument("grammar")
    p.add_argument("tokens", help='space-separated terminals, e.g. "b c c"')

    d = sub.add_parser("dot", help="print the grammar as a Graphviz digraph")
    d.add_argument("grammar")
    d.add_argument("-o", "--output")

    a = sub.add_parser("audit", help="re-check every example file of a run directory")
    a.add_argument("dir")
    return parser


def config_from_args(args, parser) -> RunConfig:
    explicit = [args.paren_no, args.max_t, args.max_nt]
    modes = sum([args.rules is not None, any(v is not None for v in explicit), args.load is not None])
    if modes != 1:
        parser.error("use exactly one of --rules N, --paren-no/--max-t/--max-nt ..., --load PATH")
    cfg = RunConfig(out_dir=args.out, seed=args.seed)
    if args.rules is not None:
        cfg.total_rules = args.rules
    elif args.load is not None:
        cfg.grammar_path = args.load
    else:
        if None in explicit:
            parser.error("explicit parameters need --paren-no, --max-t and --max-nt")
        cfg.params = GenerationParams(
            args.max_t, args.max_nt, args.paren_no, args.paren_with, args.iter, args.branch
        )
    cfg.pos_optimal = args.pos_optimal
    cfg.pos_uniform = args.pos_uniform
    cfg.neg_random = args.neg_random
    cfg.neg_lev = args.neg_lev
    for key, value in (args.set_options or {}).items():
        setattr(cfg, _CONFIG_FIELD[key], value)
    return cfg


def cmd_gen(args, parser) -> int:
    try:
        cfg = config_from_args(args, parser)
        rep = run(cfg)
    except InfeasibleParams as exc:
        print(f"infeasible: {exc.verdict.describe()}", file=sys.stderr)
        return 1
    except (DomainError, GrammarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in rep.files:
        print(path)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 1 if rep.warnings else 0


def cmd_parse(args) -> int:
    try:
        cnf = load_any_grammar(args.grammar)
        member = cyk_parse(cnf, args.tokens.split())
    except UnknownTerminal as exc:
        print(f"error: unknown terminal: {exc}", file=sys.stderr)
        return 2
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("member" if member else "non-member")
    return 0 if member else 1


def cmd_dot(args) -> int:
    try:
        text = export_dot(load_grammar(args.grammar))
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_audit(args) -> int:
    try:
        entries = audit(args.dir)
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for e in entries:
        status = "ok" if e.ok else f"{len(e.failures)} FAILED"
        print(f"{e.file}: {e.checked} checked, {status}")
        for word in e.failures[:10]:
            print("  " + " ".join(word))
    return 0 if all(e.ok for e in entries) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        return cmd_gen(args, parser)
    if args.command == "parse":
        return cmd_parse(args)
    if args.command == "dot":
        return cmd_dot(args)
    return cmd_audit(args)


if __name__ == "__main__":
    sys.exit(main())

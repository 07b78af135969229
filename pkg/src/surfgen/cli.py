"""Command-line interface.

Exit status is 0 on success, 1 on errors (bad grammar, bad logical form,
cycles, caps) and 2 when a generate or parse request has no result.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .engine import GenerationError, GenSession, ShdgSession
from .golden import read_data
from .grammar import Grammar, GrammarError, normalize, parse_grammar
from .invert import ChainError
from .parseref import compile_parse_tables, lr_parse
from .tables import (
    DepthConfig, GenTables, TableError, compile_tables, dumps, format_states, load,
    optimize_depths, reductive_score, save,
)
from .term import TermSyntaxError, format_term, is_ground, parse_term

EXIT_ERROR = 1
EXIT_EMPTY = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    grammar: Optional[str] = None
    tables: Optional[str] = None
    depth: str = "1"
    depth_cap: int = 4
    state_cap: int = 10000
    chain_cap: int = 32
    recursion_cap: int = 64
    format: str = "text"

    def __post_init__(self):
        for name in ("depth_cap", "state_cap", "chain_cap", "recursion_cap"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.depth != "auto" and (not self.depth.isdigit() or int(self.depth) < 1):
            raise UsageError("--depth must be a positive integer or 'auto'")

    def source(self) -> Grammar:
        if self.grammar is None:
            return parse_grammar(read_data("sample.dcg"))
        with open(self.grammar, encoding="utf-8") as f:
            return parse_grammar(f.read())

    def compile(self, top: Optional[str] = None) -> GenTables:
        g = normalize(self.source())
        if self.depth == "auto":
            cfg = optimize_depths(g, top, depth_cap=self.depth_cap, state_cap=self.state_cap)
        else:
            cfg = DepthConfig(int(self.depth))
        return compile_tables(g, top, cfg, state_cap=self.state_cap, chain_cap=self.chain_cap)

    def gen_tables(self, top: Optional[str] = None) -> GenTables:
        if self.tables is None:
            return self.compile(top)
        t = load(self.tables)
        if top is not None and top != t.top:
            raise UsageError(f"table file generates {t.top}, not {top}")
        return t


def _lf(text: str):
    lf = parse_term(text, pattern=False)
    if not is_ground(lf):
        raise UsageError(f"logical form must be ground: {text}")
    return lf


def _summary(t: GenTables) -> str:
    m, mean = reductive_score(t)
    return (f"states: {len(t.states)}\n"
            f"lookahead: {t.lookahead.describe()}\n"
            f"reductive max: {m} mean: {float(mean):.3f}")


def cmd_compile(cfg: RunConfig, args) -> int:
    t = cfg.compile()
    out = args.out or cfg.tables or "surfgen.tables"
    save(t, out)
    print(_summary(t))
    print(f"written: {out}")
    return 0


def cmd_generate(cfg: RunConfig, args) -> int:
    lf = _lf(args.lf)
    t = cfg.gen_tables(args.cat)
    n = 0
    for r in GenSession(t, cfg.recursion_cap).run(lf):
        print(r.text)
        n += 1
        if args.limit and n >= args.limit:
            break
    return 0 if n else EXIT_EMPTY


def cmd_parse(cfg: RunConfig, args) -> int:
    src = cfg.source()
    pt = compile_parse_tables(src)
    seen = []
    for lf in lr_parse(pt, src, args.sentence.split()):
        s = format_term(lf)
        if s not in seen:
            seen.append(s)
            print(s)
            if args.limit and len(seen) >= args.limit:
                break
    return 0 if seen else EXIT_EMPTY


def cmd_states(cfg: RunConfig, args) -> int:
    if args.which == "parse":
        sys.stdout.write(compile_parse_tables(cfg.source()).dumps())
        return 0
    t = cfg.gen_tables()
    sys.stdout.write(dumps(t) if cfg.format == "golden" else format_states(t))
    return 0


def cmd_optimize(cfg: RunConfig, args) -> int:
    g = normalize(cfg.source())
    training = None
    if args.training:
        with open(args.training, encoding="utf-8") as f:
            training = [_lf(line) for line in f if line.strip() and not line.startswith("%")]
    trace: list = []
    dc = optimize_depths(g, training=training, depth_cap=cfg.depth_cap, trace=trace,
                         state_cap=cfg.state_cap)
    for i, (desc, m, n) in enumerate(trace):
        print(f"step {i}: {desc}  max={m} states={n}")
    t = compile_tables(g, cfg=dc, state_cap=cfg.state_cap, chain_cap=cfg.chain_cap)
    print(_summary(t))
    if args.out:
        save(t, args.out)
        print(f"written: {args.out}")
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    lf = _lf(args.lf)
    src = cfg.source()
    t = cfg.gen_tables(args.cat)
    sh = ShdgSession(src, cfg.chain_cap)
    a = [r.text for r in sh.run(t.top, lf)]
    gs = GenSession(t, cfg.recursion_cap)
    b = [r.text for r in gs.run(lf)]
    print(f"shdg attempts: {sh.attempts}")
    print(f"table attempts: {gs.attempts}")
    for x in a:
        print(f"shdg: {x}")
    for x in b:
        print(f"table: {x}")
    same = Counter(a) == Counter(b)
    print("realizations: " + ("equal" if same else "DIFFER"))
    return 0 if same else EXIT_ERROR


def cmd_report(cfg: RunConfig, args) -> int:
    from .report import write_report
    src = cfg.source()
    texts = write_report(src, normalize(src), args.out, args.lf or None,
                         depth_cap=cfg.depth_cap, state_cap=cfg.state_cap)
    sys.stdout.write(texts["cost.csv"])
    print()
    sys.stdout.write(texts["trace.csv"])
    print(texts["score"])
    print(f"written: {args.out}/cost.csv cost.png trace.csv trace.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grammar", help="grammar file (default: the bundled sample grammar)")
    common.add_argument("--tables", help="generation table file to read (or write, for compile)")
    common.add_argument("--depth", default="1", help="lookahead depth, or 'auto' to optimize")
    common.add_argument("--depth-cap", type=int, default=4)
    common.add_argument("--state-cap", type=int, default=10000)
    common.add_argument("--chain-cap", type=int, default=32)
    common.add_argument("--recursion-cap", type=int, default=64)
    common.add_argument("--format", choices=("text", "golden"), default="text")

    p = argparse.ArgumentParser(prog="surfgen", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", parents=[common], help="compile generation tables")
    c.add_argument("-o", "--out", help="output path (default: --tables or surfgen.tables)")
    c.set_defaults(func=cmd_compile)

    c = sub.add_parser("generate", parents=[common], help="realize a logical form")
    c.add_argument("lf")
    c.add_argument("--limit", type=int, default=0)
    c.add_argument("--cat", help="category to generate (default: the top symbol)")
    c.set_defaults(func=cmd_generate)

    c = sub.add_parser("parse", parents=[common], help="parse a sentence")
    c.add_argument("sentence")
    c.add_argument("--limit", type=int, default=0)
    c.set_defaults(func=cmd_parse)

    c = sub.add_parser("states", parents=[common], help="dump compiled states")
    c.add_argument("which", choices=("parse", "gen"))
    c.set_defaults(func=cmd_states)

    c = sub.add_parser("optimize", parents=[common], help="optimize lookahead depths")
    c.add_argument("--training", help="file of logical forms, one per line")
    c.add_argument("-o", "--out", help="write the optimized tables here")
    c.set_defaults(func=cmd_optimize)

    c = sub.add_parser("compare", parents=[common], help="compare against head-driven generation")
    c.add_argument("lf")
    c.add_argument("--cat", help="category to generate (default: the top symbol)")
    c.set_defaults(func=cmd_compare)

    c = sub.add_parser("report", parents=[common], help="write cost CSVs and charts")
    c.add_argument("lf", nargs="*", help="logical forms (default: a built-in set)")
    c.add_argument("-o", "--out", default="report", help="output directory")
    c.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.grammar, args.tables, args.depth, args.depth_cap, args.state_cap,
                        args.chain_cap, args.recursion_cap, args.format)
        return args.func(cfg, args)
    except GrammarError as e:
        print(f"surfgen: grammar error: {e}", file=sys.stderr)
    except TermSyntaxError as e:
        print(f"surfgen: bad logical form: {e}", file=sys.stderr)
    except (ChainError, TableError, GenerationError, UsageError) as e:
        print(f"surfgen: {e}", file=sys.stderr)
    except OSError as e:
        print(f"surfgen: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

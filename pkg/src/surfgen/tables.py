"""LR-style compilation of generation tables over the inverted grammar.

Items are inverted rules with a dot over the argument positions of their
logical form. From a state, each logical-form pattern that can occur at the
dotted position yields two successors: a *descend* state holding the rules
that can build that argument (dot at 0) and a *goto* state with the dot
advanced past it. Patterns are the argument logical forms abstracted to a
configurable depth; that depth is the semantic lookahead.

States are merged by subsumption: a new state that some existing state
subsumes is dropped in favour of it, and a new state that subsumes an
existing one replaces it (entries are re-pointed, unreachable states are
collected at the end).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .grammar import (
    Constituent, FunctorRule, NormalGrammar, check_offline_parsability, format_constituent,
)
from .invert import (
    DEFAULT_CHAIN_CAP, Chain, ChainError, Extra, InvertedRule, Own, _constituent_terms, goal_key,
    rules_for_goal,
)
from .term import (
    WILDCARD, Atom, AtomClass, Compound, Renamer, Term, apply, canonical_names,
    format_term, fresh_var, parse_term, pattern_to_term, strip_lambdas, subsumes, to_pattern, unify,
    wrap_lambdas,
)

__all__ = [
    "TableError", "DepthConfig", "LexType", "GenItem", "GenState", "GenTables",
    "initial_state", "successors", "compile_tables", "lex_types", "reductive_score",
    "optimize_depths", "format_item", "state_subsumes", "dumps", "loads", "save", "load",
    "FORMAT_VERSION", "TOP_RULE", "format_states",
]

TOP_RULE = "$top"
DEFAULT_STATE_CAP = 10000
DEFAULT_DEPTH_CAP = 4


class TableError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Configuration


@dataclass
class DepthConfig:
    """Semantic lookahead per table entry.

    An entry for a term with functor ``f/n`` abstracts each argument i to
    depth ``d[i]`` (0 gives ``_``); by default every argument gets
    ``default_depth - 1``, so depth 1 exposes only the functor.
    ``overrides`` applies in every state; ``state_overrides`` is keyed by the
    state's item signature (see :meth:`GenState.signature`) and wins.
    """

    default_depth: int = 1
    overrides: dict = field(default_factory=dict)
    state_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.default_depth < 1:
            raise ValueError("lookahead depth must be at least 1")
        for d in itertools.chain(self.overrides.values(), self.state_overrides.values()):
            if any(x < 0 for x in d):
                raise ValueError("argument depths must be nonnegative")

    def arg_depths(self, functor: str, arity: int, state_sig: Optional[str] = None) -> tuple:
        if state_sig is not None:
            d = self.state_overrides.get((state_sig, functor, arity))
            if d is not None:
                return d
        d = self.overrides.get((functor, arity))
        if d is not None:
            return d
        return (self.default_depth - 1,) * arity

    def deepen(self, functor: str, arity: int, index: int) -> "DepthConfig":
        d = list(self.arg_depths(functor, arity))
        d[index] += 1
        ov = dict(self.overrides)
        ov[(functor, arity)] = tuple(d)
        return DepthConfig(self.default_depth, ov, dict(self.state_overrides))

    def describe(self) -> str:
        parts = [f"depth {self.default_depth}"]
        for (f, n), d in sorted(self.overrides.items()):
            parts.append(f"{f}/{n}:{','.join(map(str, d))}")
        for (sig, f, n), d in sorted(self.state_overrides.items()):
            parts.append(f"[{sig}]{f}/{n}:{','.join(map(str, d))}")
        return " ".join(parts)


@dataclass(frozen=True)
class LexType:
    representative: Term
    members: frozenset
    cat: str = ""


def lex_types(g: NormalGrammar) -> list:
    """Group lexicon entries by category and semantic shape (atoms generalized)."""
    groups: dict = {}
    for r in g.functor_rules:
        if not r.lexical:
            continue
        _, body = strip_lambdas(r.lhs.sem)
        shape = _shape(body)
        key = (r.lhs.cat, format_term(shape))
        if key not in groups:
            groups[key] = (shape, [])
        groups[key][1].append(r.id)
    return [LexType(shape, frozenset(ids), cat) for (cat, _), (shape, ids) in groups.items()]


def _shape(t: Term) -> Term:
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_shape(a) for a in t.args))
    return WILDCARD


# --------------------------------------------------------------------------
# Items and states


@dataclass(frozen=True)
class GenItem:
    rule_id: str
    lhs: Constituent
    rhs: tuple
    dot: int

    @property
    def complete(self) -> bool:
        return self.dot >= len(self.rhs)

    def advanced(self) -> "GenItem":
        return GenItem(self.rule_id, self.lhs, self.rhs, self.dot + 1)

    @property
    def text(self) -> str:
        return format_item(self)


def format_item(item: GenItem, with_id: bool = False) -> str:
    terms = _constituent_terms(item.lhs)
    for c in item.rhs:
        terms.extend(_constituent_terms(c))
    names = canonical_names(terms)
    parts = [format_constituent(c, names) for c in item.rhs]
    parts.insert(item.dot, ".")
    s = f"{format_constituent(item.lhs, names)} => {' '.join(parts)}"
    return f"{item.rule_id} {item.dot} | {s}" if with_id else s


def _ctree(c: Constituent) -> Term:
    return Compound("c", (Atom(c.cat), c.sem) + tuple(_ctree(a) for a in c.args)) \
        if c.args else Compound("c", (Atom(c.cat), c.sem))


def _item_term(it: GenItem) -> Term:
    return Compound("item", (Atom(it.rule_id), Atom(str(it.dot)), _ctree(it.lhs))
                    + tuple(_ctree(c) for c in it.rhs))


@dataclass(eq=False)
class GenState:
    id: int
    items: tuple

    @property
    def signature(self) -> str:
        return ";".join(sorted(it.text for it in self.items))

    @property
    def shape(self) -> tuple:
        return tuple(sorted((it.rule_id, it.dot) for it in self.items))

    @property
    def reductive(self) -> bool:
        return any(it.complete for it in self.items)


def state_subsumes(a: Sequence[GenItem], b: Sequence[GenItem]) -> bool:
    """A bijection of items where every item of ``a`` subsumes its image in ``b``."""
    if len(a) != len(b):
        return False
    at = [(_item_term(x), x.rule_id, x.dot) for x in a]
    bt = [(_item_term(y), y.rule_id, y.dot) for y in b]
    used = [False] * len(bt)

    def go(i):
        if i == len(at):
            return True
        ta, ra, da = at[i]
        for j, (tb, rb, db) in enumerate(bt):
            if not used[j] and ra == rb and da == db and subsumes(ta, tb):
                used[j] = True
                if go(i + 1):
                    return True
                used[j] = False
        return False

    return go(0)


@dataclass
class GenTables:
    top: str
    states: list
    descend: dict
    goto: dict
    reduce: dict
    rules: dict
    types: dict
    lookahead: DepthConfig

    def state(self, sid: int) -> GenState:
        return self.states[sid - 1]

    def expand(self, rule_id: str) -> list:
        """The concrete inverted rules behind a reduce entry."""
        members = self.types.get(rule_id)
        if members is None:
            return [self.rules[rule_id]]
        return [self.rules[m] for m in members]

    def dumps(self) -> str:
        return dumps(self)


# --------------------------------------------------------------------------
# Compilation


def _top_rule(top: str) -> InvertedRule:
    x = fresh_var("X")
    return InvertedRule(TOP_RULE, Constituent(top + "'", Compound("f", (x,))),
                        (Constituent(top, x),), (Own(0),), ())


def initial_state(top: str) -> GenState:
    r = _top_rule(top)
    return GenState(1, (GenItem(r.id, r.lhs, r.rhs, 0),))


class _Compiler:
    def __init__(self, g: NormalGrammar, cfg: DepthConfig, chain_cap: int, lex_typing: bool):
        self.g = g
        self.cfg = cfg
        self.chain_cap = chain_cap
        self.lex_typing = lex_typing
        self.goal_rules: dict = {}
        self.rules: dict = {}
        self.types: dict = {}
        self.pattern_memo: dict = {}
        top = _top_rule(g.top)
        self.rules[top.id] = top

    def effective_rules(self, c: Constituent) -> list:
        key = goal_key(c)
        found = self.goal_rules.get(key)
        if found is not None:
            return found
        rules = rules_for_goal(self.g, c, self.chain_cap)
        for r in rules:
            if r.id in self.rules and self.rules[r.id] is not r:
                raise TableError(f"inverted rule id clash: {r.id}")
            self.rules[r.id] = r
        out = rules
        if self.lex_typing:
            out = self._typed(rules)
        self.goal_rules[key] = out
        return out

    def _typed(self, rules: list) -> list:
        groups: dict = {}
        for r in rules:
            if (not r.rhs and isinstance(r.lf, Atom) and not r.extras and not r.lhs.args
                    and isinstance(r.lhs.sem, Atom)):
                groups.setdefault(r.lhs.cat, []).append(r)
        out = []
        emitted = set()
        for r in rules:
            grp = groups.get(r.lhs.cat) if r in groups.get(r.lhs.cat, ()) else None
            if not grp or len(grp) < 2:
                out.append(r)
                continue
            if r.lhs.cat in emitted:
                continue
            emitted.add(r.lhs.cat)
            tid = "|".join(m.id for m in grp)
            rep = AtomClass(tuple(m.lf.name for m in grp))
            trule = InvertedRule(tid, Constituent(r.lhs.cat, rep), (), (), ())
            self.rules[tid] = trule
            self.types[tid] = tuple(m.id for m in grp)
            out.append(trule)
        return out

    # patterns -----------------------------------------------------------

    def goal_patterns(self, c: Constituent, k: int) -> list:
        if k <= 0:
            return [WILDCARD]
        key = (goal_key(c), k)
        memo = self.pattern_memo.get(key)
        if memo is not None:
            return memo
        self.pattern_memo[key] = []  # cut recursion on cyclic goals at equal depth
        out, seen = [], set()
        for r in self.effective_rules(c):
            for p in self.rule_patterns(r, None, uniform=k - 1):
                s = format_term(p)
                if s not in seen:
                    seen.add(s)
                    out.append(p)
        self.pattern_memo[key] = out
        return out

    def rule_patterns(self, r: InvertedRule, state_sig: Optional[str], uniform: Optional[int] = None) -> list:
        body = r.lf
        if not isinstance(body, Compound):
            return [to_pattern(body)]
        n = len(body.args)
        if uniform is not None:
            depths = (uniform,) * n
        else:
            depths = self.cfg.arg_depths(body.functor, n, state_sig)
        choices = [self.goal_patterns(r.rhs[i], depths[i]) for i in range(n)]
        out, seen = [], set()
        for combo in itertools.product(*choices):
            s: Optional[dict] = {}
            for t, p in zip(body.args, combo):
                s = unify(t, pattern_to_term(p), s)
                if s is None:
                    break
            if s is None:
                continue
            p = Compound(body.functor, tuple(to_pattern(apply(s, t), d)
                                             for t, d in zip(body.args, depths)))
            key = format_term(p)
            if key not in seen:
                seen.add(key)
                out.append(p)
        return out

    # successors ---------------------------------------------------------

    def successors(self, items: Sequence[GenItem], state_sig: Optional[str]) -> list:
        entries: dict = {}
        order: list = []
        for it in items:
            if it.complete:
                continue
            c = it.rhs[it.dot]
            body = strip_lambdas(c.sem)[1]
            for r in self.effective_rules(c):
                for p in self.rule_patterns(r, state_sig):
                    if unify(pattern_to_term(p), body) is None:
                        continue
                    key = format_term(p)
                    e = entries.get(key)
                    if e is None:
                        e = entries[key] = (p, {}, {})
                        order.append(key)
                    d = _specialize(r, p)
                    e[1].setdefault(format_item(d, with_id=True), d)
                    adv = it.advanced()
                    e[2].setdefault(format_item(adv, with_id=True), adv)
        return [(entries[k][0], tuple(entries[k][1].values()), tuple(entries[k][2].values()))
                for k in order]


def _specialize(r: InvertedRule, p: Term) -> GenItem:
    ren = Renamer()
    lhs = _ren_c(r.lhs, ren)
    rhs = tuple(_ren_c(c, ren) for c in r.rhs)
    _, body = strip_lambdas(lhs.sem)
    s = unify(body, pattern_to_term(p))
    if s is None:
        raise TableError(f"pattern {format_term(p)} does not fit rule {r.id}")
    return GenItem(r.id, _sub(lhs, s), tuple(_sub(c, s) for c in rhs), 0)


def _ren_c(c: Constituent, ren: Renamer) -> Constituent:
    return Constituent(c.cat, ren(c.sem), tuple(_ren_c(a, ren) for a in c.args))


def _sub(c: Constituent, s) -> Constituent:
    return Constituent(c.cat, apply(s, c.sem), tuple(_sub(a, s) for a in c.args))


def successors(state: GenState, g: NormalGrammar, cfg: Optional[DepthConfig] = None,
               lex_typing: bool = True) -> list:
    """(pattern, descend items, goto items) for each pattern at the dotted positions."""
    comp = _Compiler(g, cfg or DepthConfig(), DEFAULT_CHAIN_CAP, lex_typing)
    return comp.successors(state.items, state.signature)


class _Node:
    __slots__ = ("items", "sig", "shape", "edges", "dead", "replaced_by", "done")

    def __init__(self, items):
        self.items = tuple(items)
        self.sig = ";".join(sorted(it.text for it in self.items))
        self.shape = tuple(sorted((it.rule_id, it.dot) for it in self.items))
        self.edges: list = []
        self.dead = False
        self.replaced_by = None
        self.done = False


def compile_tables(g: NormalGrammar, top: Optional[str] = None, cfg: Optional[DepthConfig] = None,
                   state_cap: int = DEFAULT_STATE_CAP, chain_cap: int = DEFAULT_CHAIN_CAP,
                   lex_typing: bool = True) -> GenTables:
    """Compile descend/goto/reduce tables for generating from ``top``."""
    report = check_offline_parsability(g)
    if not report.ok:
        raise ChainError(str(report))
    top = top or g.top
    cfg = cfg or DepthConfig()
    if top != g.top:
        g = NormalGrammar(g.rules, top)
    comp = _Compiler(g, cfg, chain_cap, lex_typing)
    init = _Node(initial_state(top).items)
    by_sig = {init.sig: init}
    by_shape = {init.shape: [init]}
    count = [1]

    def intern(items) -> tuple:
        node = _Node(items)
        hit = by_sig.get(node.sig)
        if hit is not None and not hit.dead:
            return hit, False
        peers = [p for p in by_shape.get(node.shape, ()) if not p.dead]
        for p in peers:
            if state_subsumes(p.items, node.items):
                return p, False
        for p in peers:
            if state_subsumes(node.items, p.items):
                p.dead = True
                p.replaced_by = node
        count[0] += 1
        if count[0] > state_cap:
            raise TableError(f"more than {state_cap} generation states")
        by_sig[node.sig] = node
        by_shape.setdefault(node.shape, []).append(node)
        return node, True

    stack = [init]
    while stack:
        node = stack.pop()
        if node.dead or node.done:
            continue
        node.done = True
        fresh = []
        for p, down, across in comp.successors(node.items, node.sig):
            d, new_d = intern(down)
            a, new_a = intern(across)
            node.edges.append((p, d, a))
            if new_d:
                fresh.append(d)
            if new_a:
                fresh.append(a)
        stack.extend(reversed(fresh))

    def live(n):
        while n.replaced_by is not None:
            n = n.replaced_by
        return n

    ids: dict = {}
    ordered: list = []

    def visit(n):
        n = live(n)
        if id(n) in ids:
            return
        ids[id(n)] = len(ordered) + 1
        ordered.append(n)
        for p, d, a in n.edges:
            visit(d)
            visit(a)

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        visit(init)
    finally:
        sys.setrecursionlimit(old)

    states, descend, goto, reduce = [], {}, {}, {}
    for n in ordered:
        sid = ids[id(n)]
        states.append(GenState(sid, n.items))
        for p, d, a in n.edges:
            descend.setdefault(sid, []).append((p, ids[id(live(d))]))
            goto.setdefault(sid, {})[format_term(p)] = ids[id(live(a))]
        red = []
        for it in n.items:
            if it.complete and it.rule_id not in red:
                red.append(it.rule_id)
        if red:
            reduce[sid] = red
    used = {TOP_RULE}
    for red in reduce.values():
        for rid in red:
            used.add(rid)
            used.update(comp.types.get(rid, ()))
    for st in states:
        for it in st.items:
            used.add(it.rule_id)
            used.update(comp.types.get(it.rule_id, ()))
    rules = {k: v for k, v in comp.rules.items() if k in used}
    types = {k: v for k, v in comp.types.items() if k in used}
    return GenTables(top, states, descend, goto, reduce, rules, types, cfg)


def format_states(t: GenTables, rule_ids: bool = False) -> str:
    """Readable listing of every state with its descend, goto and reduce entries."""
    lines = []
    for st in t.states:
        lines.append(f"State {st.id}")
        for it in st.items:
            lines.append("  " + format_item(it, with_id=rule_ids))
        for p, x in t.descend.get(st.id, ()):
            key = format_term(p)
            lines.append(f"  descend {key} {x}")
            lines.append(f"  goto {key} {t.goto[st.id][key]}")
        for rid in t.reduce.get(st.id, ()):
            lines.append(f"  reduce {rid}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Scores and optimization


def reductive_score(t: GenTables, only: Optional[Iterable[int]] = None) -> tuple:
    """(max, mean) number of reduce candidates over reductive states."""
    sel = set(only) if only is not None else None
    counts = [len(v) for k, v in t.reduce.items() if sel is None or k in sel]
    if not counts:
        return 0, Fraction(0)
    return max(counts), Fraction(sum(counts), len(counts))


def _functor_sigs(t: GenTables) -> list:
    out = []
    for r in t.rules.values():
        if r.id == TOP_RULE:
            continue
        body = r.lf
        if isinstance(body, Compound) and (body.functor, len(body.args)) not in out:
            out.append((body.functor, len(body.args)))
    return out


def optimize_depths(g: NormalGrammar, top: Optional[str] = None,
                    training: Optional[Sequence[Term]] = None, depth_cap: int = DEFAULT_DEPTH_CAP,
                    trace: Optional[list] = None, state_cap: int = DEFAULT_STATE_CAP,
                    lex_typing: bool = True) -> DepthConfig:
    """Greedy iterative deepening of per-argument lookahead.

    Each round tries deepening one argument position of one functor by one
    level and keeps the change that most improves (worst reductive state,
    state count); it stops when nothing improves or every position is at
    ``depth_cap``. With ``training`` logical forms only the reductive states
    visited while generating them are scored.
    """
    cfg = DepthConfig(1)

    def score(c):
        t = compile_tables(g, top, c, state_cap=state_cap, lex_typing=lex_typing)
        if training is None:
            m = reductive_score(t)[0]
        else:
            from .engine import visited_reductive_states
            m = reductive_score(t, visited_reductive_states(t, training))[0]
        return (m, len(t.states)), t

    best, tables = score(cfg)
    if trace is not None:
        trace.append((cfg.describe(), best[0], best[1]))
    while True:
        cands = []
        for f, n in _functor_sigs(tables):
            cur = cfg.arg_depths(f, n)
            for i in range(n):
                if cur[i] + 1 > depth_cap - 1:
                    continue
                c2 = cfg.deepen(f, n, i)
                try:
                    s2, t2 = score(c2)
                except TableError:
                    continue
                cands.append((s2, c2, t2))
        if not cands:
            break
        s2, c2, t2 = min(cands, key=lambda x: x[0])
        if s2 >= best:
            break
        best, cfg, tables = s2, c2, t2
        if trace is not None:
            trace.append((cfg.describe(), best[0], best[1]))
    return cfg


# --------------------------------------------------------------------------
# Table files
#
# JSON Lines, one record per rule, state, item or table entry, with terms in
# the textual syntax. Variables are named canonically per rule or item, so
# dumping a loaded file reproduces it byte for byte.

FORMAT_NAME = "surfgen-tables"
FORMAT_VERSION = 1


def _c_out(c: Constituent, names) -> dict:
    d = {"cat": c.cat, "sem": format_term(c.sem, names)}
    if c.args:
        d["args"] = [_c_out(a, names) for a in c.args]
    return d


def _c_in(d: dict, scope: dict) -> Constituent:
    return Constituent(d["cat"], parse_term(d["sem"], scope, pattern=True),
                       tuple(_c_in(a, scope) for a in d.get("args", ())))


def _tpl_out(items) -> list:
    out = []
    for it in items:
        if isinstance(it, Own):
            out.append(["own", it.slot])
        elif isinstance(it, Extra):
            out.append(["extra", it.slot, it.arg])
        else:
            out.append(["tok", it])
    return out


def _tpl_in(items) -> tuple:
    out = []
    for it in items:
        if it[0] == "own":
            out.append(Own(it[1]))
        elif it[0] == "extra":
            out.append(Extra(it[1], it[2]))
        else:
            out.append(it[1])
    return tuple(out)


def _names(*cs) -> dict:
    terms = []
    for c in cs:
        terms.extend(_constituent_terms(c))
    return canonical_names(terms)


def _depths_out(cfg: DepthConfig) -> dict:
    return {
        "default": cfg.default_depth,
        "overrides": [[f, n, list(d)] for (f, n), d in sorted(cfg.overrides.items())],
        "state_overrides": [[sig, f, n, list(d)]
                            for (sig, f, n), d in sorted(cfg.state_overrides.items())],
    }


def _rec(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def dumps(t: GenTables) -> str:
    lines = [_rec({"format": FORMAT_NAME, "version": FORMAT_VERSION, "top": t.top,
                   "lookahead": _depths_out(t.lookahead)})]
    for r in t.rules.values():
        names = _names(r.lhs, *r.rhs)
        d = {"rule": r.id, "lhs": _c_out(r.lhs, names),
             "rhs": [_c_out(c, names) for c in r.rhs],
             "template": _tpl_out(r.template),
             "extras": [_tpl_out(e) for e in r.extras]}
        if r.provenance is not None:
            d["chain"] = list(r.provenance.rule_ids)
        lines.append(_rec(d))
    for k, v in t.types.items():
        lines.append(_rec({"type": k, "members": list(v)}))
    for st in t.states:
        lines.append(_rec({"state": st.id}))
        for it in st.items:
            names = _names(it.lhs, *it.rhs)
            lines.append(_rec({"item": it.rule_id, "dot": it.dot, "lhs": _c_out(it.lhs, names),
                               "rhs": [_c_out(c, names) for c in it.rhs]}))
        for p, x in t.descend.get(st.id, ()):
            key = format_term(p)
            lines.append(_rec({"descend": key, "to": x}))
            lines.append(_rec({"goto": key, "to": t.goto[st.id][key]}))
        for rid in t.reduce.get(st.id, ()):
            lines.append(_rec({"reduce": rid}))
    return "\n".join(lines) + "\n"


def loads(text: str) -> GenTables:
    """Read a table file; records are JSON objects, one per line, in state order."""
    recs = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            recs.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise TableError(f"not a table file (line {n}): {e}") from None
    if not recs or not isinstance(recs[0], dict) or recs[0].get("format") != FORMAT_NAME:
        raise TableError("not a table file")
    head = recs[0]
    if head.get("version") != FORMAT_VERSION:
        raise TableError(f"unsupported table file version {head.get('version')!r}")
    rules, types = {}, {}
    states, descend, goto, reduce = [], {}, {}, {}
    items: list = []
    sid = None

    def close():
        if sid is not None:
            states.append(GenState(sid, tuple(items)))

    try:
        la = head["lookahead"]
        cfg = DepthConfig(la["default"],
                          {(f, n): tuple(d) for f, n, d in la["overrides"]},
                          {(sig, f, n): tuple(d) for sig, f, n, d in la["state_overrides"]})
        for d in recs[1:]:
            if "rule" in d:
                scope: dict = {}
                chain = d.get("chain")
                prov = Chain(tuple(chain[:-1]), chain[-1]) if chain else None
                rules[d["rule"]] = InvertedRule(
                    d["rule"], _c_in(d["lhs"], scope), tuple(_c_in(c, scope) for c in d["rhs"]),
                    _tpl_in(d["template"]), tuple(_tpl_in(e) for e in d["extras"]), prov)
            elif "type" in d:
                types[d["type"]] = tuple(d["members"])
            elif "state" in d:
                close()
                sid, items = d["state"], []
            elif "item" in d:
                scope = {}
                items.append(GenItem(d["item"], _c_in(d["lhs"], scope),
                                     tuple(_c_in(c, scope) for c in d["rhs"]), d["dot"]))
            elif "descend" in d:
                descend.setdefault(sid, []).append((parse_term(d["descend"]), d["to"]))
            elif "goto" in d:
                goto.setdefault(sid, {})[d["goto"]] = d["to"]
            elif "reduce" in d:
                reduce.setdefault(sid, []).append(d["reduce"])
            else:
                raise TableError(f"unknown record {sorted(d)}")
        close()
    except (KeyError, TypeError, ValueError) as e:
        raise TableError(f"malformed table file: {e}") from None
    if [s.id for s in states] != list(range(1, len(states) + 1)):
        raise TableError("malformed table file: state ids are not 1..n")
    return GenTables(head["top"], states, descend, goto, reduce, rules, types, cfg)


def save(t: GenTables, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(t))


def load(path) -> GenTables:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())

"""Generators: the table-driven one and a semantic-head-driven reference.

Both stream realizations lazily and count their search effort, so the two
can be compared on the same logical form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .grammar import Constituent, Grammar, NormalGrammar, semantic_head
from .invert import DEFAULT_CHAIN_CAP, Extra, InvertedRule, Own
from .tables import TOP_RULE, GenTables
from .term import (
    Atom, AtomClass, Compound, Renamer, Term, Var, apply, format_term, is_ground, matches,
    strip_lambdas, unify, walk,
)

__all__ = [
    "GenerationError", "Derivation", "Realization", "GenSession", "generate",
    "shdg_generate", "ShdgSession", "compare_cost", "visited_reductive_states",
    "DEFAULT_RECURSION_CAP",
]

DEFAULT_RECURSION_CAP = 64


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Derivation:
    rule_id: str
    children: tuple = ()

    def __str__(self) -> str:
        if not self.children:
            return self.rule_id
        return f"{self.rule_id}({', '.join(map(str, self.children))})"

    def rule_ids(self) -> Iterator[str]:
        yield self.rule_id
        for c in self.children:
            yield from c.rule_ids()


@dataclass(frozen=True)
class Realization:
    tokens: tuple
    derivation: Derivation

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class _Built:
    con: Constituent
    own: tuple
    extras: tuple
    deriv: Derivation


def _render(template, children) -> tuple:
    out: list = []
    for it in template:
        if isinstance(it, Own):
            out.extend(children[it.slot].own)
        elif isinstance(it, Extra):
            out.extend(children[it.slot].extras[it.arg])
        else:
            out.append(it)
    return tuple(out)


def _unify_con(a: Constituent, b: Constituent, s):
    if a.cat != b.cat or len(a.args) != len(b.args):
        return None
    s = unify(a.sem, b.sem, s)
    for x, y in zip(a.args, b.args):
        if s is None:
            return None
        s = _unify_con(x, y, s)
    return s


def _ren(c: Constituent, ren: Renamer) -> Constituent:
    return Constituent(c.cat, ren(c.sem), tuple(_ren(a, ren) for a in c.args))


def _sub(c: Constituent, s) -> Constituent:
    return Constituent(c.cat, apply(s, c.sem), tuple(_sub(a, s) for a in c.args))


def _lf_args(t: Term) -> tuple:
    return t.args if isinstance(t, Compound) else ()


# --------------------------------------------------------------------------
# Table-driven generation


@dataclass
class GenSession:
    """One generation run over shared tables; not thread-safe, cheap to create."""

    tables: GenTables
    recursion_cap: int = DEFAULT_RECURSION_CAP
    stack: list = field(default_factory=list)
    descend_attempts: int = 0
    goto_steps: int = 0
    reduce_attempts: int = 0
    backtracks: int = 0
    visited: set = field(default_factory=set)

    @property
    def attempts(self) -> int:
        return self.descend_attempts + self.goto_steps + self.reduce_attempts

    def run(self, lf: Term) -> Iterator[Realization]:
        if not is_ground(lf):
            raise GenerationError(f"logical form is not ground: {format_term(lf)}")
        seen = set()
        for b in self._build(1, Compound("f", (lf,)), 0):
            if b.deriv in seen:
                continue
            seen.add(b.deriv)
            yield Realization(b.own, b.deriv)

    def _build(self, state: int, t: Term, depth: int) -> Iterator[_Built]:
        if depth > self.recursion_cap:
            raise GenerationError(f"more than {self.recursion_cap} nested descends")
        self.visited.add(state)
        yield from self._run(state, t, _lf_args(t), 0, depth)

    def _run(self, cur: int, t: Term, args: tuple, i: int, depth: int) -> Iterator[_Built]:
        if i == len(args):
            yield from self._reduce(cur, t, i)
            return
        a = args[i]
        for p, target in self.tables.descend.get(cur, ()):
            self.descend_attempts += 1
            if not matches(p, a):
                continue
            for child in self._build(target, a, depth + 1):
                self.goto_steps += 1
                nxt = self.tables.goto[cur][format_term(p)]
                self.stack.append(child)
                try:
                    yield from self._run(nxt, t, args, i + 1, depth)
                finally:
                    self.stack.pop()
            self.backtracks += 1

    def _reduce(self, cur: int, t: Term, n: int) -> Iterator[_Built]:
        self.visited.add(cur)
        cands = self.tables.reduce.get(cur, ())
        if not cands:
            return
        popped = self.stack[len(self.stack) - n:] if n else []
        del self.stack[len(self.stack) - n:]
        try:
            for rid in cands:
                self.reduce_attempts += 1
                members = self.tables.types.get(rid)
                if members is None:
                    rules = [self.tables.rules[rid]]
                else:
                    rules = [self.tables.rules[m] for m in members
                             if self.tables.rules[m].lf == t]
                for r in rules:
                    out = self._apply(r, t, popped)
                    if out is not None:
                        yield out
        finally:
            self.stack.extend(popped)

    def _apply(self, r: InvertedRule, t: Term, children: Sequence[_Built]) -> Optional[_Built]:
        ren = Renamer()
        lhs = _ren(r.lhs, ren)
        s = unify(strip_lambdas(lhs.sem)[1], t)
        if s is None:
            return None
        for c, b in zip(r.rhs, children):
            s = _unify_con(_ren(c, ren), b.con, s)
            if s is None:
                return None
        if r.id == TOP_RULE:
            return children[0]
        own = _render(r.template, children)
        extras = tuple(_render(e, children) for e in r.extras)
        return _Built(_sub(lhs, s), own, extras, Derivation(r.id, tuple(b.deriv for b in children)))


def generate(t: GenTables, g: Optional[NormalGrammar] = None, lf: Optional[Term] = None,
             session: Optional[GenSession] = None) -> Iterator[Realization]:
    """Stream every realization of ``lf``; ``g`` is accepted for symmetry and unused."""
    if lf is None:
        raise TypeError("generate() needs a logical form")
    s = session or GenSession(t)
    return s.run(lf)


def visited_reductive_states(t: GenTables, lfs: Iterable[Term]) -> set:
    """Reductive states reached while generating each of ``lfs``."""
    out = set()
    for lf in lfs:
        s = GenSession(t)
        for _ in s.run(lf):
            pass
        out |= {x for x in s.visited if x in t.reduce}
    return out


# --------------------------------------------------------------------------
# Semantic-head-driven reference generator


@dataclass
class ShdgSession:
    grammar: Grammar
    chain_cap: int = DEFAULT_CHAIN_CAP
    attempts: int = 0

    def __post_init__(self):
        self.pivots = []
        self.chains: dict = {}
        for r in self.grammar.rules:
            h = semantic_head(r)
            if h is None:
                self.pivots.append(r)
            else:
                self.chains.setdefault(r.rhs[h].cat, []).append((r, h))

    def run(self, cat: str, lf: Term) -> Iterator[Realization]:
        if not is_ground(lf):
            raise GenerationError(f"logical form is not ground: {format_term(lf)}")
        goal = Constituent(cat, lf)
        for s, words, d in self._gen(goal, {}, 0):
            yield Realization(words, d)

    def _gen(self, goal: Constituent, s, depth: int):
        if depth > DEFAULT_RECURSION_CAP:
            raise GenerationError(f"more than {DEFAULT_RECURSION_CAP} nested sub-generations")
        body = walk(strip_lambdas(apply(s, goal.sem))[1], s)
        if isinstance(body, Var):
            return
        for r in self.pivots:
            self.attempts += 1
            ren = Renamer()
            lhs = _ren(r.lhs, ren)
            s1 = unify(strip_lambdas(lhs.sem)[1], body, s)
            if s1 is None:
                continue
            rhs = [_ren(c, ren) for c in r.rhs]
            for s2, parts, ds in self._gen_all(rhs, s1, depth):
                words = tuple(r.tokens) if r.lexical else tuple(w for p in parts for w in p)
                yield from self._connect(lhs, goal, s2, words, Derivation(r.id, ds), 0, depth)

    def _gen_all(self, cs, s, depth):
        if not cs:
            yield s, (), ()
            return
        for s1, w, d in self._gen(cs[0], s, depth + 1):
            for s2, ws, ds in self._gen_all(cs[1:], s1, depth):
                yield s2, (w,) + ws, (d,) + ds

    def _connect(self, lower: Constituent, goal: Constituent, s, words, d, links: int, depth):
        if lower.cat == goal.cat:
            s1 = unify(lower.sem, goal.sem, s)
            if s1 is not None:
                yield s1, words, d
        if links >= self.chain_cap:
            raise GenerationError(f"chain longer than {self.chain_cap} rules")
        for r, h in self.chains.get(lower.cat, ()):
            self.attempts += 1
            ren = Renamer()
            lhs = _ren(r.lhs, ren)
            rhs = [_ren(c, ren) for c in r.rhs]
            s1 = unify(rhs[h].sem, lower.sem, s)
            if s1 is None:
                continue
            others = rhs[:h] + rhs[h + 1:]
            for s2, parts, ds in self._gen_all(others, s1, depth):
                parts = parts[:h] + (words,) + parts[h:]
                ds = ds[:h] + (d,) + ds[h:]
                yield from self._connect(lhs, goal, s2, tuple(w for p in parts for w in p),
                                         Derivation(r.id, ds), links + 1, depth)


def shdg_generate(g: Grammar, cat: str, lf: Term,
                  session: Optional[ShdgSession] = None) -> Iterator[Realization]:
    s = session or ShdgSession(g)
    return s.run(cat, lf)


def compare_cost(g: Grammar, t: GenTables, lf: Term, cat: Optional[str] = None) -> tuple:
    """(shdg_attempts, table_attempts) after exhausting both streams."""
    sh = ShdgSession(g)
    for _ in sh.run(cat or t.top, lf):
        pass
    gs = GenSession(t)
    for _ in gs.run(lf):
        pass
    return sh.attempts, gs.attempts

"""LR(0) parsing over the grammar's context-free backbone.

Categories defined only by lexicon entries are preterminals and act as the
terminal symbols of the automaton; the lexer maps each word to every entry
that emits it. The parser is nondeterministic: every shift/reduce choice is
explored by backtracking, and reductions unify the attributed rule against
the popped constituents, so each complete parse yields a logical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .grammar import Constituent, Grammar
from .term import Renamer, apply, unify

__all__ = [
    "ParseItem", "ParseState", "ParseTables", "compile_parse_tables", "lr_parse",
    "format_parse_item", "enumerate_sentences", "DUMMY",
]

DUMMY = "$start"


@dataclass(frozen=True)
class ParseItem:
    rule: int
    dot: int


@dataclass(frozen=True)
class ParseState:
    id: int
    kernel: tuple
    items: tuple


@dataclass
class ParseTables:
    top: str
    productions: list          # (rule id, lhs, rhs symbols); index 0 is the dummy rule
    terminals: frozenset
    states: list
    transitions: dict          # (state, symbol) -> state
    reductions: dict           # state -> production indices
    accepting: frozenset

    def item_text(self, it: ParseItem) -> str:
        return format_parse_item(self, it)

    def dumps(self) -> str:
        lines = []
        for st in self.states:
            lines.append(f"State {st.id}")
            for it in st.items:
                mark = "" if it in st.kernel else "  +"
                lines.append(f"  {self.item_text(it)}{mark}")
            for (sid, sym), target in self.transitions.items():
                if sid == st.id:
                    kind = "shift" if sym in self.terminals else "goto"
                    lines.append(f"  {kind} {sym} {target}")
            for p in self.reductions.get(st.id, ()):
                lines.append(f"  reduce {self.productions[p][0]}")
            if st.id in self.accepting:
                lines.append("  accept")
        return "\n".join(lines) + "\n"


def _word(w: str) -> str:
    return '"' + w + '"'


def format_parse_item(t: ParseTables, it: ParseItem) -> str:
    _, lhs, rhs = t.productions[it.rule]
    syms = list(rhs)
    syms.insert(it.dot, ".")
    return f"{lhs} => {' '.join(syms)}"


def _backbone(g: Grammar):
    cats_with_phrasal = {r.lhs.cat for r in g.rules if r.rhs}
    preterminals = {r.lhs.cat for r in g.rules} - cats_with_phrasal
    prods = [(DUMMY, g.top + "'", (g.top,))]
    src = [None]
    for r in g.rules:
        if r.rhs:
            prods.append((r.id, r.lhs.cat, tuple(c.cat for c in r.rhs)))
            src.append(r)
        elif r.lhs.cat in cats_with_phrasal:
            prods.append((r.id, r.lhs.cat, tuple(_word(w) for w in r.tokens)))
            src.append(r)
    nonterms = {p[1] for p in prods}
    terminals = set(preterminals)
    for _, _, rhs in prods:
        terminals.update(s for s in rhs if s not in nonterms)
    return prods, src, frozenset(terminals), nonterms


def compile_parse_tables(g: Grammar) -> ParseTables:
    """Canonical LR(0) item sets, numbered in order of discovery."""
    prods, _, terminals, nonterms = _backbone(g)
    by_lhs: dict = {}
    for i, (_, lhs, _) in enumerate(prods):
        by_lhs.setdefault(lhs, []).append(i)

    def closure(kernel):
        items = list(kernel)
        seen = set(items)
        k = 0
        while k < len(items):
            it = items[k]
            k += 1
            rhs = prods[it.rule][2]
            if it.dot < len(rhs) and rhs[it.dot] in nonterms:
                for p in by_lhs[rhs[it.dot]]:
                    new = ParseItem(p, 0)
                    if new not in seen:
                        seen.add(new)
                        items.append(new)
        return tuple(items)

    start = (ParseItem(0, 0),)
    states = [ParseState(1, start, closure(start))]
    index = {frozenset(start): 1}
    transitions: dict = {}
    k = 0
    while k < len(states):
        st = states[k]
        k += 1
        order: list = []
        moved: dict = {}
        for it in st.items:
            rhs = prods[it.rule][2]
            if it.dot < len(rhs):
                sym = rhs[it.dot]
                if sym not in moved:
                    moved[sym] = []
                    order.append(sym)
                moved[sym].append(ParseItem(it.rule, it.dot + 1))
        for sym in order:
            kern = tuple(moved[sym])
            key = frozenset(kern)
            sid = index.get(key)
            if sid is None:
                sid = len(states) + 1
                index[key] = sid
                states.append(ParseState(sid, kern, closure(kern)))
            transitions[(st.id, sym)] = sid
    reductions: dict = {}
    accepting = set()
    for st in states:
        for it in st.items:
            if it.dot == len(prods[it.rule][2]):
                if it.rule == 0:
                    accepting.add(st.id)
                else:
                    reductions.setdefault(st.id, []).append(it.rule)
    return ParseTables(g.top, prods, terminals, states, transitions, reductions,
                       frozenset(accepting))


def _ren(c: Constituent, ren: Renamer) -> Constituent:
    return Constituent(c.cat, ren(c.sem), tuple(_ren(a, ren) for a in c.args))


def lr_parse(t: ParseTables, g: Grammar, tokens: Sequence[str],
             reduce_guard: int = 64) -> Iterator:
    """Stream the logical form of every complete parse of ``tokens``.

    The stack alternates states and constituents; ``reduce_guard`` bounds
    the reductions between two shifts, which only matters for grammars with
    unit-rule cycles.
    """
    prods, src, _, _ = _backbone(g)
    lex: dict = {}
    for r in g.rules:
        if not r.rhs:
            lex.setdefault(r.tokens[0] if r.tokens else "", []).append(r)
    tokens = tuple(tokens)
    n = len(tokens)

    def check(stack):
        assert len(stack) % 2 == 1 and isinstance(stack[0], int)
        for j, x in enumerate(stack):
            assert isinstance(x, int) if j % 2 == 0 else isinstance(x, (Constituent, str))

    def step(stack: tuple, i: int, s: dict, since_shift: int):
        check(stack)
        state = stack[-1]
        if i == n and state in t.accepting:
            yield apply(s, stack[-2].sem)
        if i < n:
            for r in lex.get(tokens[i], ()):
                k = len(r.tokens)
                if tokens[i:i + k] != tuple(r.tokens):
                    continue
                target = t.transitions.get((state, r.lhs.cat))
                if target is None:
                    continue
                if r.lhs.cat not in t.terminals:
                    continue
                c = _ren(r.lhs, Renamer())
                yield from step(stack + (c, target), i + k, s, 0)
            target = t.transitions.get((state, _word(tokens[i])))
            if target is not None:
                yield from step(stack + (tokens[i], target), i + 1, s, 0)
        if since_shift >= reduce_guard:
            return
        for p in t.reductions.get(state, ()):
            r = src[p]
            k = len(prods[p][2])
            popped = stack[len(stack) - 2 * k:]
            rest = stack[:len(stack) - 2 * k]
            ren = Renamer()
            lhs = _ren(r.lhs, ren)
            s1: Optional[dict] = s
            if r.rhs:
                for c, got in zip(r.rhs, popped[0::2]):
                    if c.cat != got.cat:
                        s1 = None
                        break
                    s1 = unify(ren(c.sem), got.sem, s1)
                    if s1 is None:
                        break
            if s1 is None:
                continue
            target = t.transitions.get((rest[-1], lhs.cat))
            if target is None:
                continue
            yield from step(rest + (lhs, target), i, s1, since_shift + 1)

    yield from step((1,), 0, {}, 0)


def enumerate_sentences(g: Grammar, max_len: int, cat: Optional[str] = None) -> list:
    """Every token sequence of length <= ``max_len`` the backbone derives from ``cat``."""
    cat = cat or g.top
    table: dict = {}

    def get(c, length):
        return table.get((c, length), set())

    def splits(rhs, length):
        if not rhs:
            if length == 0:
                yield ()
            return
        for l0 in range(1, length - len(rhs) + 2):
            for head in get(rhs[0], l0):
                for tail in splits(rhs[1:], length - l0):
                    yield head + tail

    for length in range(1, max_len + 1):
        changed = True
        while changed:
            changed = False
            for r in g.rules:
                if r.rhs:
                    new = set(splits(tuple(c.cat for c in r.rhs), length))
                elif len(r.tokens) == length:
                    new = {tuple(r.tokens)}
                else:
                    continue
                cur = table.setdefault((r.lhs.cat, length), set())
                if not new <= cur:
                    cur |= new
                    changed = True
    out = []
    for length in range(1, max_len + 1):
        out.extend(sorted(get(cat, length)))
    return out

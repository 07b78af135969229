"""Attributed logic grammars: DSL parsing, chain classification, normal form.

A source rule pairs a category with a logical form on each side. Chain
rules have a semantic head on the right whose lambda-stripped semantics is
the LHS's; the normal form turns them into argument-filling rules that pass
the other constituents down on the head's argument list. Everything else
(including the lexicon) becomes a functor-introducing rule whose RHS is
ordered by the argument positions of its logical form.

Word strings are plain token sequences rather than difference lists.
"""

from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .term import (
    Compound, Term, TermSyntaxError, Var, canonical_names, format_term,
    parse_term, strip_lambdas,
)

__all__ = [
    "GrammarError", "Constituent", "Rule", "Grammar", "RuleKind",
    "FunctorRule", "FillerRule", "NormalGrammar", "OfflineReport",
    "parse_grammar", "classify", "semantic_head", "normalize",
    "check_offline_parsability", "format_constituent", "format_normal_rule",
    "canonical_text", "lf_arguments",
]


class GrammarError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)


@dataclass(frozen=True)
class Constituent:
    cat: str
    sem: Term
    args: tuple = ()

    def __str__(self) -> str:
        return format_constituent(self)


@dataclass(frozen=True)
class Rule:
    id: str
    lhs: Constituent
    rhs: tuple = ()
    tokens: tuple = ()
    head_index: Optional[int] = None
    line: int = 0

    @property
    def lexical(self) -> bool:
        return not self.rhs


@dataclass(frozen=True)
class Grammar:
    rules: tuple
    top: str

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def categories(self) -> list:
        cats = []
        for r in self.rules:
            for c in (r.lhs, *r.rhs):
                if c.cat not in cats:
                    cats.append(c.cat)
        return cats


class RuleKind(enum.Enum):
    CHAIN = "chain"
    NON_CHAIN = "non-chain"


def lf_arguments(sem: Term) -> tuple:
    """Argument subterms of the lambda-stripped logical form."""
    _, body = strip_lambdas(sem)
    return body.args if isinstance(body, Compound) else ()


# --------------------------------------------------------------------------
# Normal form


@dataclass(frozen=True)
class FillerRule:
    """Argument-filling rule: LHS -> head, others pushed onto head's args.

    ``order`` lists the source RHS in string order: -1 for the head, i for
    ``displaced[i]``. The LHS's own argument list passes through to the head
    after the displaced constituents.
    """

    id: str
    lhs: Constituent
    head: Constituent
    displaced: tuple
    order: tuple

    kind = RuleKind.CHAIN

    @property
    def consuming(self) -> bool:
        return bool(self.displaced)


@dataclass(frozen=True)
class FunctorRule:
    """Functor-introducing rule with RHS in logical-form argument order.

    ``slots[k]`` is the RHS index realizing LF argument k, or None when that
    argument is consumed from the incoming argument list. ``carrier`` is the
    RHS index that receives the unconsumed incoming arguments, if any.
    ``order`` lists RHS indices in string order.
    """

    id: str
    lhs: Constituent
    rhs: tuple
    slots: tuple
    carrier: Optional[int]
    order: tuple
    tokens: tuple = ()

    kind = RuleKind.NON_CHAIN

    @property
    def lexical(self) -> bool:
        return not self.rhs

    @property
    def consumes(self) -> bool:
        return any(s is None for s in self.slots)


@dataclass(frozen=True)
class NormalGrammar:
    rules: tuple
    top: str

    @property
    def functor_rules(self) -> tuple:
        return tuple(r for r in self.rules if isinstance(r, FunctorRule))

    @property
    def filler_rules(self) -> tuple:
        return tuple(r for r in self.rules if isinstance(r, FillerRule))

    def rule(self, rule_id: str):
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def max_arity(self) -> int:
        return max((len(lf_arguments(r.lhs.sem)) for r in self.functor_rules), default=0)


# --------------------------------------------------------------------------
# DSL


_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*")
_RULE_ID = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_'\-]*")
_STRING = re.compile(r'"((?:[^"\\]|\\.)*)"')


def _split_statements(text: str):
    """Yield (statement, offset) pairs, stripping % comments."""
    buf = []
    start = None
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            m = _STRING.match(text, i)
            if not m:
                raise GrammarError("unterminated string", *_linecol(text, i))
            if start is None:
                start = i
            buf.append(m.group())
            i = m.end()
            continue
        if ch == ".":
            if start is None:
                raise GrammarError("empty statement", *_linecol(text, i))
            yield "".join(buf), start
            buf, start = [], None
            i += 1
            continue
        if start is None and not ch.isspace():
            start = i
        if start is not None:
            buf.append(ch)
        i += 1
    if start is not None and "".join(buf).strip():
        raise GrammarError("missing '.' at end of statement", *_linecol(text, start))


def _linecol(text: str, offset: int):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _StatementParser:
    def __init__(self, text: str, stmt: str, offset: int):
        self.text, self.s, self.base = text, stmt, offset
        self.i = 0
        self.scope: dict = {}

    def error(self, msg: str):
        return GrammarError(msg, *_linecol(self.text, self.base + self.i))

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def at_end(self) -> bool:
        self.ws()
        return self.i >= len(self.s)

    def expect(self, lit: str):
        self.ws()
        if not self.s.startswith(lit, self.i):
            raise self.error(f"expected {lit!r}")
        self.i += len(lit)

    def regex(self, rx, what: str) -> str:
        self.ws()
        m = rx.match(self.s, self.i)
        if not m:
            raise self.error(f"expected {what}")
        self.i = m.end()
        return m.group()

    def peek_word(self) -> str:
        self.ws()
        m = _IDENT.match(self.s, self.i)
        return m.group() if m else ""

    def constituent(self) -> Constituent:
        cat = self.regex(_IDENT, "category")
        self.ws()
        if self.i < len(self.s) and self.s[self.i] == "(":
            depth, j = 0, self.i
            while j < len(self.s):
                if self.s[j] == "(":
                    depth += 1
                elif self.s[j] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth:
                raise self.error("unbalanced parentheses")
            inner = self.s[self.i + 1:j]
            try:
                sem = parse_term(inner, self.scope, pattern=False)
            except TermSyntaxError as e:
                self.i += 1 + e.pos
                raise self.error(f"bad logical form: {e}") from None
            self.i = j + 1
        else:
            sem = parse_term("Sem_", self.scope, pattern=False)
            self.scope.pop("Sem_")
        return Constituent(cat, sem)


def parse_grammar(text: str) -> Grammar:
    """Parse grammar DSL text into a :class:`Grammar`.

    Statements end with ``.``; ``%`` starts a comment::

        top S.
        rule r1: S(mod(X,Y)) -> S(X) QM(Y).
        rule r2: S(Y) -> NP(X) head VP(X^Y).
        lex np_john: NP(john) -> "John".
    """
    rules: list = []
    top = None
    top_pos = (0, 0)
    seen: dict = {}
    for stmt, offset in _split_statements(text):
        p = _StatementParser(text, stmt, offset)
        kw = p.peek_word()
        if kw == "top":
            p.i += 3
            if top is not None:
                raise p.error("duplicate top declaration")
            top_pos = _linecol(text, offset)
            top = p.regex(_IDENT, "top category")
            if not p.at_end():
                raise p.error("unexpected text after top symbol")
            continue
        if kw not in ("rule", "lex"):
            raise p.error("expected 'top', 'rule' or 'lex'")
        p.i += len(kw)
        line = _linecol(text, offset)[0]
        rid = p.regex(_RULE_ID, "rule id")
        if rid in seen:
            raise GrammarError(f"duplicate rule id {rid!r} (first on line {seen[rid]})",
                               *_linecol(text, offset))
        seen[rid] = line
        p.expect(":")
        lhs = p.constituent()
        p.expect("->")
        if kw == "lex":
            tokens = []
            while not p.at_end():
                m = _STRING.match(p.s, p.i)
                if not m:
                    raise p.error("lexicon entries take quoted tokens only")
                tokens.append(re.sub(r"\\(.)", r"\1", m.group(1)))
                p.i = m.end()
            if not tokens:
                raise p.error("empty RHS requires tokens")
            rules.append(Rule(rid, lhs, (), tuple(tokens), None, line))
            continue
        rhs = []
        head = None
        while not p.at_end():
            if p.peek_word() == "head" and not p.s[p.i + 4:p.i + 5] in ("(", ""):
                p.i += 4
                if head is not None:
                    raise p.error("more than one head marker")
                head = len(rhs)
            if p.s[p.i:p.i + 1] == '"':
                raise p.error("tokens are only allowed in lex entries")
            rhs.append(p.constituent())
        if not rhs:
            raise p.error("empty RHS requires tokens")
        rule = Rule(rid, lhs, tuple(rhs), (), head, line)
        candidates = _head_candidates(rule)
        if head is None and candidates:
            raise GrammarError(f"chain rule {rid!r} needs a head marker", line, 1)
        if head is not None and head not in candidates:
            raise GrammarError(
                f"head of {rid!r} does not share the LHS logical form", line, 1)
        rules.append(rule)
    if top is None:
        raise GrammarError("missing top declaration")
    if rules and top not in {r.lhs.cat for r in rules}:
        raise GrammarError(f"unknown top symbol {top!r}", *top_pos)
    return Grammar(tuple(rules), top)


# --------------------------------------------------------------------------
# Classification


def _head_candidates(rule: Rule) -> list:
    _, body = strip_lambdas(rule.lhs.sem)
    out = []
    for i, c in enumerate(rule.rhs):
        _, cbody = strip_lambdas(c.sem)
        if cbody == body:
            out.append(i)
    return out


def semantic_head(rule: Rule) -> Optional[int]:
    """Index of the semantic head, or None for non-chain rules."""
    if rule.head_index is not None:
        return rule.head_index
    cands = _head_candidates(rule)
    if not cands:
        return None
    if len(cands) > 1:
        warnings.warn(f"rule {rule.id!r}: several head candidates, using the leftmost",
                      stacklevel=2)
    return cands[0]


def classify(rule: Rule) -> RuleKind:
    return RuleKind.NON_CHAIN if semantic_head(rule) is None else RuleKind.CHAIN


def normalize(g: Grammar, flow: Optional[Mapping[str, int]] = None) -> NormalGrammar:
    """Rewrite ``g`` into functor-introducing and argument-filling rules.

    ``flow`` optionally overrides the head position per rule id.
    """
    out = []
    for r in g.rules:
        if flow and r.id in flow:
            r = Rule(r.id, r.lhs, r.rhs, r.tokens, flow[r.id], r.line)
        h = semantic_head(r)
        if h is not None:
            disp = tuple(c for i, c in enumerate(r.rhs) if i != h)
            order = []
            k = 0
            for i in range(len(r.rhs)):
                if i == h:
                    order.append(-1)
                else:
                    order.append(k)
                    k += 1
            out.append(FillerRule(r.id, r.lhs, r.rhs[h], disp, tuple(order)))
        else:
            out.append(_functor_rule(r))
    return NormalGrammar(tuple(out), g.top)


def _functor_rule(r: Rule) -> FunctorRule:
    binders, body = strip_lambdas(r.lhs.sem)
    lf_args = body.args if isinstance(body, Compound) else ()
    bodies = [strip_lambdas(c.sem)[1] for c in r.rhs]
    used = [False] * len(r.rhs)
    placed = []
    for t in lf_args:
        for i, b in enumerate(bodies):
            if not used[i] and b == t:
                used[i] = True
                placed.append(i)
                break
        else:
            if not (isinstance(t, Var) and t in binders):
                raise GrammarError(
                    f"rule {r.id!r}: argument {format_term(t)} has no realizing constituent",
                    r.line, 1)
            placed.append(None)
    for i, u in enumerate(used):
        if not u:
            raise GrammarError(
                f"rule {r.id!r}: {format_constituent(r.rhs[i])} realizes no argument",
                r.line, 1)
    src = [i for i in placed if i is not None]
    new_index = {s: k for k, s in enumerate(src)}
    rhs = tuple(r.rhs[i] for i in src)
    slots = tuple(None if i is None else new_index[i] for i in placed)
    carrier = None
    bset = {b for b in binders if isinstance(b, Var)}
    for k, c in enumerate(rhs):
        cb, _ = strip_lambdas(c.sem)
        if bset and any(b in bset for b in cb):
            carrier = k
            break
    order = tuple(new_index[i] for i in range(len(r.rhs)))
    return FunctorRule(r.id, r.lhs, rhs, slots, carrier, order, r.tokens)


@dataclass(frozen=True)
class OfflineReport:
    cycle: tuple = ()
    rules: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.cycle

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        path = " -> ".join(self.cycle + self.cycle[:1])
        return f"argument-filling cycle {path} via {', '.join(self.rules)}"


def check_offline_parsability(n: NormalGrammar) -> OfflineReport:
    """Reject cycles of argument-filling rules that add no arguments."""
    edges: dict = {}
    for r in n.filler_rules:
        if not r.consuming:
            edges.setdefault(r.lhs.cat, []).append((r.head.cat, r.id))
    color: dict = {}
    path: list = []

    def dfs(c):
        color[c] = 1
        for nxt, rid in edges.get(c, ()):
            path.append((c, rid))
            if color.get(nxt) == 1:
                i = next(k for k, (cc, _) in enumerate(path) if cc == nxt)
                return path[i:]
            if color.get(nxt) is None:
                found = dfs(nxt)
                if found:
                    return found
            path.pop()
        color[c] = 2
        return None

    for c in list(edges):
        if color.get(c) is None:
            found = dfs(c)
            if found:
                return OfflineReport(tuple(c for c, _ in found), tuple(r for _, r in found))
    return OfflineReport()


# --------------------------------------------------------------------------
# Printing


def format_constituent(c: Constituent, names=None, tail: Optional[str] = None) -> str:
    s = f"{c.cat}({format_term(c.sem, names)})"
    if c.args or tail:
        inner = ",".join(format_constituent(a, names) for a in c.args)
        if tail:
            inner = f"{inner}|{tail}" if inner else tail
        s += f"[{inner}]"
    return s


def _rule_terms(*cs):
    out = []
    for c in cs:
        out.append(c.sem)
        out.extend(_rule_terms(*c.args))
    return out


def format_normal_rule(r) -> str:
    """One-line rendering, variables named canonically.

    ``[A]`` marks the passed-through argument list.
    """
    if isinstance(r, FillerRule):
        names = canonical_names(_rule_terms(r.lhs, r.head, *r.displaced))
        head = Constituent(r.head.cat, r.head.sem, r.displaced)
        return (f"filler {r.id}: {format_constituent(r.lhs, names, 'A')} -> "
                f"{format_constituent(head, names, 'A')}.")
    names = canonical_names(_rule_terms(r.lhs, *r.rhs))
    takes = r.lexical or r.consumes or r.carrier is not None
    parts = []
    if r.lexical or r.consumes:
        parts.append("A")
    for k, c in enumerate(r.rhs):
        parts.append(format_constituent(c, names, "A" if k == r.carrier else None))
    parts.extend('"' + t.replace('"', '\\"') + '"' for t in r.tokens)
    lhs = format_constituent(r.lhs, names, "A" if takes else None)
    return f"functor {r.id}: {lhs} -> {' '.join(parts)}."


_VAR_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|\b[A-Z][A-Za-z0-9_\']*(?=[^A-Za-z0-9_\'(]|$)|\b_[A-Za-z0-9_]+')


def canonical_text(line: str, keep: Sequence[str] = ("A",)) -> str:
    """Rename variables in ``line`` by first occurrence (X, Y, Z, ...).

    Category names (identifiers followed by ``(``) and quoted strings are
    left alone, as are names in ``keep``.
    """
    mapping: dict = {}
    order = ["X", "Y", "Z", "U", "V", "W"]

    def sub(m):
        tok = m.group()
        if tok.startswith('"') or tok in keep:
            return tok
        if tok not in mapping:
            n = len(mapping)
            mapping[tok] = order[n % 6] + (str(n // 6) if n >= 6 else "")
        return mapping[tok]

    return _VAR_TOKEN.sub(sub, line)

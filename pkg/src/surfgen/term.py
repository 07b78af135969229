"""Logical-form terms: variables, atoms, compounds and lambda abstractions.

Terms are immutable. Variables are identified by a globally unique integer
id; the display name only matters for printing. Substitutions are plain
dicts from variable id to term, kept triangular (a binding may mention other
bound variables); :func:`apply` resolves them fully.

Patterns are terms that may also contain :class:`Wildcard` leaves (``_``)
and :class:`AtomClass` leaves (``{john|mary|paris}``), the latter standing
for any one of a set of atoms.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

__all__ = [
    "Term", "Var", "Atom", "Compound", "Lambda", "Wildcard", "AtomClass",
    "WILDCARD", "Substitution", "fresh_var", "walk", "unify", "apply",
    "rename_apart", "Renamer", "subsumes", "variant", "strip_lambdas",
    "wrap_lambdas", "abstract_to_depth", "to_pattern", "pattern_to_term",
    "matches", "variables", "is_ground", "term_depth", "parse_term",
    "format_term", "canonical_names", "TermSyntaxError",
]


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, eq=True)
class Var(Term):
    id: int
    name: Optional[str] = field(default=None, compare=False, hash=False)

    def __repr__(self) -> str:
        return f"Var({self.id}, {self.name!r})"


@dataclass(frozen=True)
class Atom(Term):
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True)
class Compound(Term):
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError(f"compound {self.functor!r} needs at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        return f"Compound({self.functor!r}, {self.args!r})"


@dataclass(frozen=True)
class Lambda(Term):
    # binder is normally a Var; unification may instantiate it.
    binder: Term
    body: Term

    def __repr__(self) -> str:
        return f"Lambda({self.binder!r}, {self.body!r})"


@dataclass(frozen=True)
class Wildcard(Term):
    def __repr__(self) -> str:
        return "WILDCARD"


WILDCARD = Wildcard()


@dataclass(frozen=True)
class AtomClass(Term):
    """A pattern leaf matching any atom whose name is in ``members``."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __repr__(self) -> str:
        return f"AtomClass({self.members!r})"


Substitution = dict

_counter = itertools.count(1)
_counter_lock = threading.Lock()


def fresh_var(name: Optional[str] = None) -> Var:
    with _counter_lock:
        return Var(next(_counter), name)


# --------------------------------------------------------------------------
# Unification


def walk(t: Term, s: Mapping[int, Term]) -> Term:
    while isinstance(t, Var) and t.id in s:
        t = s[t.id]
    return t


def _occurs(v: Var, t: Term, s: Mapping[int, Term]) -> bool:
    stack = [t]
    while stack:
        t = walk(stack.pop(), s)
        if isinstance(t, Var):
            if t.id == v.id:
                return True
        elif isinstance(t, Compound):
            stack.extend(t.args)
        elif isinstance(t, Lambda):
            stack.append(t.binder)
            stack.append(t.body)
    return False


def _unify(a: Term, b: Term, s: dict) -> bool:
    stack = [(a, b)]
    while stack:
        a, b = stack.pop()
        a = walk(a, s)
        b = walk(b, s)
        if a is b:
            continue
        if isinstance(a, Wildcard) or isinstance(b, Wildcard):
            continue
        if isinstance(a, Var):
            if isinstance(b, Var) and a.id == b.id:
                continue
            if _occurs(a, b, s):
                return False
            s[a.id] = b
            continue
        if isinstance(b, Var):
            if _occurs(b, a, s):
                return False
            s[b.id] = a
            continue
        if isinstance(a, Compound):
            if not (isinstance(b, Compound) and a.functor == b.functor
                    and len(a.args) == len(b.args)):
                return False
            stack.extend(zip(a.args, b.args))
        elif isinstance(a, Lambda):
            if not isinstance(b, Lambda):
                return False
            stack.append((a.binder, b.binder))
            stack.append((a.body, b.body))
        elif a != b:
            return False
    return True


def unify(a: Term, b: Term, subst: Optional[Mapping[int, Term]] = None) -> Optional[dict]:
    """Most general unifier of ``a`` and ``b`` extending ``subst``, or None."""
    s = dict(subst) if subst else {}
    return s if _unify(a, b, s) else None


def unify_in_place(a: Term, b: Term, s: dict) -> bool:
    """Like :func:`unify` but extends ``s`` directly; ``s`` is garbage on failure."""
    return _unify(a, b, s)


def apply(s: Mapping[int, Term], t: Term) -> Term:
    if not s:
        return t
    t = walk(t, s)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(apply(s, a) for a in t.args))
    if isinstance(t, Lambda):
        return Lambda(apply(s, t.binder), apply(s, t.body))
    return t


# --------------------------------------------------------------------------
# Renaming, matching


def variables(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in left-to-right order of first occurrence."""
    seen = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            if t.id not in seen:
                seen.add(t.id)
                yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
        elif isinstance(t, Lambda):
            stack.append(t.body)
            stack.append(t.binder)


def is_ground(t: Term) -> bool:
    return next(variables(t), None) is None and not _has_wild(t)


def _has_wild(t: Term) -> bool:
    if isinstance(t, (Wildcard, AtomClass)):
        return True
    if isinstance(t, Compound):
        return any(_has_wild(a) for a in t.args)
    if isinstance(t, Lambda):
        return _has_wild(t.binder) or _has_wild(t.body)
    return False


class Renamer:
    """Consistently maps variables to fresh ones across several terms."""

    def __init__(self):
        self.mapping: dict = {}

    def __call__(self, t: Term) -> Term:
        if isinstance(t, Var):
            v = self.mapping.get(t.id)
            if v is None:
                v = self.mapping[t.id] = fresh_var(t.name)
            return v
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(self(a) for a in t.args))
        if isinstance(t, Lambda):
            return Lambda(self(t.binder), self(t.body))
        return t


def rename_apart(t: Term, context: Iterable[int] = ()) -> Term:
    """A variant of ``t`` sharing no variable with ``t`` or ``context``.

    Every variable gets a globally fresh id, so ``context`` only documents
    intent; it is accepted for symmetry with callers that track scopes.
    """
    return Renamer()(t)


def _match(p: Term, t: Term, b: dict) -> bool:
    stack = [(p, t)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Wildcard):
            continue
        if isinstance(p, Var):
            bound = b.get(p.id)
            if bound is None:
                b[p.id] = t
            elif bound != t:
                return False
            continue
        if isinstance(p, AtomClass):
            if not (p == t or (isinstance(t, Atom) and t.name in p.members)):
                return False
            continue
        if isinstance(p, Compound):
            if not (isinstance(t, Compound) and p.functor == t.functor
                    and len(p.args) == len(t.args)):
                return False
            stack.extend(zip(p.args, t.args))
        elif isinstance(p, Lambda):
            if not isinstance(t, Lambda):
                return False
            stack.append((p.binder, t.binder))
            stack.append((p.body, t.body))
        elif p != t:
            return False
    return True


def subsumes(general: Term, specific: Term) -> bool:
    """True iff some substitution maps ``general`` onto ``specific``.

    Variables of ``specific`` are treated as constants.
    """
    return _match(general, specific, {})


def matches(pattern: Term, t: Term) -> bool:
    """One-sided match of a pattern (wildcards, atom classes) against ``t``."""
    return _match(pattern, t, {})


def variant(a: Term, b: Term) -> bool:
    return subsumes(a, b) and subsumes(b, a)


# --------------------------------------------------------------------------
# Lambdas and depth abstraction


def strip_lambdas(t: Term) -> tuple:
    binders = []
    while isinstance(t, Lambda):
        binders.append(t.binder)
        t = t.body
    return binders, t


def wrap_lambdas(binders: Sequence[Term], body: Term) -> Term:
    for b in reversed(binders):
        body = Lambda(b, body)
    return body


def abstract_to_depth(t: Term, k: int) -> Term:
    """Keep nodes above depth ``k`` (root is depth 0); replace the rest by ``_``."""
    if k <= 0:
        return WILDCARD
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(abstract_to_depth(a, k - 1) for a in t.args))
    if isinstance(t, Lambda):
        raise ValueError(f"cannot abstract unsaturated term {format_term(t)}")
    return t


def to_pattern(t: Term, k: Optional[int] = None) -> Term:
    """Variables become wildcards; optionally truncate at depth ``k``."""
    if k is not None and k <= 0:
        return WILDCARD
    nk = None if k is None else k - 1
    if isinstance(t, Var):
        return WILDCARD
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(to_pattern(a, nk) for a in t.args))
    if isinstance(t, Lambda):
        return Lambda(to_pattern(t.binder, nk), to_pattern(t.body, nk))
    return t


def pattern_to_term(p: Term) -> Term:
    """Replace every wildcard by a distinct fresh variable."""
    if isinstance(p, Wildcard):
        return fresh_var()
    if isinstance(p, Compound):
        return Compound(p.functor, tuple(pattern_to_term(a) for a in p.args))
    if isinstance(p, Lambda):
        return Lambda(pattern_to_term(p.binder), pattern_to_term(p.body))
    return p


def term_depth(t: Term) -> int:
    """Number of levels: an atom has depth 1."""
    if isinstance(t, Compound):
        return 1 + max(term_depth(a) for a in t.args)
    if isinstance(t, Lambda):
        return 1 + max(term_depth(t.binder), term_depth(t.body))
    return 1


# --------------------------------------------------------------------------
# Text syntax


class TermSyntaxError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int = 0):
        self.pos = pos
        super().__init__(f"{msg} at offset {pos}" + (f" in {text!r}" if text else ""))


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<var>[A-Z][A-Za-z0-9_']*|_[A-Za-z0-9_]+)
  | (?P<wild>_)
  | (?P<atom>[a-z0-9][A-Za-z0-9_]*|'(?:[^'\\]|\\.)*')
  | (?P<punct>[(),^{}|])
""", re.VERBOSE)

_PLAIN_ATOM = re.compile(r"[a-z0-9][A-Za-z0-9_]*\Z")


def _tokenize(text: str, start: int = 0):
    pos = start
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "atom" and val.startswith("'"):
                val = re.sub(r"\\(.)", r"\1", val[1:-1])
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class _TermParser:
    def __init__(self, text: str, scope: dict, pattern: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.scope = scope
        self.pattern = pattern

    def peek(self):
        return self.toks[self.i]

    def take(self, val=None):
        tok = self.toks[self.i]
        if val is not None and tok[1] != val:
            raise TermSyntaxError(f"expected {val!r}, found {tok[1] or 'end'!r}", self.text, tok[2])
        self.i += 1
        return tok

    def term(self) -> Term:
        left = self.primary()
        if self.peek()[1] == "^":
            self.take()
            return Lambda(left, self.term())
        return left

    def primary(self) -> Term:
        kind, val, pos = self.take()
        if kind == "var":
            v = self.scope.get(val)
            if v is None:
                v = self.scope[val] = fresh_var(val)
            return v
        if kind == "wild":
            if not self.pattern:
                raise TermSyntaxError("wildcard not allowed here", self.text, pos)
            return WILDCARD
        if kind == "atom":
            if self.peek()[1] == "(":
                self.take()
                args = [self.term()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.term())
                self.take(")")
                return Compound(val, tuple(args))
            return Atom(val)
        if val == "(":
            t = self.term()
            self.take(")")
            return t
        if val == "{" and self.pattern:
            names = [self.take()[1]]
            while self.peek()[1] == "|":
                self.take()
                names.append(self.take()[1])
            self.take("}")
            return AtomClass(tuple(names))
        raise TermSyntaxError(f"unexpected {val or 'end of input'!r}", self.text, pos)


def parse_term(text: str, scope: Optional[dict] = None, pattern: bool = True) -> Term:
    """Parse the textual term syntax; ``scope`` maps variable names to Vars."""
    p = _TermParser(text, {} if scope is None else scope, pattern)
    t = p.term()
    if p.peek()[0] != "eof":
        raise TermSyntaxError(f"trailing input {p.peek()[1]!r}", text, p.peek()[2])
    return t


_NAMES = ["X", "Y", "Z", "U", "V", "W"]


def canonical_names(terms: Iterable[Term]) -> dict:
    """Name variables X, Y, Z, U, V, W, X1, ... by first occurrence."""
    names: dict = {}
    for t in terms:
        for v in variables(t):
            if v.id not in names:
                n = len(names)
                names[v.id] = _NAMES[n % 6] + (str(n // 6) if n >= 6 else "")
    return names


def _format_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(t: Term, names: Optional[Mapping[int, str]] = None) -> str:
    if isinstance(t, Var):
        if names is not None and t.id in names:
            return names[t.id]
        return t.name if t.name else f"_G{t.id}"
    if isinstance(t, Atom):
        return _format_atom(t.name)
    if isinstance(t, Compound):
        return _format_atom(t.functor) + "(" + ",".join(format_term(a, names) for a in t.args) + ")"
    if isinstance(t, Lambda):
        b = format_term(t.binder, names)
        if isinstance(t.binder, Lambda):
            b = f"({b})"
        return b + "^" + format_term(t.body, names)
    if isinstance(t, Wildcard):
        return "_"
    if isinstance(t, AtomClass):
        return "{" + "|".join(t.members) + "}"
    raise TypeError(f"not a term: {t!r}")


def ground_terms(functors: Mapping[str, int], atoms: Iterable[str], depth: int) -> list:
    """Every ground term over the signature with :func:`term_depth` <= ``depth``."""
    levels = [[]]
    base = [Atom(a) for a in atoms]
    for d in range(1, depth + 1):
        below = [t for lv in levels for t in lv]
        new = list(base) if d == 1 else []
        if d > 1:
            prev = set(levels[d - 1])
            for f, n in functors.items():
                for args in itertools.product(below, repeat=n):
                    if any(a in prev for a in args):
                        new.append(Compound(f, tuple(args)))
        levels.append(new)
    return [t for lv in levels for t in lv]

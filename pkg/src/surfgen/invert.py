"""Grammar inversion: chains of argument-filling rules ending in a functor.

Each inverted rule corresponds to one chain from a goal constituent down to a
functor-introducing rule. Its RHS has one constituent per argument of the
LHS logical form, in argument order, whether that constituent came from the
functor rule itself or from an argument collected along the chain.

Word order is kept in a template over the RHS: a token, ``Own(j)`` (the
string of RHS constituent j) or ``Extra(j, k)`` (the string of incoming
argument k of RHS constituent j, which is realized below j but placed by
whoever displaced it). Each incoming argument of the LHS has a template too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

from .grammar import (
    Constituent, FillerRule, FunctorRule, NormalGrammar, check_offline_parsability,
    format_constituent, lf_arguments,
)
from .term import (
    Atom, Compound, Renamer, apply, subsumes, canonical_names, fresh_var, strip_lambdas, unify, wrap_lambdas,
)

__all__ = [
    "Own", "Extra", "Chain", "InvertedRule", "InvertedGrammar", "ChainError",
    "goal_of", "goal_key", "enumerate_chains", "rules_for_goal", "invert",
    "format_inverted", "format_template", "replay",
]

DEFAULT_CHAIN_CAP = 32


class ChainError(RuntimeError):
    pass


@dataclass(frozen=True)
class Own:
    slot: int


@dataclass(frozen=True)
class Extra:
    slot: int
    arg: int


TemplateItem = Union[str, Own, Extra]


@dataclass(frozen=True)
class Chain:
    filler_rule_ids: tuple
    terminal_functor_rule_id: str
    accumulated_args: tuple = ()

    @property
    def rule_ids(self) -> tuple:
        return self.filler_rule_ids + (self.terminal_functor_rule_id,)

    def __str__(self) -> str:
        return "/".join(self.rule_ids)


@dataclass(frozen=True)
class InvertedRule:
    id: str
    lhs: Constituent
    rhs: tuple
    template: tuple
    extras: tuple
    provenance: Optional[Chain] = None

    @property
    def arity(self) -> int:
        return len(self.rhs)

    @property
    def lf(self):
        return strip_lambdas(self.lhs.sem)[1]

    @property
    def consumed(self) -> int:
        """How many incoming arguments are realized directly as RHS constituents."""
        return sum(1 for e in self.extras if len(e) == 1 and isinstance(e[0], Own))


@dataclass
class InvertedGrammar:
    rules: list
    goals: dict
    top_goal: str

    def for_goal(self, key: str) -> list:
        return self.goals.get(key, [])


# --------------------------------------------------------------------------
# Goals


def goal_of(c: Constituent) -> Constituent:
    """Generalize a constituent to the goal it poses: the stripped body is freed."""
    binders, _ = strip_lambdas(c.sem)
    ren = Renamer()
    return Constituent(c.cat, ren(wrap_lambdas(binders, fresh_var())),
                       tuple(Constituent(a.cat, ren(a.sem), ()) for a in c.args))


def _constituent_terms(c: Constituent) -> list:
    out = [c.sem]
    for a in c.args:
        out.extend(_constituent_terms(a))
    return out


def goal_key(c: Constituent) -> str:
    g = goal_of(c)
    return format_constituent(g, canonical_names(_constituent_terms(g)))


def _as_goal(x) -> Constituent:
    if isinstance(x, Constituent):
        return goal_of(x)
    return Constituent(x, fresh_var(), ())


# --------------------------------------------------------------------------
# Chain enumeration


def _renamed(r, ren: Renamer):
    def rc(c: Constituent) -> Constituent:
        return Constituent(c.cat, ren(c.sem), tuple(rc(a) for a in c.args))
    if isinstance(r, FillerRule):
        return rc(r.lhs), rc(r.head), tuple(rc(d) for d in r.displaced)
    return rc(r.lhs), tuple(rc(c) for c in r.rhs)


def _sub(c: Constituent, s) -> Constituent:
    return Constituent(c.cat, apply(s, c.sem), tuple(_sub(a, s) for a in c.args))


def _expand(n: NormalGrammar, goal: Constituent, cap: int = DEFAULT_CHAIN_CAP,
            path: Optional[Sequence[str]] = None) -> Iterator[InvertedRule]:
    """Every inverted rule for ``goal`` (optionally restricted to one chain)."""
    max_args = n.max_arity
    g = goal

    def rec(cat, sem, args, s, fillers):
        depth = len(fillers)
        if path is not None and depth >= len(path):
            return
        last = path is not None and depth == len(path) - 1
        for r in n.rules:
            if r.lhs.cat != cat or (path is not None and r.id != path[depth]):
                continue
            if isinstance(r, FunctorRule):
                if path is None or last:
                    out = _terminate(r, sem, args, s, fillers, g)
                    if out is not None:
                        yield out
                continue
            if last or len(args) + len(r.displaced) > max_args:
                continue
            if depth >= cap:
                raise ChainError(f"chain from {g.cat} exceeds {cap} argument-filling rules "
                                 f"({'/'.join(f[0].id for f in fillers)})")
            lhs, head, disp = _renamed(r, Renamer())
            s2 = unify(lhs.sem, sem, s)
            if s2 is None:
                continue
            yield from rec(head.cat, head.sem, disp + args, s2, fillers + ((r, disp),))

    yield from rec(g.cat, g.sem, g.args, {}, ())


def _terminate(f: FunctorRule, sem, args, s, fillers, goal) -> Optional[InvertedRule]:
    lhs, rhs = _renamed(f, Renamer())
    s = unify(lhs.sem, sem, s)
    if s is None:
        return None
    args = tuple(_sub(a, s) for a in args)
    lf_args = lf_arguments(apply(s, lhs.sem))
    used = [False] * len(args)
    slots = []
    for k, t in enumerate(lf_args):
        j = f.slots[k]
        if j is not None:
            slots.append(("rhs", j))
            continue
        for i, a in enumerate(args):
            if not used[i] and a.sem == t:
                used[i] = True
                slots.append(("arg", i))
                break
        else:
            return None
    rest = [i for i, u in enumerate(used) if not u]
    if rest and f.carrier is None:
        return None
    rest_args = tuple(args[i] for i in rest)
    pos_of_rhs = {j: k for k, (kind, j) in enumerate(slots) if kind == "rhs"}
    out_rhs = []
    for kind, j in slots:
        if kind == "rhs":
            c = _sub(rhs[j], s)
            out_rhs.append(Constituent(c.cat, c.sem, rest_args if j == f.carrier else ()))
        else:
            out_rhs.append(args[j])
    if f.lexical:
        own = list(f.tokens)
    else:
        own = [Own(pos_of_rhs[j]) for j in f.order]
    extras: list = [None] * len(args)
    for k, (kind, i) in enumerate(slots):
        if kind == "arg":
            extras[i] = [Own(k)]
    for m, i in enumerate(rest):
        extras[i] = [Extra(pos_of_rhs[f.carrier], m)]
    for r, disp in reversed(fillers):
        m = len(disp)
        new_own = []
        for o in r.order:
            new_own.extend(own if o == -1 else extras[o])
        own, extras = new_own, extras[m:]
    filler_ids = tuple(r.id for r, _ in fillers)
    collected = tuple(_sub(d, s) for _, disp in fillers for d in disp)
    return InvertedRule(
        id="/".join(filler_ids + (f.id,)),
        lhs=_sub(goal, s),
        rhs=tuple(_sub(c, s) for c in out_rhs),
        template=tuple(own),
        extras=tuple(tuple(e) for e in extras),
        provenance=Chain(filler_ids, f.id, collected),
    )


def enumerate_chains(n: NormalGrammar, from_cats: Iterable, cap: int = DEFAULT_CHAIN_CAP) -> list:
    """All chains from the given categories (or goal constituents) to functor rules."""
    out = []
    for c in from_cats:
        out.extend(r.provenance for r in _expand(n, _as_goal(c), cap))
    return out


def rules_for_goal(n: NormalGrammar, goal: Constituent, cap: int = DEFAULT_CHAIN_CAP) -> list:
    g = goal_of(goal)
    key = goal_key(g)
    rules = []
    for r in _expand(n, g, cap):
        rules.append(InvertedRule(f"{g.cat}:{r.id}", r.lhs, r.rhs, r.template, r.extras,
                                  r.provenance))
    return _uniquify(rules, key)


def _uniquify(rules, key):
    seen: dict = {}
    out = []
    for r in rules:
        n = seen.get(r.id, 0)
        seen[r.id] = n + 1
        if n:
            r = InvertedRule(f"{r.id}#{n + 1}", r.lhs, r.rhs, r.template, r.extras, r.provenance)
        out.append(r)
    return out


def invert(n: NormalGrammar, cap: int = DEFAULT_CHAIN_CAP) -> InvertedGrammar:
    """Eagerly invert every goal reachable from the top symbol."""
    report = check_offline_parsability(n)
    if not report.ok:
        raise ChainError(str(report))
    top = Constituent(n.top, fresh_var(), ())
    top_key = goal_key(top)
    goals: dict = {}
    queue = [top]
    rules: list = []
    taken: set = set()
    while queue:
        g = queue.pop(0)
        key = goal_key(g)
        if key in goals:
            continue
        found = rules_for_goal(n, g, cap)
        fixed = []
        for r in found:
            if r.id in taken:
                r = InvertedRule(f"{r.id}@{len(goals)}", r.lhs, r.rhs, r.template,
                                 r.extras, r.provenance)
            taken.add(r.id)
            fixed.append(r)
        goals[key] = fixed
        rules.extend(fixed)
        for r in fixed:
            for c in r.rhs:
                if goal_key(c) not in goals:
                    queue.append(c)
    return InvertedGrammar(rules, goals, top_key)


def replay(n: NormalGrammar, rule: InvertedRule) -> bool:
    """Re-derive ``rule`` from its provenance chain; True if a variant comes back."""
    goal = goal_of(rule.lhs)
    for r in _expand(n, goal, path=rule.provenance.rule_ids):
        a, b = _rule_term(r), _rule_term(rule)
        if subsumes(a, b) and subsumes(b, a):
            return True
    return False


def _rule_term(r: InvertedRule):
    def ct(c):
        return Compound("c", (Atom(c.cat), c.sem, Compound("l", (Atom("nil"),) + tuple(ct(a) for a in c.args))))
    return Compound("r", (ct(r.lhs),) + tuple(ct(c) for c in r.rhs))


# --------------------------------------------------------------------------
# Printing


def format_template(items: Sequence) -> str:
    out = []
    for it in items:
        if isinstance(it, Own):
            out.append(f"${it.slot}")
        elif isinstance(it, Extra):
            out.append(f"${it.slot}.{it.arg}")
        else:
            out.append('"' + it.replace("\\", "\\\\").replace('"', '\\"') + '"')
    return " ".join(out)


def format_inverted(r: InvertedRule, template: bool = False, names=None) -> str:
    """``LHS -> RHS.`` with canonical variables; ``LHS.`` when the RHS is empty."""
    if names is None:
        terms = _constituent_terms(r.lhs)
        for c in r.rhs:
            terms.extend(_constituent_terms(c))
        names = canonical_names(terms)
    lhs = format_constituent(r.lhs, names)
    rhs = " ".join(format_constituent(c, names) for c in r.rhs)
    s = f"{lhs} -> {rhs}" if rhs else lhs
    if template:
        s += " : " + format_template(r.template)
        for e in r.extras:
            s += " ; " + format_template(e)
    return s + "."

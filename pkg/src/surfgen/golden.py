"""Reference listings shipped with the package and their comparison.

A listing is plain text: ``%`` starts a comment (also after an entry),
``State <label>`` opens a state, lines containing ``=>`` are items, and
``descend``/``goto`` lines are transitions ``<kind> <symbol-or-pattern> <label>``.
Rule listings are one rule per line. Items and rules are compared after
renaming variables by first occurrence.
"""

from __future__ import annotations

import importlib.resources
from collections import Counter
from dataclasses import dataclass, field

from .grammar import canonical_text, format_normal_rule, NormalGrammar
from .invert import format_inverted
from .parseref import ParseTables
from .tables import GenTables, format_item
from .term import format_term, parse_term

__all__ = [
    "ListedState", "read_data", "parse_listing", "parse_rule_listing",
    "compare_parse_states", "compare_gen_states", "compare_rules", "canonical_pattern",
    "normal_form_lines", "inverted_lines",
]


@dataclass
class ListedState:
    label: str
    items: list = field(default_factory=list)
    edges: list = field(default_factory=list)


def read_data(name: str) -> str:
    return importlib.resources.files("surfgen").joinpath("data", name).read_text(encoding="utf-8")


def _strip(line: str) -> str:
    return line.split("%", 1)[0].strip()


def parse_listing(text: str) -> list:
    states: list = []
    for raw in text.splitlines():
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("State "):
            states.append(ListedState(line.split(None, 1)[1]))
        elif "=>" in line:
            states[-1].items.append(" ".join(line.split()))
        else:
            kind, rest = line.split(None, 1)
            sym, label = rest.rsplit(None, 1)
            states[-1].edges.append((kind, sym, label))
    return states


def parse_rule_listing(text: str) -> list:
    return [_strip(raw) for raw in text.splitlines() if _strip(raw)]


def canonical_pattern(text: str) -> str:
    return format_term(parse_term(text))


def compare_parse_states(t: ParseTables, listing: list) -> list:
    """Problems found matching the listed states to compiled ones (empty when isomorphic)."""
    problems = []
    by_items = {}
    for st in t.states:
        key = frozenset(t.item_text(it) for it in st.items)
        by_items[key] = st.id
    if len(listing) != len(t.states):
        problems.append(f"{len(t.states)} states compiled, {len(listing)} listed")
    label_to_id = {}
    for ls in listing:
        sid = by_items.get(frozenset(ls.items))
        if sid is None:
            problems.append(f"listed state {ls.label} has no compiled counterpart")
        else:
            label_to_id[ls.label] = sid
    if len(set(label_to_id.values())) != len(label_to_id):
        problems.append("listed states are not mapped one to one")
    for ls in listing:
        sid = label_to_id.get(ls.label)
        if sid is None:
            continue
        listed = {(sym, label_to_id.get(label)) for _, sym, label in ls.edges}
        got = {(sym, target) for (src, sym), target in t.transitions.items() if src == sid}
        if listed != got:
            problems.append(f"state {ls.label}: transitions differ")
    return problems


def _items_of(t: GenTables, sid: int) -> Counter:
    return Counter(canonical_text(format_item(it)) for it in t.state(sid).items)


def compare_gen_states(t: GenTables, listing: list) -> list:
    """Check that the listed states and descend entries occur in ``t``.

    Labels are bound as they are reached: the first state is state 1, and a
    descend entry binds its target label to the compiled target.
    """
    problems = []
    bound = {listing[0].label: 1} if listing else {}
    for ls in listing:
        sid = bound.get(ls.label)
        if sid is None:
            problems.append(f"state {ls.label} is not reached by any listed entry")
            continue
        want = Counter(canonical_text(i) for i in ls.items)
        got = _items_of(t, sid)
        if want != got:
            problems.append(f"state {ls.label} (compiled {sid}): items differ: "
                            f"listed {sorted(want)} compiled {sorted(got)}")
        for kind, sym, label in ls.edges:
            if kind != "descend":
                problems.append(f"unsupported entry kind {kind}")
                continue
            pat = canonical_pattern(sym)
            found = [x for p, x in t.descend.get(sid, ()) if format_term(p) == pat]
            if not found:
                problems.append(f"no entry descend({sid}, {pat}, _)")
                continue
            if label in bound and bound[label] != found[0]:
                problems.append(f"descend({sid}, {pat}) reaches {found[0]}, "
                                f"listed {label} is {bound[label]}")
            bound.setdefault(label, found[0])
    return problems


def compare_rules(rendered: list, listed: list) -> tuple:
    """(missing, extra) between rendered and listed rules, as canonical multisets."""
    a = Counter(canonical_text(x) for x in rendered)
    b = Counter(canonical_text(x) for x in listed)
    return sorted((b - a).elements()), sorted((a - b).elements())


def normal_form_lines(g: NormalGrammar) -> list:
    return [format_normal_rule(r) for r in g.rules]


def inverted_lines(rules) -> list:
    return [format_inverted(r) for r in rules]

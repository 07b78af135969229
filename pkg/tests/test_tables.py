import json
from fractions import Fraction

import pytest

from surfgen.golden import compare_gen_states, parse_listing, read_data
from surfgen.grammar import canonical_text, normalize, parse_grammar
from surfgen.invert import replay
from surfgen.tables import (
    TOP_RULE, DepthConfig, GenState, TableError, compile_tables, dumps, format_item,
    format_states, initial_state, lex_types, load, loads, optimize_depths, reductive_score, save,
    state_subsumes, successors,
)
from surfgen.term import AtomClass, format_term, parse_term


@pytest.fixture(scope="module")
def normal():
    return normalize(parse_grammar(read_data("sample.dcg")))


@pytest.fixture(scope="module")
def depth1(normal):
    return compile_tables(normal)


@pytest.fixture(scope="module")
def tuned(normal):
    return compile_tables(normal, cfg=optimize_depths(normal))


def items(state):
    return sorted(canonical_text(format_item(it)) for it in state.items)


def test_initial_state():
    s = initial_state("S")
    assert s.id == 1 and [format_item(it) for it in s.items] == ["S'(f(X)) => . S(X)"]
    assert [format_item(it) for it in initial_state("QM").items] == ["QM'(f(X)) => . QM(X)"]
    assert items(initial_state("S")) == items(initial_state("S"))


def test_successors_of_initial_state(normal):
    succ = successors(initial_state("S"), normal, DepthConfig(1))
    assert [format_term(p) for p, _, _ in succ] == ["mod(_,_)", "sleep(_)", "see(_,_)"]
    _, down, across = succ[0]
    assert sorted(canonical_text(format_item(i)) for i in down) == [
        "S(mod(X,Y)) => . S(X) QM(Y)",
        "S(mod(X,Y)) => . VP(Z^X)[NP(Z)] AdvP(Y)",
        "S(mod(X,Y)) => . VP(Z^X)[NP(Z)] PP(Y)",
    ]
    assert [format_item(i) for i in across] == ["S'(f(X)) => S(X) ."]


@pytest.mark.parametrize("listing,cfg", [
    ("gen_states_depth1.txt", DepthConfig(1)),
    ("gen_states_depth2.txt", DepthConfig(2)),
])
def test_reference_listings(normal, listing, cfg):
    t = compile_tables(normal, cfg=cfg)
    assert compare_gen_states(t, parse_listing(read_data(listing))) == []


def test_depth2_question_states_are_single_items(normal):
    t = compile_tables(normal, cfg=DepthConfig(2))
    targets = {format_term(p): x for p, x in t.descend[1]}
    for pat in ("mod(mod(_,_),ynq)", "mod(see(_,_),ynq)", "mod(sleep(_),ynq)"):
        assert len(t.state(targets[pat]).items) == 1


def test_reductive_scores(depth1, tuned):
    assert reductive_score(depth1)[0] >= 2
    assert reductive_score(tuned) == (1, Fraction(1))


def test_optimizer_result(normal, tuned):
    assert compare_gen_states(tuned, parse_listing(read_data("gen_states_auto.txt"))) == []
    assert tuned.lookahead.overrides == {("mod", 2): (0, 1)}


def test_optimizer_trace_is_monotone(normal):
    trace = []
    optimize_depths(normal, trace=trace)
    scores = [m for _, m, _ in trace]
    assert scores == sorted(scores, reverse=True) and scores[-1] == 1


def test_optimizer_with_training_examples(normal):
    lfs = [parse_term("sleep(john)"), parse_term("see(mary,john)")]
    cfg = optimize_depths(normal, training=lfs)
    assert cfg.overrides == {}


def test_lexicon_only_grammar():
    g = normalize(parse_grammar('top NP. lex a: NP(john) -> "John".'))
    assert optimize_depths(g).overrides == {}
    t = compile_tables(g)
    # the accept state (dummy item completed) is materialized as a state
    assert len(t.states) == 3
    assert [r for r in t.reduce.values() if r != [TOP_RULE]] == [["NP:a"]]
    assert reductive_score(t)[0] == 1


def test_lex_types(normal):
    types = {lt.members: lt for lt in lex_types(normal)}
    assert frozenset({"np_john", "np_mary", "np_paris"}) in types
    assert frozenset({"vi_sleeps"}) in types and frozenset({"vt_sees"}) in types
    single = lex_types(normalize(parse_grammar('top NP. lex a: NP(john) -> "John".')))
    assert len(single) == 1 and single[0].members == frozenset({"a"})


def test_lexical_type_in_tables(depth1):
    (tid, members), = depth1.types.items()
    assert members == ("NP:np_john", "NP:np_mary", "NP:np_paris")
    assert isinstance(depth1.rules[tid].lhs.sem, AtomClass)
    untyped = compile_tables(normalize(parse_grammar(read_data("sample.dcg"))), lex_typing=False)
    assert untyped.types == {} and len(untyped.states) > len(depth1.states)


def test_no_state_subsumes_another(depth1, tuned):
    for t in (depth1, tuned):
        for a in t.states:
            for b in t.states:
                if a is not b:
                    assert not state_subsumes(a.items, b.items), (a.id, b.id)


def test_reduce_entries_are_complete_items(depth1):
    for sid, rids in depth1.reduce.items():
        done = {it.rule_id for it in depth1.state(sid).items if it.complete}
        assert set(rids) == done


def test_fixpoint(normal, depth1):
    cfg = depth1.lookahead
    for st in depth1.states:
        succ = successors(st, normal, cfg)
        assert [format_term(p) for p, _, _ in succ] == \
            [format_term(p) for p, _ in depth1.descend.get(st.id, ())]
        for (p, down, across), (_, d) in zip(succ, depth1.descend.get(st.id, ())):
            assert state_subsumes(depth1.state(d).items, down)
            g = depth1.goto[st.id][format_term(p)]
            assert state_subsumes(depth1.state(g).items, across)


def test_reduce_rules_replay(normal, depth1):
    for rids in depth1.reduce.values():
        for rid in rids:
            for r in depth1.expand(rid):
                if r.id != TOP_RULE:
                    assert replay(normal, r), r.id


def test_compilation_is_deterministic(normal, depth1):
    assert dumps(compile_tables(normal)) == dumps(depth1)


def test_table_file_round_trip(tmp_path, tuned):
    path = tmp_path / "t.tables"
    save(tuned, path)
    back = load(path)
    assert dumps(back) == dumps(tuned)
    assert format_states(back) == format_states(tuned)


def test_table_file_errors(tuned):
    with pytest.raises(TableError, match="not a table file"):
        loads("hello\n")
    lines = dumps(tuned).splitlines()
    head = json.loads(lines[0])
    head["version"] = 99
    with pytest.raises(TableError, match="version"):
        loads("\n".join([json.dumps(head)] + lines[1:]))


def test_state_cap(normal):
    with pytest.raises(TableError, match="more than 5"):
        compile_tables(normal, state_cap=5)


def test_depth_config_validation():
    with pytest.raises(ValueError):
        DepthConfig(0)
    cfg = DepthConfig(2).deepen("mod", 2, 1)
    assert cfg.arg_depths("mod", 2) == (1, 2)
    assert cfg.arg_depths("see", 2) == (1, 1)


def test_state_specific_override(normal):
    sig = GenState(1, initial_state("S").items).signature
    cfg = DepthConfig(1, state_overrides={(sig, "mod", 2): (0, 1)})
    t = compile_tables(normal, cfg=cfg)
    pats = [format_term(p) for p, _ in t.descend[1]]
    assert "mod(_,ynq)" in pats
    assert "mod(_,_)" in [format_term(p) for p, _ in t.descend[2]]


def test_rules_differing_only_in_template_stay_distinct():
    from surfgen.engine import generate
    g = normalize(parse_grammar("""top S.
        rule s: S(Y) -> NP(X) head VP(X^Y).
        rule a: VP(X^mod(Y,Z)) -> VP(X^Y) AdvP(Z).
        rule b: VP(X^mod(Y,Z)) -> AdvP(Z) VP(X^Y).
        rule v: VP(X) -> head Vi(X).
        lex j: NP(john) -> "John". lex z: Vi(X^sleep(X)) -> "sleeps".
        lex t: AdvP(today) -> "today"."""))
    t = compile_tables(g)
    got = sorted(r.text for r in generate(t, g, parse_term("mod(sleep(john),today)")))
    assert got == ["John sleeps today", "John today sleeps"]

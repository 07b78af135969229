import pytest

from surfgen.golden import compare_rules, inverted_lines, parse_rule_listing, read_data
from surfgen.grammar import Constituent, normalize, parse_grammar
from surfgen.invert import (
    ChainError, Extra, Own, enumerate_chains, format_inverted, format_template, goal_key,
    invert, replay, rules_for_goal,
)
from surfgen.term import Compound, fresh_var, parse_term, strip_lambdas


@pytest.fixture(scope="module")
def normal():
    return normalize(parse_grammar(read_data("sample.dcg")))


@pytest.fixture(scope="module")
def inverted(normal):
    return invert(normal)


def test_chain_from_s_to_sleeps(normal):
    chains = [str(c) for c in enumerate_chains(normal, ["S"])]
    assert "r2/r5/vi_sleeps" in chains
    assert "r1" in chains and "r2/r6/vt_sees" in chains


def test_single_chain_from_qm(normal):
    chains = enumerate_chains(normal, ["QM"])
    assert len(chains) == 1
    assert chains[0].filler_rule_ids == () and chains[0].terminal_functor_rule_id == "qm_ynq"


def test_no_chain_when_nothing_reaches(normal):
    g = normalize(parse_grammar('top QM. lex qm_ynq: QM(ynq) -> "?".'))
    assert enumerate_chains(g, ["S"]) == []


def test_accumulated_args(normal):
    chain = next(c for c in enumerate_chains(normal, ["S"]) if str(c) == "r2/r6/vt_sees")
    assert [a.cat for a in chain.accumulated_args] == ["NP", "NP"]


def test_inverted_matches_reference(inverted):
    assert len(inverted.rules) == 15
    missing, extra = compare_rules(inverted_lines(inverted.rules),
                                   parse_rule_listing(read_data("inverted.txt")))
    assert missing == [] and extra == []


def test_goals_reached_from_top(inverted):
    assert inverted.top_goal == "S(X)"
    assert set(inverted.goals) == {"S(X)", "QM(X)", "VP(X^Y)[NP(X)]", "AdvP(X)", "PP(X)", "NP(X)"}


def test_see_rhs_follows_argument_order(inverted):
    r = next(r for r in inverted.for_goal("S(X)") if r.id.endswith("vt_sees"))
    body = r.lf
    assert body.functor == "see"
    assert [c.sem for c in r.rhs] == list(body.args)
    assert format_template(r.template) == '$1 "sees" $0'


def test_templates_place_displaced_subject(inverted):
    r = next(r for r in inverted.for_goal("S(X)") if r.id == "S:r2/r3")
    assert r.template == (Extra(0, 0), Own(0), Own(1))
    vp = next(r for r in inverted.for_goal("VP(X^Y)[NP(X)]") if r.id.endswith("vi_sleeps"))
    assert vp.template == ("sleeps",) and vp.extras == ((Own(0),),)
    assert format_inverted(vp, template=True) == 'VP(X^sleep(X))[NP(X)] -> NP(X) : "sleeps" ; $0.'


def test_lexicon_only_grammar():
    g = normalize(parse_grammar('top NP. lex a: NP(john) -> "John". lex b: NP(mary) -> "Mary".'))
    rules = invert(g).rules
    assert [r.rhs for r in rules] == [(), ()]
    assert [r.template for r in rules] == [("John",), ("Mary",)]


def test_replay_every_rule(normal, inverted):
    for r in inverted.rules:
        assert replay(normal, r), r.id


def test_rhs_size_equals_lf_arity(inverted):
    for r in inverted.rules:
        body = r.lf
        arity = len(body.args) if isinstance(body, Compound) else 0
        assert len(r.rhs) == arity, r.id


def test_consumed_arguments(inverted):
    vp_see = next(r for r in inverted.rules if r.id == "VP:r6/vt_sees")
    assert vp_see.consumed == 1
    s_mod = next(r for r in inverted.rules if r.id == "S:r1")
    assert s_mod.consumed == 0


def test_cycle_is_rejected():
    g = normalize(parse_grammar('top S. rule c: VP(X) -> head VP(X). rule s: S(X) -> head VP(X).'
                                ' lex v: VP(x) -> "v".'))
    with pytest.raises(ChainError, match="cycle"):
        invert(g)


def test_chain_cap():
    g = normalize(parse_grammar("""top A.
        rule a: A(X) -> head B(X). rule b: B(X) -> head C(X). rule c: C(X) -> head D(X).
        lex d: D(x) -> "d"."""))
    assert len(rules_for_goal(g, Constituent("A", fresh_var()))) == 1
    with pytest.raises(ChainError, match="exceeds 2"):
        rules_for_goal(g, Constituent("A", fresh_var()), cap=2)


def test_consuming_functor_rule():
    g = normalize(parse_grammar("""top S.
        rule s: S(Y) -> NP(X) head V(X^Y).
        rule v: V(X^like(X,Z)) -> W(Z).
        lex w: W(cake) -> "likes cake".
        lex n: NP(ann) -> "Ann"."""))
    rules = invert(g).rules
    s = next(r for r in rules if r.id == "S:s/v")
    assert [c.cat for c in s.rhs] == ["NP", "W"]
    assert format_template(s.template) == "$0 $1"


def test_goal_key_frees_body():
    x = fresh_var()
    c = Constituent("VP", parse_term("Y^sleep(Y)", {"Y": x}), (Constituent("NP", x),))
    assert goal_key(c) == "VP(X^Y)[NP(X)]"
    assert strip_lambdas(c.sem)[1] == parse_term("sleep(Y)", {"Y": x})

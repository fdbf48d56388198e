import json

import pytest
from hypothesis import given, settings, strategies as st

from bdi_explain.errors import InvalidFoilError, NotAnActionError, NotInTraceError, NoValidFoilsError
from bdi_explain.explain import (
    Belief,
    Desire,
    Valuing,
    dumps,
    explain_contrastive,
    explain_full,
    explain_implicit,
    filter_pre,
    loads,
    render_text,
    size,
)
from bdi_explain.rng import Xoshiro256
from bdi_explain.trace import generate_trace
from bdi_explain.treegen import GenParams, gen_tree

from helpers import act, edge, goal, tree
from naive_oracle import Naive

B = Belief.of
NOT = lambda *atoms: Belief.of(*atoms, negated=True)  # noqa: E731

COFFEE_FULL = {
    Desire("getKitchenCoffee"),
    B("ownCard"),
    B("staffCardAvailable"),
    NOT("AnnInOffice"),
    Valuing("getOthersCard", "getOwnCard"),
    Valuing("getShopCoffee", "getKitchenCoffee"),
}
COFFEE_CONTRASTIVE = {B("ownCard"), Valuing("getOthersCard", "getOwnCard")}


def _run(coffee, coffee_trace):
    return coffee, coffee_trace.actions, coffee_trace.marking


# -- the coffee scenario ---------------------------------------------------------

def test_coffee_full(coffee, coffee_trace):
    fs = explain_full(*_run(coffee, coffee_trace), "getOwnCard")
    assert fs == COFFEE_FULL
    assert size(fs) == 6


def test_coffee_contrastive(coffee, coffee_trace):
    fs = explain_contrastive(*_run(coffee, coffee_trace), "getOwnCard", "getOthersCard")
    assert fs == COFFEE_CONTRASTIVE
    assert size(fs) == 2


def test_coffee_contrastive_against_other_branch(coffee, coffee_trace):
    fs = explain_contrastive(*_run(coffee, coffee_trace), "getOwnCard", "goto(shop)")
    assert Desire("getKitchenCoffee") in fs
    assert Valuing("getShopCoffee", "getKitchenCoffee") in fs
    assert Valuing("getOthersCard", "getOwnCard") in fs


def test_coffee_implicit_is_union_of_contrastive(coffee, coffee_trace):
    t, trace, marking = _run(coffee, coffee_trace)
    naive = Naive(coffee)
    union = set()
    for f in coffee.valid_foils("getOwnCard"):
        union |= naive.explain(trace, marking, "getOwnCard", f)
    assert explain_implicit(t, trace, marking, "getOwnCard") == union == COFFEE_FULL


def test_coffee_later_action_filters_achieved_preconditions(coffee, coffee_trace):
    fs = explain_full(*_run(coffee, coffee_trace), "getCoffee(kitchen)")
    # haveCard and at(kitchen) are produced by actions sequenced before it
    assert fs == {Desire("getKitchenCoffee"), B("staffCardAvailable"), NOT("AnnInOffice"),
                  Valuing("getShopCoffee", "getKitchenCoffee")}


# -- filter -------------------------------------------------------------------------

def test_filter_removes_sequenced_postcondition(coffee):
    trace = ("goto(shop)", "pay(shop)", "getCoffee(shop)")
    assert filter_pre("getCoffee(shop)", trace, coffee) == set()
    assert filter_pre("pay(shop)", trace, coffee) == {"haveMoney"}
    assert filter_pre("goto(shop)", trace, coffee) == set()


def test_filter_keeps_precondition_from_parallel_sibling():
    t = tree(goal("G", "all", act("A1", post=["q"]), act("A2", pre=["q"])))
    assert filter_pre("A2", ("A1", "A2"), t) == {"q"}


def test_filter_ignores_producer_not_in_trace():
    t = tree(goal("G", "seq", act("A1", post=["q"]), act("A2", pre=["q"])))
    assert filter_pre("A2", ("A2",), t) == {"q"}


def test_filter_requires_action_in_trace(coffee):
    with pytest.raises(NotInTraceError):
        filter_pre("getPod", ("goto(office)",), coffee)


# -- small worked trees ---------------------------------------------------------------

def test_seq_goal_explanation():
    t = tree(goal("G", "seq", act("A1", pre=["p"], post=["q"]), act("A2", pre=["q", "r"])))
    assert explain_full(t, ("A1", "A2"), {}, "A2") == {Desire("G"), B("p"), B("r")}


def test_xone_contrastive():
    t = tree(goal("G", "xone", edge(act("A", pre=["pA"]), ["cA"]), edge(act("B"), ["cB"])))
    fs = explain_contrastive(t, ("A",), {"G": True, "A": True, "B": False}, "A", "B")
    assert fs == {B("pA"), B("cA")}


def test_one_sibling_marking_decides_belief_or_valuing():
    t = tree(goal("G", "one", edge(act("A"), ["a"]), edge(act("B"), ["b1", "b2"]), act("C")))
    not_b = explain_full(t, ("A",), {"A": True, "B": False}, "A")
    assert NOT("b1", "b2") in not_b and Valuing("B", "A") not in not_b
    # C has no condition so it is held: the agent preferred A over it
    assert Valuing("C", "A") in not_b
    yes_b = explain_full(t, ("A",), {"A": True, "B": True}, "A")
    assert Valuing("B", "A") in yes_b and NOT("b1", "b2") not in yes_b
    unknown = explain_full(t, ("A",), {"A": True}, "A")
    assert Valuing("B", "A") not in unknown and NOT("b1", "b2") not in unknown
    assert size(not_b) == 3  # B:a, B:~(b1 & b2), V:C<A


def test_sone_full_and_contrastive():
    kids = [edge(act(f"A{i}"), [f"c{i}"], i) for i in range(1, 5)]
    t = tree(goal("G", "sone", *kids))
    marking = {"A1": False, "A2": False, "A3": True}
    assert explain_full(t, ("A3",), marking, "A3") == {B("c3"), NOT("c1"), NOT("c2")}
    # only siblings tried at or after the foil matter
    assert explain_contrastive(t, ("A3",), marking, "A3", "A2") == {B("c3"), NOT("c2")}
    assert explain_contrastive(t, ("A3",), marking, "A3", "A4") == {B("c3")}


def test_errors(coffee, coffee_trace):
    t, trace, marking = _run(coffee, coffee_trace)
    with pytest.raises(NotInTraceError, match="I didn't do getPod"):
        explain_full(t, trace, marking, "getPod")
    with pytest.raises(NotInTraceError):
        explain_contrastive(t, trace, marking, "getPod", "getOwnCard")
    with pytest.raises(InvalidFoilError):
        explain_contrastive(t, trace, marking, "getOwnCard", "getOwnCard")
    with pytest.raises(InvalidFoilError):
        explain_contrastive(t, trace, marking, "getOwnCard", "getCoffee(shop)")
    with pytest.raises(NoValidFoilsError):
        explain_implicit(t, trace, marking, "goto(kitchen)")
    with pytest.raises(NotAnActionError):
        explain_full(t, trace, marking, "getStaffCard")


def test_first_occurrence_is_explained():
    t = tree(goal("G", "seq", act("A1", pre=["p"]), act("A2", pre=["r"])))
    assert explain_full(t, ("A1", "A2", "A1"), {}, "A1") == {Desire("G"), B("p")}


# -- rendering and serialization ------------------------------------------------------

def test_render_text(coffee, coffee_trace):
    text = render_text(explain_full(*_run(coffee, coffee_trace), "getOwnCard"), coffee)
    assert text.splitlines() == [
        "I want to getKitchenCoffee",
        "because not AnnInOffice",
        "because ownCard",
        "because staffCardAvailable",
        "I prefer getKitchenCoffee over getShopCoffee",
        "I prefer getOwnCard over getOthersCard",
    ]
    assert render_text([]) == "(no factors)"
    assert render_text([NOT("b", "a")]) == "because not (a and b)"


def test_factor_strings():
    assert str(Desire("g")) == "D:g"
    assert str(B("p")) == "B:p"
    assert str(NOT("p")) == "B:~p"
    assert str(NOT("b", "a")) == "B:~(a & b)"
    assert str(Valuing("a", "b")) == "V:a<b"
    with pytest.raises(ValueError):
        Belief(frozenset())
    with pytest.raises(ValueError):
        Valuing("a", "a")


def test_json_roundtrip(coffee, coffee_trace):
    fs = explain_full(*_run(coffee, coffee_trace), "getOwnCard")
    text = dumps(fs)
    doc = json.loads(text)
    assert doc["size"] == 6
    assert {"kind": "belief", "polarity": "negated", "content": ["AnnInOffice"]} in doc["factors"]
    assert {"kind": "valuing", "less": "getOthersCard", "more": "getOwnCard"} in doc["factors"]
    assert loads(text) == fs
    assert dumps(fs) == dumps(set(fs))  # stable ordering


# -- properties on generated trees -------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**40)


def _scenarios(seed, post_prob=0.0, delta=4, epsilon=3):
    t = gen_tree(GenParams(0.5, delta, epsilon, 0, seed, post_prob), Xoshiro256(seed))
    for k, x in enumerate(t.action_ids):
        trace, marking = generate_trace(t, x, Xoshiro256(seed ^ (k + 1)))
        yield t, trace, marking, x


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([0.0, 0.3]))
def test_matches_naive_oracle(seed, post_prob):
    for t, trace, marking, x in _scenarios(seed, post_prob):
        naive = Naive(t)
        assert explain_full(t, trace, marking, x) == naive.explain(trace, marking, x)
        for f in t.valid_foils(x):
            assert explain_contrastive(t, trace, marking, x, f) == naive.explain(trace, marking, x, f)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_contrastive_subset_of_full(seed):
    for t, trace, marking, x in _scenarios(seed, delta=5, epsilon=4):
        full = explain_full(t, trace, marking, x)
        for f in t.valid_foils(x):
            assert explain_contrastive(t, trace, marking, x, f) <= full


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_one_sibling_never_both_belief_and_valuing(seed):
    for t, trace, marking, x in _scenarios(seed):
        fs = explain_full(t, trace, marking, x)
        valued = {v.less for v in fs if isinstance(v, Valuing)}
        for n in valued:
            assert Belief(t.cond(n), negated=True) not in fs or any(
                t.cond(m) == t.cond(n) and m != n for m in t.ids)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_deterministic(seed):
    a = [(explain_full(t, tr, m, x), tr) for t, tr, m, x in _scenarios(seed)]
    b = [(explain_full(t, tr, m, x), tr) for t, tr, m, x in _scenarios(seed)]
    assert a == b

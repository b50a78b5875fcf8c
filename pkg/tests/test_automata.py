import random

import pytest

from oracles import all_terms, direct_run, grammar_derives, random_automaton
from regsyn.automata import (
    TreeGrammar,
    canonical,
    complete,
    enumerate_language,
    grammar_to_automaton,
    intersect,
    is_empty,
    isomorphic,
    language_equal_up_to,
    make_automaton,
    member,
    product,
    run,
    to_dot,
    trim,
    union,
    universal_automaton,
    universal_grammar,
    witness,
    AND,
)
from regsyn.errors import AlphabetError
from regsyn.terms import Term

a, b, x = Term("a"), Term("b"), Term("x")


def g(t, n=1):
    for _ in range(n):
        t = Term("g", [t])
    return t


SIGMA = {"a": 0, "b": 0, "g": 1}
REGEX1_AUTO = make_automaton(
    {"g": 1, "a": 0, "x": 0},
    {("a", ()): 1, ("x", ()): 1, ("g", (1,)): 2, ("g", (2,)): 1},
    {2},
    variables=("x",),
)


def rand_auto(rng, alphabet, n, acc=1, variables=()):
    trans, states, accepting = random_automaton(rng, alphabet, n, n_accepting=acc)
    return make_automaton(alphabet, trans, accepting, states, variables), trans, accepting


def test_grammar_single_constant():
    auto = grammar_to_automaton(TreeGrammar(("S",), "S", (("S", a),)))
    assert list(enumerate_language(auto, 5)) == [a]


def test_grammar_towers_match_derivations():
    prods = (("S", Term("g", [Term("S")])), ("S", a))
    auto = grammar_to_automaton(TreeGrammar(("S",), "S", prods))
    for t in all_terms({"a": 0, "g": 1}, 7):
        assert member(auto, t) == ("S" in grammar_derives(prods, ["S"], t))


def test_universal_grammar_one_state():
    auto = trim(grammar_to_automaton(universal_grammar({"a": 0, "g": 1, "x": 0})))
    assert len(auto) == 1 and auto.is_complete


def test_grammar_with_chain_rules_random():
    rng = random.Random(5)
    nts = ["S", "A", "B"]
    alphabet = {"a": 0, "b": 0, "g": 1, "k": 2}
    for _ in range(30):
        prods = []
        for nt in nts:
            for _ in range(rng.randint(1, 3)):
                kind = rng.random()
                if kind < 0.2:
                    prods.append((nt, Term(rng.choice(nts))))
                elif kind < 0.5:
                    prods.append((nt, Term(rng.choice("ab"))))
                elif kind < 0.8:
                    prods.append((nt, Term("g", [Term(rng.choice(nts + ["a"]))])))
                else:
                    prods.append((nt, Term("k", [Term(rng.choice(nts)), Term(rng.choice(nts + ["b"]))])))
        gr = TreeGrammar(tuple(nts), "S", tuple(prods))
        auto = grammar_to_automaton(gr)
        for t in all_terms(alphabet, 5):
            assert member(auto, t) == ("S" in grammar_derives(prods, nts, t)), (prods, t)


def test_run_regex1_automaton():
    assert run(REGEX1_AUTO, a) == 1
    assert run(REGEX1_AUTO, g(g(a))) == 1
    assert run(REGEX1_AUTO, g(x)) == 2


def test_run_undefined_and_unknown_symbol():
    auto = make_automaton({"a": 0, "h": 1}, {("a", ()): 1}, {1})
    assert run(auto, Term("h", [a])) is None
    with pytest.raises(AlphabetError):
        run(auto, b)


def test_self_intersection_same_language():
    rng = random.Random(1)
    for _ in range(20):
        auto, _, _ = rand_auto(rng, SIGMA, 3)
        assert language_equal_up_to(intersect(auto, auto), auto, 5)


def test_union_of_singletons():
    la = make_automaton(SIGMA, {("a", ()): 1}, {1})
    lb = make_automaton(SIGMA, {("b", ()): 1}, {1})
    u = union(la, lb)
    assert member(u, a) and member(u, b)
    assert not member(u, g(a))


def test_product_state_bound_and_membership():
    rng = random.Random(2)
    for _ in range(50):
        p1, t1, acc1 = rand_auto(rng, SIGMA, rng.randint(1, 4))
        p2, t2, acc2 = rand_auto(rng, SIGMA, rng.randint(1, 4))
        prod = product(p1, p2, AND)
        assert len(prod) <= len(p1) * len(p2)
        for t in all_terms(SIGMA, 5):
            q1, q2 = direct_run(t1, t), direct_run(t2, t)
            expected = q1 in acc1 and q2 in acc2
            assert member(prod, t) == expected


def test_complete_adds_sink_only():
    auto = make_automaton(SIGMA, {("a", ()): 1}, {1})
    c = complete(auto)
    assert c.is_complete and len(c) == 2
    assert language_equal_up_to(c, auto, 5)


def test_empty_accepting_set():
    auto = make_automaton(SIGMA, {("a", ()): 1}, set())
    assert is_empty(auto) and witness(auto) is None


def test_regex1_witness_prefers_variable():
    assert witness(REGEX1_AUTO) == g(x)


def test_witness_always_accepted():
    rng = random.Random(3)
    seen = 0
    while seen < 100:
        auto, _, _ = rand_auto(rng, {"a": 0, "g": 1, "k": 2}, rng.randint(1, 4))
        w = witness(auto)
        if w is None:
            assert is_empty(auto)
            continue
        seen += 1
        assert member(auto, w)


def test_enumerate_universal_single_constant():
    assert list(enumerate_language(universal_automaton({"a": 0}), 1)) == [a]


def test_enumerate_regex1_odd_towers():
    assert list(enumerate_language(REGEX1_AUTO, 4)) == [g(x), g(a), g(x, 3), g(a, 3)]


def test_member_agrees_with_enumeration():
    rng = random.Random(4)
    alphabet = {"a": 0, "b": 0, "g": 1, "k": 2}
    for _ in range(100):
        auto, trans, acc = rand_auto(rng, alphabet, rng.randint(1, 3))
        listed = set(enumerate_language(auto, 6))
        for t in all_terms(alphabet, 6):
            assert (t in listed) == member(auto, t) == (direct_run(trans, t) in acc)


def test_enumeration_order_is_by_size():
    sizes = [t.size for t in enumerate_language(universal_automaton({"a": 0, "g": 1, "k": 2}), 5)]
    assert sizes == sorted(sizes)


def test_trim_and_canonical_preserve_language():
    rng = random.Random(6)
    for _ in range(30):
        auto, _, _ = rand_auto(rng, SIGMA, 4, acc=2)
        t = trim(auto)
        assert language_equal_up_to(t, auto, 5)
        assert isomorphic(canonical(t), t)


def test_dot_counts():
    text = to_dot(REGEX1_AUTO)
    assert text.startswith("digraph")
    assert text.count("shape=circle") + text.count("shape=doublecircle") == len(REGEX1_AUTO)
    assert text.count("doublecircle") == 1

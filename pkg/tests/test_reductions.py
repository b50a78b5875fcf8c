import itertools

import pytest

from conftest import PROBLEMS
from regsyn.automata import enumerate_language, grammar_to_automaton
from regsyn.cfg import Nonterminal, enumerate_strings, parse_term_string
from regsyn.errors import MalformedCandidate, ProblemSyntaxError
from regsyn.problem import parse_problem, print_problem
from regsyn.reductions import (
    PcpInstance,
    bounded_solve,
    check_bv_candidate,
    check_pcp_candidate,
    counter_model_holds,
    decode_indices,
    euf_oracle,
    gen_cfg_bv,
    gen_pcp_arrays,
    gen_pcp_regular,
    gen_pcp_tree,
    gen_pcp_wellformed,
    gen_sreu,
    oracle_for,
    parse_cfg_pair,
    parse_sreu,
    pcp_term,
    sreu_candidate,
)
from regsyn.reductions.bounded import candidates
from regsyn.reductions.pcp import counter_model_value, wellformed_alphabet
from regsyn.terms import Term

EXAMPLE = PcpInstance.from_json(PROBLEMS / "pcp_example.json")


def chain(*syms, inner="x"):
    t = Term(inner)
    for s in reversed(syms):
        t = Term(s, [t])
    return t


# ---------------------------------------------------------------- PCP


def test_instance_solution():
    assert EXAMPLE.is_solution([1, 2, 2, 3])
    top = "".join(EXAMPLE.pairs[i - 1][0] for i in [1, 2, 2, 3])
    assert top == "bbababb"
    assert not PcpInstance((("bb", "b"),)).is_solution([1])


def test_tree_rule_for_first_pair():
    p = gen_pcp_tree(PcpInstance((("bb", "b"),)))
    rules = p.grammar.rules_for("S")
    assert chain("gb", "gb", "gbp", inner="V") in rules


def test_tree_variant_round_trips_and_is_deterministic():
    p = gen_pcp_tree(EXAMPLE)
    text = print_problem(p)
    assert parse_problem(text) == p
    assert print_problem(gen_pcp_tree(EXAMPLE)) == text
    assert "(gb (gb (gbp V)))" in text


def test_tree_grammar_size_linear():
    for k in (1, 2, 4, 8):
        inst = PcpInstance(tuple(EXAMPLE.pairs) * k)
        g = gen_pcp_tree(inst).grammar
        size = sum(rhs.size for _, rhs in g.productions)
        letters = sum(len(s) + len(t) for s, t in inst.pairs)
        assert size <= 2 * (letters + len(inst.pairs)) + 1


def test_pcp_term_decodes():
    w = pcp_term(EXAMPLE, [1, 2, 2, 3])
    assert decode_indices(EXAMPLE, w) == [1, 2, 2, 3]
    assert check_pcp_candidate(EXAMPLE, w)
    assert not check_pcp_candidate(EXAMPLE, pcp_term(EXAMPLE, [1]))


def test_decode_rejects_foreign_terms():
    with pytest.raises(MalformedCandidate):
        decode_indices(EXAMPLE, chain("h", "gb"))
    with pytest.raises(MalformedCandidate):
        decode_indices(EXAMPLE, Term("x"))


def test_candidate_1223_is_in_the_grammar():
    p = gen_pcp_tree(EXAMPLE)
    auto = grammar_to_automaton(p.tree_grammar())
    w = pcp_term(EXAMPLE, [1, 2, 2, 3])
    assert w in set(enumerate_language(auto, w.size))


def test_checker_agrees_with_counter_model():
    p = gen_pcp_tree(EXAMPLE)
    cands = list(candidates(p, 10))
    assert len(cands) >= 20
    for w in cands:
        assert check_pcp_candidate(EXAMPLE, w) == counter_model_holds(w)


def test_counter_model_satisfies_axioms():
    ev = counter_model_value
    for n in range(4):
        for word in itertools.product(["ga", "gb", "gap", "gbp"], repeat=n):
            y = chain(*word)
            for g, gp in (("ga", "gap"), ("gb", "gbp")):
                other = "gbp" if g == "ga" else "gap"
                assert ev(Term(g, [Term(other, [y])])) == ev(Term(other, [Term(g, [y])]))
                assert ev(Term("h", [Term(g, [Term(gp, [y])])])) == ev(Term("h", [y]))


def test_euf_oracle_refutes_non_solutions():
    p = gen_pcp_tree(EXAMPLE, y_depth=1)
    oracle = euf_oracle(p)
    assert not oracle(pcp_term(EXAMPLE, [1]))
    assert not oracle(pcp_term(EXAMPLE, [3]))


def test_bounded_finds_pcp_solutions():
    p = gen_pcp_tree(EXAMPLE)
    v = bounded_solve(p, oracle_for(p), 15, collect=True)
    assert v.solvable
    found = [decode_indices(EXAMPLE, w) for w in v.found]
    assert [1, 2, 2, 3] in found
    assert all(EXAMPLE.is_solution(ix) for ix in found)
    assert found[0] == [1, 3]


def test_bounded_unknown_without_solution():
    inst = PcpInstance((("a", "b"),))
    p = gen_pcp_tree(inst)
    v = bounded_solve(p, oracle_for(p), 12)
    assert v.outcome == "unknown" and v.witness is None


def _wellformed(tokens, p):
    return parse_term_string("".join(tokens), p.candidate_alphabet)


def test_regular_variant_matches_tree_variant():
    tree = gen_pcp_tree(EXAMPLE)
    reg = gen_pcp_regular(EXAMPLE)
    assert parse_problem(print_problem(reg)) == reg
    tree_terms = {t for t in candidates(tree, 12)}
    reg_terms = set()
    for tokens in enumerate_strings(reg.grammar, 3 * 11 + 1):
        t = _wellformed(tokens, reg)
        if t is not None and t.size <= 12:
            reg_terms.add(t)
    assert tree_terms == reg_terms


def test_regular_grammar_is_right_regular():
    g = gen_pcp_regular(EXAMPLE).grammar
    for _, body in g.productions:
        assert all(not isinstance(i, Nonterminal) for i in body[:-1])


def test_arrays_variant():
    p = gen_pcp_arrays(EXAMPLE)
    assert parse_problem(print_problem(p)) == p
    assert p.symbols["read"] == 2
    v = bounded_solve(p, oracle_for(p), 29, collect=True)
    assert [1, 2, 2, 3] in [decode_indices(EXAMPLE, w) for w in v.found]


def _derive(p, indices):
    """Token string for the derivation choosing pair ``i`` at each step."""
    rules = [body for lhs, body in p.grammar.productions if lhs == "S"]
    out = (Nonterminal("V"),)
    for i in indices:
        k = out.index(Nonterminal("V"))
        out = out[:k] + rules[i - 1] + out[k + 1 :]
    k = out.index(Nonterminal("V"))
    return out[:k] + ("x",) + out[k + 1 :]


def test_wellformed_variant_characterizes_solutions():
    p = gen_pcp_wellformed(EXAMPLE)
    alphabet = wellformed_alphabet()
    for n in range(1, 5):
        for seq in itertools.product(range(1, 4), repeat=n):
            tokens = _derive(p, seq)
            assert (parse_term_string("".join(tokens), alphabet) is not None) == EXAMPLE.is_solution(seq), seq


def test_wellformed_variant_bounded():
    p = gen_pcp_wellformed(EXAMPLE)
    v = bounded_solve(p, oracle_for(p), 30)
    assert v.solvable
    with pytest.raises(ValueError):
        gen_pcp_wellformed(EXAMPLE, 2, 2)


def test_pcp_info_round_trip():
    assert PcpInstance.from_info(EXAMPLE.info()) == EXAMPLE


# ---------------------------------------------------------------- SREU

ONE = "(vars x1)\n(rigid ((= x1 c)) (= x1 c))\n"
TWO = "(vars x1 x2)\n(rigid ((= (g x1) c)) (= (g x2) c))\n(rigid () (= x1 x2))\n"


def test_sreu_single_equation_solved():
    s = parse_sreu(ONE)
    p = gen_sreu(s)
    w = sreu_candidate(s, {"x1": Term("c")})
    assert str(w) == "(ite (= x a_1) c bot)"
    assert euf_oracle(p)(w)


def test_sreu_two_variables_shape():
    s = parse_sreu(TWO)
    p = gen_sreu(s)
    ite_rules = [rhs for _, rhs in p.grammar.productions if rhs.head == "ite"]
    assert len(ite_rules) == 2
    assert sum(1 for r in ite_rules if r.args[2] == Term("bot")) == 1
    text = print_problem(p)
    assert "(not (= a_1 a_2))" in text
    assert parse_problem(text) == p


def test_sreu_known_solution_verifies():
    s = parse_sreu(TWO)
    p = gen_sreu(s)
    good = sreu_candidate(s, {"x1": Term("c"), "x2": Term("c")})
    bad = sreu_candidate(s, {"x1": Term("c"), "x2": Term("g", [Term("c")])})
    assert euf_oracle(p)(good)
    assert not euf_oracle(p)(bad)


def test_sreu_example_file():
    s = parse_sreu((PROBLEMS / "sreu_example.txt").read_text())
    p = gen_sreu(s)
    assert euf_oracle(p)(sreu_candidate(s, {"x1": Term("c")}))


def test_sreu_parse_errors():
    with pytest.raises(ProblemSyntaxError):
        parse_sreu("(rigid () (= a a))")
    with pytest.raises(ProblemSyntaxError):
        parse_sreu("(vars x1)\n(rigid (= a a))")


# ---------------------------------------------------------------- CFG / BV


def test_cfg_encoding_width():
    pair = parse_cfg_pair('S -> "a"\n%%\nT -> "b"')
    assert pair.width == 2
    assert pair.encoding() == {"a": "00", "b": "01"}


def test_cfg_same_language_unknown():
    p = gen_cfg_bv(parse_cfg_pair((PROBLEMS / "cfg_same.txt").read_text()))
    for w in candidates(p, 8):
        assert not check_bv_candidate(w)
    assert bounded_solve(p, oracle_for(p), 8).outcome == "unknown"


def test_cfg_disjoint_solvable():
    p = gen_cfg_bv(parse_cfg_pair((PROBLEMS / "cfg_disjoint.txt").read_text()))
    v = bounded_solve(p, oracle_for(p), 8)
    assert v.solvable and str(v.witness) == "(= b00 b01)"
    assert parse_problem(print_problem(p)) == p


def test_cfg_recursive_grammar():
    pair = parse_cfg_pair('S -> "a" S | "a"\n%%\nT -> "a" "a"')
    p = gen_cfg_bv(pair)
    ws = list(candidates(p, 9))
    assert any(not check_bv_candidate(w) for w in ws)
    assert any(check_bv_candidate(w) for w in ws)


def test_bv_checker_rejects_malformed():
    with pytest.raises(MalformedCandidate):
        check_bv_candidate(Term("b0"))


# ---------------------------------------------------------------- bounded driver


def test_bounded_results_reverify():
    for p in (gen_pcp_tree(EXAMPLE), gen_cfg_bv(parse_cfg_pair('S -> "a"\n%%\nT -> "b"'))):
        oracle = oracle_for(p)
        v = bounded_solve(p, oracle, 15, collect=True)
        assert all(oracle(w) for w in v.found)


def test_string_enumeration_order_and_completeness():
    pair = parse_cfg_pair('S -> "a" S "b" | "c"\n%%\nT -> "c"')
    words = list(enumerate_strings(pair.g1, 7))
    assert words == [("c",), ("a", "c", "b"), ("a", "a", "c", "b", "b"), ("a", "a", "a", "c", "b", "b", "b")]

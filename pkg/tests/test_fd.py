import random

import numpy as np
import pytest

from conftest import PROBLEMS, load
from oracles import (
    boolean_problem,
    brute_force_solvable,
    functions_by_size,
    py_eval,
    random_boolean_instance,
)
from regsyn.errors import ModelMismatch, ResourceLimit
from regsyn.fd import (
    boolean_model,
    bv_model,
    eval_formula,
    eval_term,
    fixpoint_enumerate,
    function_table,
    load_model,
    problem_variables,
    solve_fd,
)
from regsyn.problem import parse_problem
from regsyn.terms import SecondOrderSubstitution, Term, apply_second_order

x, y = Term("x"), Term("y")
B = boolean_model()


def xor(s, t):
    return Term("xor", [s, t])


def lnot(s):
    return Term("not", [s])


def test_boolean_model_tables():
    assert B.domain == 2
    assert eval_term(B, xor(x, y), {"x": 1, "y": 1}) == 0
    assert set(B.symbols) == {"xor", "and", "or", "not", "true", "false"}


def test_tautology_and_simplification():
    for vx in (0, 1):
        for vy in (0, 1):
            assert eval_term(B, xor(lnot(y), y), {"x": vx, "y": vy}) == 1
    assert function_table(B, xor(xor(x, y), lnot(y)), ["x", "y"]) == function_table(B, lnot(x), ["x", "y"])


def test_load_model_matches_builtin():
    m = load_model(PROBLEMS / "boolean.json")
    for name in ("xor", "and", "or", "not"):
        assert np.array_equal(m.functions[name], B.functions[name])
    assert m.constants == B.constants


def test_model_validation():
    with pytest.raises(ValueError):
        load_model({"domain": 2, "constants": {"zero": 0}, "functions": {}})
    with pytest.raises(ValueError):
        load_model({"domain": 2, "constants": {"z": 0, "o": 1}, "functions": {"n": {"arity": 1, "table": [2, 0]}}})


def test_xor_iterations():
    p = load("xor.sl")
    res = fixpoint_enumerate(B, p.tree_grammar(), ["x", "y"])
    h = res.history
    assert h[0] == {"S": [], "A": [x], "B": [y]}
    assert h[1] == {"S": [xor(x, y)], "A": [lnot(y)], "B": []}
    assert h[2]["S"] == [xor(lnot(y), y)]
    assert h[2]["B"] == [xor(xor(x, y), lnot(y))]
    assert not any(h[-1].values())


def test_xor_counts_match_brute_force():
    p = load("xor.sl")
    g = p.tree_grammar()
    res = fixpoint_enumerate(B, g, ["x", "y"])
    brute = functions_by_size(g.productions, g.nonterminals, ["x", "y"], 15)
    assert res.counts() == {nt: len(fs) for nt, fs in brute.items()}
    assert res.counts() == {"S": 2, "A": 2, "B": 2}


def test_sets_only_grow_and_tables_distinct():
    p = load("xor.sl")
    res = fixpoint_enumerate(B, p.tree_grammar(), ["x", "y"])
    for nt, es in res.sets.items():
        tabs = [tab.tobytes() for _, tab in es]
        assert len(tabs) == len(set(tabs))
    total = 0
    for step in res.history:
        total += sum(len(v) for v in step.values())
    assert total == sum(res.counts().values())


def test_xor_unsolvable():
    v = solve_fd(load("xor.sl"), B)
    assert v.outcome == "unsolvable" and v.engine == "fd"


def _xor_problem(rules):
    return parse_problem(
        "(set-logic FD)\n(declare-fun xor (Bool Bool) Bool)\n(declare-var x Bool)\n"
        f"(synth-fun f () Bool ((S Bool)) ((S Bool ({rules}))))\n(constraint (xor x f))\n"
    )


def test_negation_grammar_solvable():
    v = solve_fd(_xor_problem("(not x) x"), B)
    assert v.solvable and v.witness == lnot(x)


def test_unknown_symbol_in_grammar():
    p = parse_problem(
        "(set-logic FD)\n(declare-fun nand (Bool Bool) Bool)\n(declare-var x Bool)\n"
        "(synth-fun f () Bool ((S Bool)) ((S Bool ((nand x x) x))))\n(constraint (= f x))\n"
    )
    with pytest.raises(ModelMismatch):
        solve_fd(p, B)


def test_bv_model_add():
    m = bv_model(2, ["add"])
    assert m.domain == 4
    assert eval_term(m, Term("bvadd", [Term("bv1"), Term("bv3")]), {}) == 0


def test_bv_model_width_limit():
    with pytest.raises(ResourceLimit):
        bv_model(5)


def test_bv_solve_double():
    p = parse_problem(
        "(set-logic FD)\n(declare-fun bvadd (BV BV) BV)\n(declare-var y BV)\n"
        "(synth-fun f ((x BV)) BV ((S BV)) ((S BV (x (bvadd x x)))))\n"
        "(constraint (= (f y) (bvadd y y)))\n"
    )
    v = solve_fd(p, bv_model(2, ["add"]))
    assert v.solvable and str(v.witness) == "(bvadd x x)"


def test_eval_formula_connectives():
    assert eval_formula(B, Term("=>", [Term("false"), Term("=", [x, y])]), {"x": 0, "y": 1})
    assert not eval_formula(B, Term("=", [x, y]), {"x": 0, "y": 1})


def test_solve_fd_random_against_brute_force():
    rng = random.Random(30)
    for _ in range(30):
        grammar, phi = random_boolean_instance(rng)
        v = solve_fd(boolean_problem(grammar, phi), B)
        assert v.solvable == brute_force_solvable(grammar, phi), (grammar, phi)
        if v.solvable:
            psi = apply_second_order(phi, SecondOrderSubstitution("f", (), v.witness))
            assert all(py_eval(psi, {"x": a, "y": b}) for a in (0, 1) for b in (0, 1))


def test_problem_variables_with_forall():
    p = parse_problem(
        "(set-logic FD)\n(declare-fun xor (Bool Bool) Bool)\n"
        "(synth-fun f ((z Bool)) Bool ((S Bool)) ((S Bool ((not z) z))))\n"
        "(constraint (forall ((u Bool)) (xor u (f u))))\n"
    )
    vs, phi = problem_variables(p)
    assert vs == ("u",)
    assert solve_fd(p, B).witness == lnot(Term("z"))

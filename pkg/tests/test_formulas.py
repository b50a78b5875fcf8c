import random

import pytest

from oracles import model_search_valid, random_formula, truth_table_equivalent
from regsyn.congruence import ground_formula_valid
from regsyn.errors import ResourceLimit, Unsupported
from regsyn.formulas import (
    Signature,
    clauses_to_formula,
    conj,
    desugar_ite,
    dnf_to_formula,
    eq,
    has_ite,
    implies,
    ite,
    neg,
    skolemize_universals,
    to_cnf,
    to_dnf,
)
from regsyn.terms import Term

a, b, c, d = (Term(n) for n in "abcd")
ALPHABET = {"a": 0, "b": 0, "c": 0, "g": 1}


def test_desugar_without_ite_is_identity():
    phi = implies(eq(a, b), eq(b, a))
    assert desugar_ite(phi) == phi


def test_desugar_single_ite():
    phi = eq(ite(eq(a, b), a, c), b)
    out = desugar_ite(phi)
    assert not has_ite(out)
    assert out.head == "=>"
    defs, body = out.args
    assert body == eq(Term("c_ite_1"), b)
    assert len(defs.args) == 2
    assert implies(eq(a, b), eq(Term("c_ite_1"), a)) in defs.args
    assert implies(neg(eq(a, b)), eq(Term("c_ite_1"), c)) in defs.args


def test_desugar_preserves_validity_random():
    rng = random.Random(7)
    for _ in range(50):
        phi = random_formula(rng, ALPHABET, 3, term_depth=1, ite_rate=0.4)
        assert model_search_valid(desugar_ite(phi)) == model_search_valid(phi), phi


def test_skolemize_xor_constraint():
    sig = Signature({"xor": 2}, "f", ())
    phi = Term("forall", [Term("x"), Term("y"), Term("xor", [Term("x"), Term("f")])])
    out, sig2 = skolemize_universals(phi, sig)
    assert out == Term("xor", [Term("sk_x"), Term("f")])
    assert sig2.symbols["sk_x"] == 0 and sig2.symbols["sk_y"] == 0


def test_skolemize_quantifier_free_unchanged():
    sig = Signature({"a": 0, "b": 0}, "f", ())
    phi = eq(a, b)
    out, sig2 = skolemize_universals(phi, sig)
    assert out == phi and sig2 == sig


def test_skolemize_rejects_existential():
    sig = Signature({"a": 0}, "f", ())
    with pytest.raises(Unsupported):
        skolemize_universals(Term("exists", [Term("x"), eq(Term("x"), a)]), sig)


def test_cnf_of_conjunction_is_two_units():
    cls = to_cnf(conj(eq(a, b), eq(c, d)))
    assert sorted(cls, key=str) == sorted([((True, eq(a, b)),), ((True, eq(c, d)),)], key=str)


def test_dnf_of_negated_implication():
    out = to_dnf(neg(implies(eq(a, b), eq(c, d))))
    assert len(out) == 1
    assert set(out[0]) == {(True, eq(a, b)), (False, eq(c, d))}


def test_normal_forms_truth_table_equivalent():
    rng = random.Random(11)
    for _ in range(100):
        phi = random_formula(rng, ALPHABET, 3)
        assert truth_table_equivalent(clauses_to_formula(to_cnf(phi)), phi), phi
        assert truth_table_equivalent(dnf_to_formula(to_dnf(phi)), phi), phi


def test_cnf_clause_limit():
    big = conj(*[Term("or", [eq(Term(f"p{i}"), a), eq(Term(f"q{i}"), b)]) for i in range(18)])
    with pytest.raises(ResourceLimit):
        to_dnf(big)


def test_ground_formula_valid_agrees_with_model_search():
    rng = random.Random(3)
    for _ in range(60):
        phi = random_formula(rng, ALPHABET, 2)
        assert ground_formula_valid(phi) == model_search_valid(phi), phi

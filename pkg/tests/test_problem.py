import pytest

from conftest import PROBLEMS, load
from regsyn.automata import TreeGrammar
from regsyn.cfg import StringGrammar
from regsyn.errors import (
    ArityMismatch,
    DuplicateDeclaration,
    MissingConstraint,
    ProblemSyntaxError,
    UnknownSymbol,
)
from regsyn.problem import Verdict, parse_problem, parse_term, print_problem
from regsyn.terms import Term

HEADER = "(set-logic EUF)\n(declare-fun g (U) U)\n(declare-const a U)\n(declare-const b U)\n"


def test_regex1_parses():
    p = load("regex1.sl")
    assert p.logic == "EUF"
    assert p.target == "f" and p.arity == 1 and p.params == ("x1",)
    assert p.symbols == {"g": 1, "a": 0, "b": 0}
    assert isinstance(p.grammar, TreeGrammar)
    assert str(p.formula) == "(=> (and (= (g a) b) (= (g b) a)) (= (f a) (g (g b))))"


def test_missing_constraint():
    with pytest.raises(MissingConstraint):
        parse_problem(HEADER + "(synth-fun f ((x1 U)) U)\n(check-synth)")


def test_arity_mismatch_has_position():
    text = HEADER + "(synth-fun f ((x1 U)) U)\n(constraint (= (f a b) a))\n"
    with pytest.raises(ArityMismatch) as err:
        parse_problem(text)
    assert err.value.line == 6


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_problem(HEADER + "(synth-fun f ((x1 U)) U)\n(constraint (= (f c) a))\n")


def test_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration):
        parse_problem(HEADER + "(declare-const a U)\n(synth-fun f ((x1 U)) U)\n(constraint (= (f a) a))\n")


def test_unbalanced_parentheses():
    with pytest.raises(ProblemSyntaxError):
        parse_problem(HEADER + "(synth-fun f ((x1 U)) U\n")


def test_universal_grammar_when_omitted():
    p = load("regex2.sl")
    assert p.grammar is None
    g = p.tree_grammar()
    assert set(g.alphabet) == {"a", "g", "h", "x1"}


@pytest.mark.parametrize("name", ["regex1.sl", "regex2.sl", "appendix.sl", "xor.sl"])
def test_print_parse_round_trip(name):
    p = load(name)
    text = print_problem(p)
    assert parse_problem(text) == p
    assert print_problem(parse_problem(text)) == text


def test_cfg_grammar_parses():
    text = (
        "(set-logic EUF)\n(declare-fun g (U) U)\n(declare-const x U)\n"
        "(synth-fun f () U (cfg ((S U)) ((S U ((\"g\" \"(\" S \")\") (\"x\"))))))\n"
        "(constraint (= f f))\n"
    )
    p = parse_problem(text)
    assert isinstance(p.grammar, StringGrammar)
    assert p.grammar.terminals == ["(", ")", "g", "x"]
    assert parse_problem(print_problem(p)) == p


def test_parse_term_with_params():
    p = load("regex1.sl")
    assert parse_term("(g x1)", p, {"x1": 0}) == Term("g", [Term("x1")])
    with pytest.raises(ArityMismatch):
        parse_term("(g x1 a)", p, {"x1": 0})


def test_verdict_record():
    v = Verdict("solvable", Term("g", [Term("x1")]), engine="regular-euf")
    assert v.record() == "result=solvable witness=(g x1) engine=regular-euf"
    assert Verdict("unknown", engine="bounded").record() == "result=unknown witness=- engine=bounded"


def test_problem_files_present():
    for name in ("regex1.sl", "regex2.sl", "appendix.sl", "xor.sl", "boolean.json", "pcp_example.json"):
        assert (PROBLEMS / name).exists()

"""Synthesis of terms over uninterpreted functions and finite-domain theories.

The decidable core turns regular EUF clauses into tree automata; finite-domain
problems are decided by function-table enumeration; everything else goes
through a size-bounded search.
"""

from .automata import TreeAutomaton, TreeGrammar, enumerate_language, grammar_to_automaton, witness
from .congruence import build_aec, entails, ground_formula_valid
from .fd import FiniteModel, boolean_model, solve_fd
from .problem import SygusProblem, Verdict, parse_problem, print_problem
from .regular import normalize, solve
from .terms import Term, app, const

__version__ = "0.1.0"

__all__ = [
    "FiniteModel",
    "SygusProblem",
    "Term",
    "TreeAutomaton",
    "TreeGrammar",
    "Verdict",
    "app",
    "boolean_model",
    "build_aec",
    "const",
    "entails",
    "enumerate_language",
    "grammar_to_automaton",
    "ground_formula_valid",
    "normalize",
    "parse_problem",
    "print_problem",
    "solve",
    "solve_fd",
    "witness",
]

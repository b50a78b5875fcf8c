"""Simultaneous rigid E-unification instances as synthesis problems.

Input format::

    (vars x1 x2)
    (rigid ((= (g x1) a) (= x2 b)) (= (g x2) a))

Each ``rigid`` form lists premise equations and one goal equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..automata import TreeGrammar
from ..errors import ProblemSyntaxError
from ..formulas import conj, eq, implies, ite, neg
from ..problem import Declaration, SList, Sym, SygusProblem, parse_sexprs
from ..terms import Term, substitute, symbols

Equation = tuple[Term, Term]


@dataclass(frozen=True)
class RigidEquation:
    premises: tuple[Equation, ...]
    goal: Equation


@dataclass(frozen=True)
class SreuInstance:
    variables: tuple[str, ...]
    equations: tuple[RigidEquation, ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variables must be distinct")

    @property
    def signature(self) -> dict[str, int]:
        terms = [x for r in self.equations for e in r.premises + (r.goal,) for x in e]
        sig = symbols(terms)
        for v in self.variables:
            sig.pop(v, None)
        return dict(sorted(sig.items()))


def _to_term(e) -> Term:
    if isinstance(e, Sym):
        return Term(e.name)
    if isinstance(e, SList) and e.items and isinstance(e.items[0], Sym):
        return Term(e.items[0].name, (_to_term(a) for a in e.items[1:]))
    raise ProblemSyntaxError("malformed term", e.line, e.col)


def _to_equation(e) -> Equation:
    if not (isinstance(e, SList) and len(e.items) == 3 and e.items[0] == Sym("=")):
        raise ProblemSyntaxError("expected (= s t)", e.line, e.col)
    return _to_term(e.items[1]), _to_term(e.items[2])


def parse_sreu(text: str) -> SreuInstance:
    variables: list[str] = []
    rigid: list[RigidEquation] = []
    for cmd in parse_sexprs(text):
        if not isinstance(cmd, SList) or not cmd.items or not isinstance(cmd.items[0], Sym):
            raise ProblemSyntaxError("expected (vars ...) or (rigid ...)", cmd.line, cmd.col)
        head = cmd.items[0].name
        if head == "vars":
            for v in cmd.items[1:]:
                if not isinstance(v, Sym):
                    raise ProblemSyntaxError("variable names must be symbols", v.line, v.col)
                variables.append(v.name)
        elif head == "rigid":
            if len(cmd.items) != 3 or not isinstance(cmd.items[1], SList):
                raise ProblemSyntaxError("expected (rigid (premises) goal)", cmd.line, cmd.col)
            premises = tuple(_to_equation(e) for e in cmd.items[1].items)
            rigid.append(RigidEquation(premises, _to_equation(cmd.items[2])))
        else:
            raise ProblemSyntaxError(f"unknown form {head}", cmd.line, cmd.col)
    if not variables:
        raise ProblemSyntaxError("no variables declared", 0, 0)
    if not rigid:
        raise ProblemSyntaxError("no rigid equations given", 0, 0)
    return SreuInstance(tuple(variables), tuple(rigid))


def _fresh(base: str, taken: set[str]) -> str:
    name, n = base, 1
    while name in taken:
        n += 1
        name = f"{base}_{n}"
    taken.add(name)
    return name


def _names(s: SreuInstance) -> tuple[list[str], str, dict[str, int]]:
    sig = s.signature
    taken = set(sig) | set(s.variables) | {"f", "x"}
    consts = [_fresh(f"a_{i}", taken) for i in range(1, len(s.variables) + 1)]
    bot = _fresh("bot", taken)
    return consts, bot, sig


def gen_sreu(s: SreuInstance) -> SygusProblem:
    """One implication per rigid equation, each variable ``x_i`` read as ``f(a_i)``.

    The grammar is an ITE chain testing ``x`` against ``a_1 .. a_m`` whose
    branches draw ground terms over the instance's signature.
    """
    consts, bot, sig = _names(s)
    sigma = {v: Term("f", (Term(a),)) for v, a in zip(s.variables, consts)}
    distinct = [
        neg(eq(Term(consts[k]), Term(consts[j])))
        for k in range(len(consts))
        for j in range(k + 1, len(consts))
    ]
    constraints = []
    for r in s.equations:
        prem = [eq(substitute(a, sigma), substitute(b, sigma)) for a, b in r.premises]
        goal = eq(substitute(r.goal[0], sigma), substitute(r.goal[1], sigma))
        constraints.append(implies(conj(*prem, *distinct), goal))
    m = len(consts)
    nts = [f"A{i}" for i in range(1, m + 1)] + ["Sp"]
    x = Term("x")
    prods = []
    for i, a in enumerate(consts):
        rest = Term(nts[i + 1]) if i + 1 < m else Term(bot)
        prods.append((nts[i], ite(eq(x, Term(a)), Term("Sp"), rest)))
    for g, ar in sig.items():
        prods.append(("Sp", Term(g, [Term("Sp")] * ar)))
    grammar = TreeGrammar(tuple(nts), nts[0], tuple(prods))
    decls = [Declaration("fun" if ar else "const", g, ar) for g, ar in sig.items()]
    decls += [Declaration("const", c, 0) for c in consts + [bot]]
    return SygusProblem(
        "EUF", tuple(decls), "f", ("x",), grammar, tuple(constraints), info=(("source", "sreu"),)
    )


def sreu_candidate(s: SreuInstance, solution: Mapping[str, Term]) -> Term:
    """The ITE chain mapping each ``a_i`` to the ground term chosen for ``x_i``."""
    consts, bot, _ = _names(s)
    out = Term(bot)
    for v, a in reversed(list(zip(s.variables, consts))):
        out = ite(eq(Term("x"), Term(a)), solution[v], out)
    return out


__all__ = ["RigidEquation", "SreuInstance", "gen_sreu", "parse_sreu", "sreu_candidate"]

"""Decision procedure for regular synthesis problems over EUF.

Each CNF clause is put in the form ``(and N) => (or P)``.  A clause is
regular when every equation holds at most one application of the target and
the target either appears only in ``P`` (case 1) or in exactly one equation of
``N`` and nowhere else (case 2).  Both cases yield a tree automaton over the
signature plus the parameters whose language is the set of solution bodies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import (
    TreeAutomaton,
    complete,
    empty_automaton,
    extend_alphabet,
    grammar_to_automaton,
    intersect,
    make_automaton,
    run,
    state_representatives,
    trim,
    union,
    canonical,
    universal_automaton,
    universal_grammar,
    witness,
)
from .congruence import Equation, build_aec, entails
from .errors import EmptyLanguage, IteInGrammar, NotRegular, Unsupported
from .formulas import FALSE, conj, disj, eq, desugar_ite, has_ite, implies, skolemize_universals, to_cnf
from .problem import Declaration, SygusProblem, Verdict
from .terms import (
    Context,
    Term,
    count_occurrences,
    factor_application,
    iter_subterms,
    subterms,
    substitute,
)

CASE1 = "Case1"
CASE2 = "Case2"
FFREE = "FFree"
NOT_REGULAR = "NotRegular"


@dataclass(frozen=True)
class Occurrence:
    """An equation ``B[f(args)] = rhs`` with the target factored out."""

    context: Context
    args: tuple[Term, ...]
    rhs: Term


@dataclass(frozen=True)
class RegularClause:
    N: tuple[Equation, ...]
    P: tuple[Equation, ...]
    target: str
    arity: int
    kind: str

    def occurrence(self, e: Equation) -> Occurrence | None:
        found = factor_application(e[0], self.target)
        if found is None:
            return None
        ctx, app = found
        return Occurrence(ctx, app.args, e[1])

    def has_target(self, e: Equation) -> bool:
        return _count(e, self.target) > 0

    def __str__(self) -> str:
        return str(clause_to_formula(self))


def _count(e: Equation, f: str) -> int:
    return count_occurrences(f, e[0]) + count_occurrences(f, e[1])


def _orient(e: Equation, f: str) -> Equation:
    """Put the side holding ``f`` on the left."""
    s, t = e
    if count_occurrences(f, s) == 0 and count_occurrences(f, t) > 0:
        return (t, s)
    return e


def classify(N: Sequence[Equation], P: Sequence[Equation], f: str) -> str:
    counts_n = [_count(e, f) for e in N]
    counts_p = [_count(e, f) for e in P]
    if any(c > 1 for c in counts_n + counts_p):
        return NOT_REGULAR
    in_n = sum(counts_n)
    in_p = sum(counts_p)
    if in_n == 0 and in_p == 0:
        return FFREE
    if in_n == 0:
        return CASE1
    if in_n == 1 and in_p == 0:
        return CASE2
    return NOT_REGULAR


def make_clause(N: Iterable[Equation], P: Iterable[Equation], f: str, arity: int) -> RegularClause:
    N = tuple(dict.fromkeys(_orient(e, f) for e in N))
    P = tuple(dict.fromkeys(_orient(e, f) for e in P))
    return RegularClause(N, P, f, arity, classify(N, P, f))


def clause_to_formula(c: RegularClause) -> Term:
    return implies(conj(*(eq(s, t) for s, t in c.N)), disj(*(eq(s, t) for s, t in c.P)))


def _check_grammar(p: SygusProblem) -> None:
    g = p.grammar
    if g is None:
        return
    if not hasattr(g, "alphabet"):
        raise Unsupported("string grammars need the bounded engine")
    for _, rhs in g.productions:
        for s in iter_subterms(rhs):
            if s.head == "ite":
                raise IteInGrammar("the candidate grammar contains ite")
            if s.head in ("=", "not", "and", "or", "=>", "true", "false"):
                raise Unsupported(f"connective {s.head} in a candidate grammar")


def prepare(p: SygusProblem) -> tuple[Term, dict[str, int]]:
    """Desugar ITE terms and skolemize universals; returns formula and signature."""
    if p.logic != "EUF":
        raise Unsupported(f"the regular engine handles EUF problems, not {p.logic}")
    _check_grammar(p)
    phi = p.formula
    if has_ite(phi):
        phi = desugar_ite(phi)
    phi, sig = skolemize_universals(phi, p.signature)
    symbols = dict(sig.symbols)
    for s in iter_subterms(phi):
        if s.head.startswith("c_ite_") and not s.args:
            symbols.setdefault(s.head, 0)
    return phi, symbols


def normalize(p: SygusProblem) -> list[RegularClause]:
    """CNF clauses of the constraint, split and classified.

    Valid clauses (complementary literals, reflexive consequents) are dropped.
    Raises :class:`NotRegular` naming the first offending clause.
    """
    phi, _ = prepare(p)
    f, k = p.target, p.arity
    out: list[RegularClause] = []
    for lits in to_cnf(phi):
        N, P = [], []
        for pol, atom in lits:
            if atom.head != "=":
                raise NotRegular(f"atom {atom} is not an equation", str(atom))
            (P if pol else N).append(atom.args)
        if set(N) & set(P) or any(s == t for s, t in P):
            continue
        c = make_clause(N, P, f, k)
        if c.kind == NOT_REGULAR:
            raise NotRegular(f"clause is not regular: {c}", str(c))
        out.append(c)
    return out


def solve_ffree(c: RegularClause) -> bool:
    """Whether the target-free consequents are entailed by ``N`` (any body works)."""
    return any(
        not c.has_target(e) and (e[0] == e[1] or entails(c.N, *e)) for e in c.P
    )


def _params(k: int, params: Sequence[str] | None) -> tuple[str, ...]:
    if params is None:
        params = tuple(f"x{i}" for i in range(1, k + 1))
    return tuple(params)


def _solution_automaton(
    aec, accepting: Iterable[int], args: Sequence[Term], alphabet: dict, params: Sequence[str]
) -> TreeAutomaton:
    """Add ``x_i -> run(s_i)`` to the congruential automaton and set acceptance."""
    a = aec.automaton
    trans = dict(a.transitions)
    full = dict(alphabet)
    for x, s in zip(params, args):
        full[x] = 0
        q = run(a, s)
        if q is not None:
            trans[(x, ())] = q
    labels = {q: str(t) for q, t in aec.representatives.items()}
    return make_automaton(full, trans, accepting, a.states, params, labels)


def _full_alphabet(alphabet: dict, params: Sequence[str]) -> dict:
    out = dict(alphabet)
    out.update({x: 0 for x in params})
    return dict(sorted(out.items()))


def solve_case1(
    c: RegularClause, alphabet: dict[str, int], params: Sequence[str] | None = None
) -> TreeAutomaton:
    params = _params(c.arity, params)
    full = _full_alphabet(alphabet, params)
    if solve_ffree(c):
        return universal_automaton(full, params)
    groups: dict[tuple, list[Occurrence]] = {}
    for e in c.P:
        occ = c.occurrence(e)
        if occ is not None:
            groups.setdefault(occ.args, []).append(occ)
    if not groups:
        return empty_automaton(full, params)
    support = subterms(x for e in c.N for x in e)
    for args, occs in groups.items():
        support |= subterms(args)
        for o in occs:
            support |= subterms([o.rhs, *o.context.ground_parts()])
    aec = build_aec(c.N, support, alphabet)
    result = None
    for args, occs in sorted(groups.items(), key=lambda kv: [str(a) for a in kv[0]]):
        acc = {
            q
            for q, u in aec.representatives.items()
            if any(entails(c.N, o.context.plug(u), o.rhs) for o in occs)
        }
        a = _solution_automaton(aec, acc, args, full, params)
        result = a if result is None else union(result, a)
    return result


def solve_case2(
    c: RegularClause, alphabet: dict[str, int], params: Sequence[str] | None = None
) -> TreeAutomaton:
    params = _params(c.arity, params)
    full = _full_alphabet(alphabet, params)
    fe = next(e for e in c.N if c.has_target(e))
    occ = c.occurrence(fe)
    rest = tuple(e for e in c.N if e != fe)
    if any(u == v or entails(rest, u, v) for u, v in c.P):
        return universal_automaton(full, params)
    support = subterms(x for e in rest + c.P for x in e) | subterms([occ.rhs, *occ.args])
    aec = build_aec(rest, support, alphabet)
    acc = set()
    for q, u in aec.representatives.items():
        hyp = rest + ((occ.context.plug(u), occ.rhs),)
        if any(entails(hyp, s, t) for s, t in c.P):
            acc.add(q)
    return _solution_automaton(aec, acc, occ.args, full, params)


def clause_automaton(
    c: RegularClause, alphabet: dict[str, int], params: Sequence[str] | None = None
) -> TreeAutomaton:
    params = _params(c.arity, params)
    if c.kind == FFREE:
        full = _full_alphabet(alphabet, params)
        ok = solve_ffree(c)
        return universal_automaton(full, params) if ok else empty_automaton(full, params)
    if c.kind == CASE1:
        return solve_case1(c, alphabet, params)
    if c.kind == CASE2:
        return solve_case2(c, alphabet, params)
    raise NotRegular(f"clause is not regular: {c}", str(c))


def solve(p: SygusProblem) -> Verdict:
    """Intersect the grammar automaton with every clause automaton."""
    clauses = normalize(p)
    _, alphabet = prepare(p)
    params = p.params
    full = _full_alphabet(alphabet, params)
    autos = [clause_automaton(c, alphabet, params) for c in clauses]
    g = grammar_to_automaton(p.tree_grammar(), params)
    autos.append(extend_alphabet(g, full))
    autos.sort(key=len)
    result = autos[0]
    for a in autos[1:]:
        result = intersect(result, a)
    result = trim(result)
    if result.states:
        result = canonical(result)
    w = witness(result)
    if w is None:
        return Verdict("unsolvable", None, result, engine="regular-euf")
    return Verdict("solvable", w, result, engine="regular-euf")


def automaton_to_formula(
    a: TreeAutomaton, target: str = "f", params: Sequence[str] | None = None
) -> tuple[RegularClause, tuple[str, ...]]:
    """A case-1 clause whose solution bodies are exactly ``L(a)``.

    ``params`` names the nullary symbols of ``a`` that play the role of the
    bound variables; they default to the automaton's ``variables``.  Each is
    replaced by a fresh constant in the clause.
    """
    params = tuple(a.variables if params is None else params)
    a = trim(a)
    if not a.final:
        raise EmptyLanguage("automaton accepts no term")
    taken = set(a.alphabet) | {target}
    consts = []
    n = 0
    for _ in params:
        n += 1
        while f"c_{n}" in taken:
            n += 1
        consts.append(f"c_{n}")
    sigma = {x: Term(c) for x, c in zip(params, consts)}
    reps = {q: substitute(t, sigma) for q, t in state_representatives(a).items()}
    N = []
    for (sym, args), q in sorted(a.transitions.items()):
        if sym in sigma:
            lhs = sigma[sym]
        else:
            lhs = Term(sym, (reps[x] for x in args))
        if lhs != reps[q]:
            N.append((lhs, reps[q]))
    head = Term(target, (Term(c) for c in consts))
    P = [(head, reps[q]) for q in sorted(a.final)]
    return make_clause(N, P, target, len(params)), tuple(consts)


def intersection_nonempty_reduction(automata: Sequence[TreeAutomaton], target: str = "f") -> SygusProblem:
    """Problem over a nullary target solvable iff the languages intersect."""
    alphabet: dict[str, int] = {}
    for a in automata:
        alphabet.update(a.alphabet)
    if target in alphabet:
        raise ValueError(f"target name {target} clashes with the alphabet")
    constraints = []
    for a in automata:
        try:
            clause, _ = automaton_to_formula(a, target, ())
        except EmptyLanguage:
            constraints.append(FALSE)
            continue
        constraints.append(clause_to_formula(clause))
    return SygusProblem("EUF", _declarations(alphabet), target, (), None, tuple(constraints))


def _declarations(alphabet: dict[str, int]) -> tuple[Declaration, ...]:
    return tuple(
        Declaration("const" if ar == 0 else "fun", name, ar) for name, ar in sorted(alphabet.items())
    )


def automaton_problem(a: TreeAutomaton, target: str = "f", params: Sequence[str] | None = None) -> SygusProblem:
    """The clause of :func:`automaton_to_formula` as a problem whose grammar
    generates every term over the automaton's alphabet."""
    params = tuple(a.variables if params is None else params)
    clause, consts = automaton_to_formula(a, target, params)
    base = {s: ar for s, ar in a.alphabet.items() if s not in params}
    grammar = universal_grammar(_full_alphabet(base, params))
    base.update({c: 0 for c in consts})
    return SygusProblem(
        "EUF", _declarations(base), target, params, grammar, (clause_to_formula(clause),)
    )


__all__ = [
    "CASE1",
    "CASE2",
    "FFREE",
    "NOT_REGULAR",
    "Occurrence",
    "RegularClause",
    "automaton_problem",
    "automaton_to_formula",
    "classify",
    "clause_automaton",
    "clause_to_formula",
    "complete",
    "intersection_nonempty_reduction",
    "make_clause",
    "normalize",
    "solve",
    "solve_case1",
    "solve_case2",
    "solve_ffree",
]

"""Ground congruence closure and the congruential tree automata built from it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .automata import TreeAutomaton, canonical, make_automaton, run
from .errors import InvalidSupport
from .formulas import desugar_ite, has_ite, to_dnf
from .terms import Term, sort_terms, subterms, symbols

Equation = tuple[Term, Term]


class CongruenceClosure:
    """Union-find with a signature table over a growing set of ground terms."""

    def __init__(self, terms: Iterable[Term] = ()):
        self._parent: dict[Term, Term] = {}
        self._uses: dict[Term, list[Term]] = {}
        self._sig: dict[tuple, Term] = {}
        self._pending: list[tuple[Term, Term]] = []
        for t in terms:
            self.add(t)

    def find(self, t: Term) -> Term:
        parent = self._parent
        root = t
        while parent[root] is not root:
            root = parent[root]
        while parent[t] is not root:
            parent[t], t = root, parent[t]
        return root

    def _signature(self, t: Term) -> tuple:
        return (t.head, tuple(self.find(a) for a in t.args))

    def add(self, t: Term) -> Term:
        if t in self._parent:
            return t
        stack = [(t, False)]
        while stack:
            node, ready = stack.pop()
            if node in self._parent:
                continue
            if not ready:
                stack.append((node, True))
                stack.extend((a, False) for a in node.args if a not in self._parent)
                continue
            self._parent[node] = node
            self._uses[node] = []
            for a in node.args:
                self._uses[self.find(a)].append(node)
            sig = self._signature(node)
            other = self._sig.get(sig)
            if other is None:
                self._sig[sig] = node
            else:
                self._pending.append((node, other))
        self._propagate()
        return t

    def merge(self, s: Term, t: Term) -> None:
        self.add(s)
        self.add(t)
        self._pending.append((s, t))
        self._propagate()

    def _propagate(self) -> None:
        while self._pending:
            s, t = self._pending.pop()
            rs, rt = self.find(s), self.find(t)
            if rs is rt:
                continue
            if len(self._uses[rs]) > len(self._uses[rt]):
                rs, rt = rt, rs
            self._parent[rs] = rt
            moved = self._uses.pop(rs)
            for u in moved:
                sig = self._signature(u)
                other = self._sig.get(sig)
                if other is None:
                    self._sig[sig] = u
                elif self.find(other) is not self.find(u):
                    self._pending.append((u, other))
            self._uses[rt].extend(moved)

    def equal(self, s: Term, t: Term) -> bool:
        self.add(s)
        self.add(t)
        return self.find(s) is self.find(t)

    def classes(self) -> list[set[Term]]:
        groups: dict[Term, set[Term]] = {}
        for t in self._parent:
            groups.setdefault(self.find(t), set()).add(t)
        return list(groups.values())


def closure(equations: Iterable[Equation], terms: Iterable[Term] = ()) -> CongruenceClosure:
    cc = CongruenceClosure(terms)
    for s, t in equations:
        cc.merge(s, t)
    return cc


def entails(E: Iterable[Equation], s: Term, t: Term) -> bool:
    """``E |- s = t`` for ground equations."""
    if s == t:
        return True
    return closure(E, (s, t)).equal(s, t)


def _dense(terms: Iterable[Term], alphabet: Mapping[str, int] | None) -> tuple[list[Term], dict]:
    order = sort_terms(subterms(terms))
    sigma = dict(symbols(order))
    if alphabet:
        sigma.update(alphabet)
    return order, sigma


def subtree_automaton(
    S: Iterable[Term], alphabet: Mapping[str, int] | None = None
) -> TreeAutomaton:
    """One state per distinct subterm; accepts exactly the subterms of ``S``."""
    order, sigma = _dense(S, alphabet)
    ids = {t: i for i, t in enumerate(order, start=1)}
    trans = {(t.head, tuple(ids[a] for a in t.args)): ids[t] for t in order}
    labels = {i: str(t) for t, i in ids.items()}
    return make_automaton(sigma, trans, ids.values(), ids.values(), labels=labels)


def merge(a: TreeAutomaton, q: int, q2: int) -> TreeAutomaton:
    """Identify ``q2`` with ``q``; conflicting targets are merged in turn."""
    parent = {p: p for p in a.states}

    def find(p: int) -> int:
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    pending = [(q, q2)]
    trans: dict = dict(a.transitions)
    while pending:
        while pending:
            keep, drop = (find(x) for x in pending.pop())
            if keep != drop:
                parent[drop] = keep
        rebuilt: dict = {}
        for (sym, args), target in trans.items():
            key = (sym, tuple(find(x) for x in args))
            target = find(target)
            seen = rebuilt.get(key)
            if seen is None:
                rebuilt[key] = target
            elif seen != target:
                pending.append((seen, target))
        trans = rebuilt
    states = {find(p) for p in a.states}
    acc = None if a.accepting is None else frozenset(find(p) for p in a.accepting)
    labels: dict[int, str] = {}
    for p in sorted(a.states):
        if p in a.labels:
            r = find(p)
            labels[r] = a.labels[p] if r not in labels else f"{labels[r]} | {a.labels[p]}"
    return make_automaton(a.alphabet, trans, acc, states, a.variables, labels)


@dataclass(frozen=True)
class CongruentialAutomaton:
    """Automaton whose states are the ``E``-classes met by the support set."""

    automaton: TreeAutomaton
    representatives: Mapping[int, Term]
    support: frozenset[Term]

    def run(self, t: Term) -> int | None:
        return run(self.automaton, t)


def build_aec(
    E: Sequence[Equation], C: Iterable[Term], alphabet: Mapping[str, int] | None = None
) -> CongruentialAutomaton:
    """Subtree automaton of ``C`` with every equation of ``E`` merged in."""
    support = frozenset(C)
    if subterms(support) != set(support):
        raise InvalidSupport("support set is not subterm-closed")
    for s, t in E:
        if s not in support or t not in support:
            raise InvalidSupport(f"equation {s} = {t} is not covered by the support set")
    a = subtree_automaton(support, alphabet)
    for s, t in E:
        a = merge(a, run(a, s), run(a, t))
    a = canonical(TreeAutomaton(a.alphabet, a.states, a.transitions, None, a.labels))
    reps: dict[int, Term] = {}
    for t in sort_terms(support):
        reps.setdefault(run(a, t), t)
    return CongruentialAutomaton(a, reps, support)


def ground_clause_valid(antecedent: Iterable[Equation], consequents: Iterable[Equation]) -> bool:
    """Whether ``(and antecedent) -> (or consequents)`` holds in every model."""
    consequents = list(consequents)
    cc = closure(antecedent, (x for eq in consequents for x in eq))
    return any(cc.equal(s, t) for s, t in consequents)


def _split_literals(lits) -> tuple[list[Equation], list[Equation]]:
    pos, negs = [], []
    for pol, atom in lits:
        if atom.head != "=" or len(atom.args) != 2:
            raise ValueError(f"expected an equation, got {atom}")
        (pos if pol else negs).append(atom.args)
    return pos, negs


def ground_formula_valid(phi: Term) -> bool:
    """Validity of a ground EUF formula via DNF of its negation.

    ITE terms are desugared first.
    """
    if has_ite(phi):
        phi = desugar_ite(phi)
    for disjunct in to_dnf(Term("not", (phi,))):
        pos, negs = _split_literals(disjunct)
        if any(s == t for s, t in negs):
            continue
        cc = closure(pos, (x for eq in negs for x in eq))
        if not any(cc.equal(s, t) for s, t in negs):
            return False
    return True

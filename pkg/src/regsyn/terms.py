"""Ranked-alphabet terms, contexts and substitutions.

Formulas share the representation: a formula is a :class:`Term` whose head is
one of the logical connectives in :data:`CONNECTIVES`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

CONNECTIVES = frozenset(
    {"=", "not", "and", "or", "=>", "ite", "true", "false", "forall", "exists"}
)
HOLE = "[]"


class Term:
    """Immutable tree node with structural equality.

    ``size`` and the default ordering key are computed once at construction.
    """

    __slots__ = ("head", "args", "size", "_hash", "_key")

    def __init__(self, head: str, args: Iterable[Term] = ()):
        args = tuple(args)
        self.head = head
        self.args = args
        self.size = 1 + sum(a.size for a in args)
        self._hash = hash((head, args))
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Term) -> bool:
        return term_key(self) < term_key(other)

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return "(" + " ".join([self.head] + [str(a) for a in self.args]) + ")"

    def __repr__(self) -> str:
        return f"Term({str(self)!r})"

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def depth(self) -> int:
        return 1 + max((a.depth for a in self.args), default=0)


def const(name: str) -> Term:
    return Term(name)


def app(head: str, *args: Term | str) -> Term:
    """Build ``head(args...)``; string arguments become constants."""
    return Term(head, (Term(a) if isinstance(a, str) else a for a in args))


def term_key(t: Term, variables: Sequence[str] = ()) -> tuple:
    """Total order used for witnesses: size, then head, then children.

    Heads named in ``variables`` sort before every other symbol, in the order
    given; remaining heads compare bytewise.
    """
    if not variables:
        if t._key is None:
            t._key = (t.size, (1, t.head.encode()), tuple(term_key(a) for a in t.args))
        return t._key
    rank = {v: i for i, v in enumerate(variables)}
    return _ranked_key(t, rank, {})


def _ranked_key(t: Term, rank: Mapping[str, int], memo: dict) -> tuple:
    hit = memo.get(t)
    if hit is not None:
        return hit
    r = rank.get(t.head)
    head = (0, r) if r is not None and not t.args else (1, t.head.encode())
    key = (t.size, head, tuple(_ranked_key(a, rank, memo) for a in t.args))
    memo[t] = key
    return key


def sort_terms(terms: Iterable[Term], variables: Sequence[str] = ()) -> list[Term]:
    if not variables:
        return sorted(terms, key=term_key)
    rank = {v: i for i, v in enumerate(variables)}
    memo: dict = {}
    return sorted(terms, key=lambda t: _ranked_key(t, rank, memo))


def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(s.args)


def subterms(terms: Term | Iterable[Term]) -> set[Term]:
    if isinstance(terms, Term):
        terms = (terms,)
    out: set[Term] = set()
    for t in terms:
        if t in out:
            continue
        for s in iter_subterms(t):
            out.add(s)
    return out


def symbols(t: Term | Iterable[Term]) -> dict[str, int]:
    """Map every head occurring in ``t`` to its arity (first occurrence wins)."""
    out: dict[str, int] = {}
    for s in subterms(t):
        out.setdefault(s.head, len(s.args))
    return out


def occurs(name: str, t: Term) -> bool:
    return any(s.head == name for s in iter_subterms(t))


def count_occurrences(name: str, t: Term) -> int:
    return sum(1 for s in iter_subterms(t) if s.head == name)


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    """First-order substitution of nullary symbols."""
    if not mapping:
        return t
    if not t.args:
        return mapping.get(t.head, t)
    new_args = tuple(substitute(a, mapping) for a in t.args)
    if all(n is o for n, o in zip(new_args, t.args)):
        return t
    return Term(t.head, new_args)


def replace_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if not t.args:
        return t
    return Term(t.head, (replace_term(a, old, new) for a in t.args))


@dataclass(frozen=True)
class Context:
    """A term with exactly one hole."""

    term: Term

    def __post_init__(self):
        if count_occurrences(HOLE, self.term) != 1:
            raise ValueError(f"context must contain exactly one hole: {self.term}")

    def plug(self, s: Term) -> Term:
        return substitute(self.term, {HOLE: s})

    def ground_parts(self) -> list[Term]:
        """Maximal subterms of the context that do not contain the hole."""
        out = []
        node = self.term
        while node.head != HOLE:
            nxt = None
            for a in node.args:
                if occurs(HOLE, a):
                    nxt = a
                else:
                    out.append(a)
            node = nxt
        return out

    def __str__(self):
        return str(self.term)


HOLE_CONTEXT = Context(Term(HOLE))


def factor_application(t: Term, name: str) -> tuple[Context, Term] | None:
    """Split ``t`` as ``B[name(...)]`` for its unique ``name``-application.

    Returns ``None`` when ``name`` does not occur.  The caller is expected to
    have checked that there is at most one occurrence.
    """
    if t.head == name:
        return HOLE_CONTEXT, t
    for i, a in enumerate(t.args):
        found = factor_application(a, name)
        if found is not None:
            inner, hit = found
            args = list(t.args)
            args[i] = inner.term
            return Context(Term(t.head, args)), hit
    return None


@dataclass(frozen=True)
class SecondOrderSubstitution:
    """Replacement ``body`` for the target symbol, over ``params``."""

    target: str
    params: tuple[str, ...]
    body: Term

    def __post_init__(self):
        if occurs(self.target, self.body):
            raise ValueError(f"body mentions the target symbol {self.target}")

    @property
    def arity(self) -> int:
        return len(self.params)


def apply_second_order(s: Term, w: SecondOrderSubstitution) -> Term:
    """Rewrite every ``f(s1..sk)`` in ``s`` to ``w.body{s_i/x_i}``, innermost first."""
    memo: dict[Term, Term] = {}

    def go(t: Term) -> Term:
        hit = memo.get(t)
        if hit is not None:
            return hit
        args = tuple(go(a) for a in t.args)
        if t.head == w.target:
            if len(args) != w.arity:
                raise ValueError(
                    f"{w.target} applied to {len(args)} arguments, expected {w.arity}"
                )
            out = substitute(w.body, dict(zip(w.params, args)))
        elif all(n is o for n, o in zip(args, t.args)):
            out = t
        else:
            out = Term(t.head, args)
        memo[t] = out
        return out

    return go(s)

"""Formula passes: ITE desugaring, skolemization and CNF/DNF by distribution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ResourceLimit, Unsupported
from .terms import Term, iter_subterms, substitute, symbols

TRUE = Term("true")
FALSE = Term("false")
DEFAULT_CLAUSE_LIMIT = 10**5

Literal = tuple[bool, Term]


def eq(s: Term, t: Term) -> Term:
    return Term("=", (s, t))


def neg(f: Term) -> Term:
    return Term("not", (f,))


def implies(a: Term, b: Term) -> Term:
    return Term("=>", (a, b))


def conj(*fs: Term) -> Term:
    if not fs:
        return TRUE
    if len(fs) == 1:
        return fs[0]
    return Term("and", fs)


def disj(*fs: Term) -> Term:
    if not fs:
        return FALSE
    if len(fs) == 1:
        return fs[0]
    return Term("or", fs)


def ite(c: Term, a: Term, b: Term) -> Term:
    return Term("ite", (c, a, b))


def has_ite(t: Term) -> bool:
    return any(s.head == "ite" for s in iter_subterms(t))


@dataclass(frozen=True)
class Signature:
    """Base symbols with arities plus the synthesis target and its parameters."""

    symbols: dict[str, int] = field(default_factory=dict)
    target: str = "f"
    params: tuple[str, ...] = ()

    def __post_init__(self):
        for name, arity in self.symbols.items():
            if arity < 0:
                raise ValueError(f"negative arity for {name}")
        if self.target in self.symbols:
            raise ValueError(f"target {self.target} is also a base symbol")
        clash = set(self.params) & set(self.symbols)
        if clash:
            raise ValueError(f"bound variables clash with symbols: {sorted(clash)}")
        if len(set(self.params)) != len(self.params):
            raise ValueError("bound variable names must be distinct")

    @property
    def arity(self) -> int:
        return len(self.params)

    def with_symbols(self, extra: dict[str, int]) -> Signature:
        merged = dict(self.symbols)
        merged.update(extra)
        return Signature(merged, self.target, self.params)


def _fresh_names(prefix: str, taken: set[str]):
    for n in itertools.count(1):
        name = f"{prefix}{n}"
        if name not in taken:
            taken.add(name)
            yield name


def desugar_ite(phi: Term, prefix: str = "c_ite_") -> Term:
    """Replace every ITE term by a fresh constant ``c``.

    Each ``ite(c, t1, t2)`` contributes ``c -> k = t1`` and ``not c -> k = t2``
    as premises, so the result is ``(and defs) => phi'``; that form is valid
    exactly when ``phi`` is.  Formula-level ITEs become a pair of implications.
    """
    taken = set(symbols(phi))
    names = _fresh_names(prefix, taken)
    defs: list[Term] = []
    cache: dict[tuple, Term] = {}

    def term(t: Term) -> Term:
        if t.head == "ite":
            c, a, b = formula(t.args[0]), term(t.args[1]), term(t.args[2])
            key = (c, a, b)
            k = cache.get(key)
            if k is None:
                k = Term(next(names))
                cache[key] = k
                defs.append(implies(c, eq(k, a)))
                defs.append(implies(neg(c), eq(k, b)))
            return k
        if not t.args:
            return t
        return Term(t.head, (term(a) for a in t.args))

    def formula(f: Term) -> Term:
        h = f.head
        if h in ("and", "or", "not", "=>"):
            return Term(h, (formula(a) for a in f.args))
        if h == "ite":
            c, a, b = (formula(x) for x in f.args)
            return conj(implies(c, a), implies(neg(c), b))
        if h in ("forall", "exists"):
            return Term(h, f.args[:-1] + (formula(f.args[-1]),))
        if h in ("true", "false"):
            return f
        if h == "=":
            return Term("=", (term(a) for a in f.args))
        return term(f)

    body = formula(phi)
    if not defs:
        return phi
    return implies(conj(*defs), body)


def skolemize_universals(
    phi: Term, sig: Signature | None = None, prefix: str = "sk_"
) -> tuple[Term, Signature]:
    """Turn top-level universal binders into fresh constants ``sk_<var>``.

    Top level means reachable from the root through ``and`` and ``forall``
    only.  Any other quantifier raises :class:`Unsupported`.
    """
    sig = sig or Signature()
    taken = set(sig.symbols) | set(symbols(phi))
    fresh: dict[str, str] = {}

    def name_for(var: str) -> str:
        if var not in fresh:
            base = f"{prefix}{var}"
            name = base
            n = 1
            while name in taken:
                n += 1
                name = f"{base}_{n}"
            taken.add(name)
            fresh[var] = name
        return fresh[var]

    def check_free(f: Term):
        for s in iter_subterms(f):
            if s.head in ("forall", "exists"):
                raise Unsupported(f"quantifier {s.head} below the top level")

    def top(f: Term, env: dict[str, Term]) -> Term:
        if f.head == "forall":
            env = dict(env)
            for v in f.args[:-1]:
                env[v.head] = Term(name_for(v.head))
            return top(f.args[-1], env)
        if f.head == "exists":
            raise Unsupported("existential quantifier")
        if f.head == "and":
            return Term("and", (top(a, env) for a in f.args))
        check_free(f)
        return substitute(f, env)

    out = top(phi, {})
    if not fresh:
        return phi, sig
    return out, sig.with_symbols({n: 0 for n in fresh.values()})


def _dedup(lits: Iterable[Literal]) -> tuple[Literal, ...]:
    return tuple(dict.fromkeys(lits))


def _dnf(f: Term, pol: bool, limit: int) -> list[tuple[Literal, ...]]:
    h = f.head
    if h == "not":
        return _dnf(f.args[0], not pol, limit)
    if h == "true":
        return [()] if pol else []
    if h == "false":
        return [] if pol else [()]
    if h == "=>":
        a, b = f.args
        if pol:
            return _union([_dnf(a, False, limit), _dnf(b, True, limit)], limit)
        return _cross([_dnf(a, True, limit), _dnf(b, False, limit)], limit)
    if h in ("and", "or"):
        parts = [_dnf(a, pol, limit) for a in f.args]
        if (h == "and") == pol:
            return _cross(parts, limit)
        return _union(parts, limit)
    if h in ("ite", "forall", "exists"):
        raise Unsupported(f"{h} must be eliminated before normal-form conversion")
    return [((pol, f),)]


def _union(parts, limit):
    out = list(dict.fromkeys(c for p in parts for c in p))
    if len(out) > limit:
        raise ResourceLimit(f"normal form exceeds {limit} clauses")
    return out


def _cross(parts, limit):
    acc: list[tuple[Literal, ...]] = [()]
    for p in parts:
        if len(acc) * len(p) > limit:
            raise ResourceLimit(f"normal form exceeds {limit} clauses")
        acc = [_dedup(a + b) for a in acc for b in p]
    return list(dict.fromkeys(acc))


def to_dnf(phi: Term, limit: int = DEFAULT_CLAUSE_LIMIT) -> list[tuple[Literal, ...]]:
    """Disjuncts of ``phi``, each a conjunction of ``(polarity, atom)`` literals."""
    return _dnf(phi, True, limit)


def to_cnf(phi: Term, limit: int = DEFAULT_CLAUSE_LIMIT) -> list[tuple[Literal, ...]]:
    """Clauses of ``phi``, each a disjunction of ``(polarity, atom)`` literals."""
    return [tuple((not p, a) for p, a in c) for c in _dnf(phi, False, limit)]


def literal_term(lit: Literal) -> Term:
    pol, atom = lit
    return atom if pol else neg(atom)


def clauses_to_formula(clauses: Iterable[tuple[Literal, ...]]) -> Term:
    return conj(*(disj(*(literal_term(l) for l in c)) for c in clauses))


def dnf_to_formula(disjuncts: Iterable[tuple[Literal, ...]]) -> Term:
    return disj(*(conj(*(literal_term(l) for l in c)) for c in disjuncts))

"""Post correspondence instances as synthesis problems.

The tree encoding writes index ``j`` as the unary chain ``g_{s_j} g'_{s'_j}``
(unprimed letters of ``s_j`` then primed letters of ``s'_j``) and ends with
``x``.  The constraint makes unprimed and primed symbols commute and lets
matching pairs cancel under ``h``; the candidate is a solution exactly when
the two concatenations agree.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..automata import TreeGrammar
from ..cfg import Nonterminal, StringGrammar, parse_term_string
from ..errors import MalformedCandidate
from ..formulas import conj, eq, implies
from ..problem import Declaration, SygusProblem, parse_sexprs
from ..terms import Term, sort_terms

UNPRIMED = {"a": "ga", "b": "gb"}
PRIMED = {"a": "gap", "b": "gbp"}
LETTER = {**{v: k for k, v in UNPRIMED.items()}, **{v: k for k, v in PRIMED.items()}}
H, X, READ = "h", "x", "read"


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a PCP instance needs at least one pair")
        for s, t in self.pairs:
            if not s or not t:
                raise ValueError("PCP strings must be non-empty")
            if set(s + t) - {"a", "b"}:
                raise ValueError(f"PCP strings must be over {{a, b}}: {s!r}, {t!r}")

    @classmethod
    def from_json(cls, source: str | Path | Mapping) -> PcpInstance:
        data = source if isinstance(source, Mapping) else json.loads(Path(source).read_text())
        return cls(tuple((str(s), str(t)) for s, t in data["pairs"]))

    @classmethod
    def from_info(cls, text: str) -> PcpInstance:
        """Inverse of :meth:`info`: ``((bb b) (ab ba))``."""
        (e,) = parse_sexprs(text)
        pairs = []
        for item in e.items:
            s, t = item.items
            pairs.append((s.name, t.name))
        return cls(tuple(pairs))

    def info(self) -> str:
        return "(" + " ".join(f"({s} {t})" for s, t in self.pairs) + ")"

    def is_solution(self, indices: Sequence[int]) -> bool:
        if not indices:
            return False
        top = "".join(self.pairs[i - 1][0] for i in indices)
        bottom = "".join(self.pairs[i - 1][1] for i in indices)
        return top == bottom


def _body(pair: tuple[str, str]) -> list[str]:
    s, t = pair
    return [UNPRIMED[c] for c in s] + [PRIMED[c] for c in t]


def _chain(symbols: Sequence[str], inner: Term, read: bool = False) -> Term:
    for sym in reversed(symbols):
        inner = Term(READ, (Term(sym), inner)) if read else Term(sym, (inner,))
    return inner


def pcp_term(p: PcpInstance, indices: Sequence[int]) -> Term:
    """The grammar term derived by the productions for ``indices``."""
    symbols = [s for i in indices for s in _body(p.pairs[i - 1])]
    return _chain(symbols, Term(X))


def _y_instances(depth: int, read: bool = False) -> list[Term]:
    gs = sorted(UNPRIMED.values()) + sorted(PRIMED.values())
    out = []
    for n in range(depth + 1):
        for word in itertools.product(gs, repeat=n):
            out.append(_chain(word, Term(X), read))
    return sort_terms(out)


def _app(sym: str, arg: Term, read: bool) -> Term:
    return Term(READ, (Term(sym), arg)) if read else Term(sym, (arg,))


def _psi(y: Term, read: bool = False) -> list[Term]:
    ga, gb, gap, gbp = "ga", "gb", "gap", "gbp"
    A = lambda s, t: _app(s, t, read)  # noqa: E731
    return [
        eq(A(ga, A(gbp, y)), A(gbp, A(ga, y))),
        eq(A(gb, A(gap, y)), A(gap, A(gb, y))),
        eq(A(H, A(ga, A(gap, y))), A(H, y)),
        eq(A(H, A(gb, A(gbp, y))), A(H, y)),
    ]


def _constraint(y_depth: int, read: bool = False) -> Term:
    psi = [e for y in _y_instances(y_depth, read) for e in _psi(y, read)]
    goal = eq(_app(H, Term("f"), read), _app(H, Term(X), read))
    return implies(conj(*psi), goal)


def _unary_decls() -> tuple[Declaration, ...]:
    names = sorted(UNPRIMED.values()) + sorted(PRIMED.values()) + [H]
    return tuple(Declaration("fun", n, 1) for n in names) + (Declaration("const", X, 0),)


def _info(kind: str, p: PcpInstance, y_depth: int | None = None) -> tuple[tuple[str, str], ...]:
    info = [("source", kind), ("pairs", p.info())]
    if y_depth is not None:
        info.append(("y-depth", str(y_depth)))
    return tuple(info)


def gen_pcp_tree(p: PcpInstance, y_depth: int = 2) -> SygusProblem:
    """Tree-grammar encoding; ``y`` is instantiated over chains up to ``y_depth``."""
    prods = []
    for nt in ("S", "V"):
        for pair in p.pairs:
            prods.append((nt, _chain(_body(pair), Term("V"))))
    prods.append(("V", Term(X)))
    grammar = TreeGrammar(("S", "V"), "S", tuple(prods))
    return SygusProblem(
        "EUF", _unary_decls(), "f", (), grammar, (_constraint(y_depth),),
        info=_info("pcp-tree", p, y_depth),
    )


def gen_pcp_arrays(p: PcpInstance, y_depth: int = 2) -> SygusProblem:
    """As :func:`gen_pcp_tree` with each ``g(t)`` written ``read(g, t)``."""
    prods = []
    for nt in ("S", "V"):
        for pair in p.pairs:
            prods.append((nt, _chain(_body(pair), Term("V"), read=True)))
    prods.append(("V", Term(X)))
    grammar = TreeGrammar(("S", "V"), "S", tuple(prods))
    names = sorted(UNPRIMED.values()) + sorted(PRIMED.values()) + [H, X]
    decls = (Declaration("fun", READ, 2),) + tuple(Declaration("const", n, 0) for n in names)
    return SygusProblem(
        "EUF", decls, "f", (), grammar, (_constraint(y_depth, read=True),),
        info=_info("pcp-arrays", p, y_depth),
    )


def _open_tokens(pair: tuple[str, str]) -> tuple[str, ...]:
    return tuple(tok for sym in _body(pair) for tok in (sym, "("))


def gen_pcp_regular(p: PcpInstance, y_depth: int = 2) -> SygusProblem:
    """Right-regular string grammar; its well-formed strings are the tree encoding."""
    V, C = Nonterminal("V"), Nonterminal("C")
    prods = []
    for nt in ("S", "V"):
        for pair in p.pairs:
            prods.append((nt, _open_tokens(pair) + (V,)))
    prods.append(("V", (X, C)))
    prods.append(("C", (")", C)))
    prods.append(("C", (")",)))
    grammar = StringGrammar(("S", "V", "C"), "S", tuple(prods))
    return SygusProblem(
        "EUF", _unary_decls(), "f", (), grammar, (_constraint(y_depth),),
        info=_info("pcp-regular", p, y_depth),
    )


def _wellformed_tokens(s: str, t: str, m: int, n: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    opens = tuple(tok for c in s for tok in (("fa" if c == "a" else "gb"), "("))
    closes: list[str] = []
    for c in reversed(t):
        k = m if c == "a" else n
        closes += [",", X] * (k - 1) + [")"]
    return opens, tuple(closes)


def gen_pcp_wellformed(p: PcpInstance, m: int = 1, n: int = 2) -> SygusProblem:
    """String grammar whose well-formed members are exactly the PCP solutions.

    Letter ``a`` opens an application of ``fa`` (arity ``m``) and ``b`` of
    ``gb`` (arity ``n``); the second strings supply the missing arguments in
    reverse order.  The constraint ``f = f`` holds for any well-formed term.
    """
    if m == n or m < 1 or n < 1:
        raise ValueError("arities must be distinct and positive")
    V = Nonterminal("V")
    prods = []
    for nt in ("S", "V"):
        for s, t in p.pairs:
            opens, closes = _wellformed_tokens(s, t, m, n)
            prods.append((nt, opens + (V,) + closes))
    prods.append(("V", (X,)))
    grammar = StringGrammar(("S", "V"), "S", tuple(prods))
    decls = (Declaration("fun", "fa", m), Declaration("fun", "gb", n), Declaration("const", X, 0))
    info = (("source", "pcp-wellformed"), ("pairs", p.info()), ("arities", f"({m} {n})"))
    return SygusProblem("EUF", decls, "f", (), grammar, (eq(Term("f"), Term("f")),), info=info)


def wellformed_alphabet(m: int = 1, n: int = 2) -> dict[str, int]:
    return {"fa": m, "gb": n, X: 0}


def parse_tokens(tokens: Sequence[str], alphabet: Mapping[str, int]) -> Term | None:
    return parse_term_string("".join(tokens), alphabet)


def _unread(w: Term) -> Term:
    if w.head == READ and len(w.args) == 2 and not w.args[0].args:
        return Term(w.args[0].head, (_unread(w.args[1]),))
    if w.head == READ:
        raise MalformedCandidate(f"unexpected read {w}")
    return w


def decode_indices(p: PcpInstance, w: Term) -> list[int]:
    """Index sequence of a candidate; ``read(g, t)`` is accepted for ``g(t)``.

    The spine splits uniquely into alternating unprimed and primed runs, and
    each (unprimed, primed) run pair must be one of the instance's pairs.
    """
    w = _unread(w)
    spine = []
    node = w
    while node.args:
        if len(node.args) != 1 or node.head not in LETTER:
            raise MalformedCandidate(f"unexpected symbol {node.head} in {w}")
        spine.append(node.head)
        node = node.args[0]
    if node.head != X:
        raise MalformedCandidate(f"candidate must end in {X}: {w}")
    lookup: dict[tuple[str, str], int] = {}
    for i, pair in enumerate(p.pairs, start=1):
        lookup.setdefault(pair, i)
    out = []
    pos = 0
    while pos < len(spine):
        top = bottom = ""
        while pos < len(spine) and spine[pos] in UNPRIMED.values():
            top += LETTER[spine[pos]]
            pos += 1
        while pos < len(spine) and spine[pos] in PRIMED.values():
            bottom += LETTER[spine[pos]]
            pos += 1
        if (top, bottom) not in lookup:
            raise MalformedCandidate(f"no pair ({top or '-'}, {bottom or '-'}) in the instance")
        out.append(lookup[(top, bottom)])
    if not out:
        raise MalformedCandidate("empty index sequence")
    return out


def check_pcp_candidate(p: PcpInstance, w: Term) -> bool:
    return p.is_solution(decode_indices(p, w))


def counter_model_value(w: Term) -> tuple[str, str]:
    """Value of ``w`` in the pair-of-strings model with ``x = (e, e)``.

    ``g_c`` prepends ``c`` to the first string, ``g'_c`` to the second, and
    ``h`` removes the longest common prefix.
    """
    w = _unread(w)
    if not w.args:
        if w.head != X:
            raise MalformedCandidate(f"unexpected constant {w.head}")
        return "", ""
    if len(w.args) != 1:
        raise MalformedCandidate(f"unexpected symbol {w.head}")
    s, t = counter_model_value(w.args[0])
    if w.head in UNPRIMED.values():
        return LETTER[w.head] + s, t
    if w.head in PRIMED.values():
        return s, LETTER[w.head] + t
    if w.head == H:
        k = 0
        while k < min(len(s), len(t)) and s[k] == t[k]:
            k += 1
        return s[k:], t[k:]
    raise MalformedCandidate(f"unexpected symbol {w.head}")


def counter_model_holds(w: Term) -> bool:
    """Whether ``h(w) = h(x)`` in the pair-of-strings model."""
    return counter_model_value(Term(H, (w,))) == counter_model_value(Term(H, (Term(X),)))


__all__ = [
    "PcpInstance",
    "check_pcp_candidate",
    "counter_model_holds",
    "counter_model_value",
    "decode_indices",
    "gen_pcp_arrays",
    "gen_pcp_regular",
    "gen_pcp_tree",
    "gen_pcp_wellformed",
    "parse_tokens",
    "pcp_term",
    "wellformed_alphabet",
]

"""Intersection of two context-free languages as a bit-vector problem.

Pair format: two grammars separated by a line ``%%``.  Each line reads
``N -> item item | item``; quoted items are terminals, bare words are
nonterminals, and the first left-hand side is the start symbol::

    S -> "a" S | "a"
    %%
    T -> "a"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..automata import TreeGrammar
from ..cfg import Nonterminal, StringGrammar
from ..errors import MalformedCandidate, ProblemSyntaxError
from ..formulas import eq, neg
from ..problem import Declaration, SygusProblem
from ..terms import Term

CONCAT = "concat"


@dataclass(frozen=True)
class CfgPair:
    g1: StringGrammar
    g2: StringGrammar

    @property
    def terminals(self) -> list[str]:
        return sorted(set(self.g1.terminals) | set(self.g2.terminals))

    @property
    def width(self) -> int:
        """Bits per letter: ``1 + ceil(log2 |T|)``."""
        return 1 + math.ceil(math.log2(max(len(self.terminals), 1)))

    def encoding(self) -> dict[str, str]:
        w = self.width
        return {t: format(i, f"0{w}b") for i, t in enumerate(self.terminals)}


_ITEM = re.compile(r'"([^"]*)"|([A-Za-z_][A-Za-z0-9_]*)')


def _parse_grammar(lines: list[tuple[int, str]]) -> StringGrammar:
    nts: list[str] = []
    rules: list[tuple[str, str]] = []
    for lineno, line in lines:
        if "->" not in line:
            raise ProblemSyntaxError("expected 'N -> alternatives'", lineno, 1)
        lhs, rhs = line.split("->", 1)
        lhs = lhs.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", lhs):
            raise ProblemSyntaxError(f"bad nonterminal {lhs!r}", lineno, 1)
        if lhs not in nts:
            nts.append(lhs)
        for alt in rhs.split("|"):
            alt = alt.strip()
            if not alt:
                raise ProblemSyntaxError(f"empty alternative for {lhs}", lineno, 1)
            rules.append((lhs, alt))
    if not nts:
        raise ProblemSyntaxError("empty grammar", 0, 0)
    prods = []
    for lhs, alt in rules:
        body = []
        pos = 0
        while pos < len(alt):
            if alt[pos].isspace():
                pos += 1
                continue
            m = _ITEM.match(alt, pos)
            if m is None:
                raise ProblemSyntaxError(f"cannot read {alt[pos:]!r}", 0, 0)
            if m.group(1) is not None:
                if not m.group(1):
                    raise ProblemSyntaxError("empty terminal", 0, 0)
                body.append(m.group(1))
            else:
                if m.group(2) not in nts:
                    raise ProblemSyntaxError(f"nonterminal {m.group(2)} has no rules", 0, 0)
                body.append(Nonterminal(m.group(2)))
            pos = m.end()
        prods.append((lhs, tuple(body)))
    return StringGrammar(tuple(nts), nts[0], tuple(prods))


def parse_cfg_pair(text: str) -> CfgPair:
    parts: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "%%":
            parts.append([])
        else:
            parts[-1].append((lineno, line))
    if len(parts) != 2:
        raise ProblemSyntaxError("expected two grammars separated by %%", 0, 0)
    return CfgPair(_parse_grammar(parts[0]), _parse_grammar(parts[1]))


def _encode_rule(body, prefix: str, code: dict[str, str]) -> Term:
    items = [
        Term(prefix + i.name) if isinstance(i, Nonterminal) else Term("b" + code[i]) for i in body
    ]
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Term(CONCAT, (item, out))
    return out


def gen_cfg_bv(pair: CfgPair) -> SygusProblem:
    """Tree grammar ``S -> (= L R)`` over concatenations of fixed-width letters.

    ``L`` and ``R`` derive the encodings of the two languages; the constraint
    is ``not f`` for a boolean constant ``f``.
    """
    code = pair.encoding()
    nts = ["S"]
    prods = [("S", eq(Term("L_" + pair.g1.start), Term("R_" + pair.g2.start)))]
    for prefix, g in (("L_", pair.g1), ("R_", pair.g2)):
        nts += [prefix + n for n in g.nonterminals]
        for lhs, body in g.productions:
            prods.append((prefix + lhs, _encode_rule(body, prefix, code)))
    grammar = TreeGrammar(tuple(nts), "S", tuple(prods))
    decls = [Declaration("fun", CONCAT, 2)]
    decls += [Declaration("const", "b" + bits, 0) for bits in sorted(code.values())]
    info = (("source", "cfg-bv"), ("width", str(pair.width)))
    return SygusProblem("BV", tuple(decls), "f", (), grammar, (neg(Term("f")),), sort="Bool", info=info)


def _bits(t: Term) -> str:
    if t.head == CONCAT and len(t.args) == 2:
        return _bits(t.args[0]) + _bits(t.args[1])
    if not t.args and re.fullmatch(r"b[01]+", t.head):
        return t.head[1:]
    raise MalformedCandidate(f"not a concatenation of bit strings: {t}")


def check_bv_candidate(w: Term) -> bool:
    """Whether ``not w`` holds: the two sides decode to different bit strings."""
    if w.head != "=" or len(w.args) != 2:
        raise MalformedCandidate(f"expected an equation, got {w}")
    return _bits(w.args[0]) != _bits(w.args[1])


__all__ = ["CfgPair", "check_bv_candidate", "gen_cfg_bv", "parse_cfg_pair"]

"""Context-free string grammars and the ``f(a,b)`` surface syntax for terms."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from .terms import Term


@dataclass(frozen=True)
class Nonterminal:
    name: str

    def __str__(self):
        return self.name


Item = str | Nonterminal


@dataclass(frozen=True)
class StringGrammar:
    """Epsilon-free context-free grammar; terminals are token strings."""

    nonterminals: tuple[str, ...]
    start: str
    productions: tuple[tuple[str, tuple[Item, ...]], ...]

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start} is not a nonterminal")
        for lhs, body in self.productions:
            if lhs not in self.nonterminals:
                raise ValueError(f"undeclared nonterminal {lhs}")
            if not body:
                raise ValueError(f"epsilon production for {lhs}")
            for item in body:
                if isinstance(item, Nonterminal) and item.name not in self.nonterminals:
                    raise ValueError(f"undeclared nonterminal {item.name}")

    @property
    def terminals(self) -> list[str]:
        return sorted({i for _, b in self.productions for i in b if isinstance(i, str)})


def _splits(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


def enumerate_strings(g: StringGrammar, max_tokens: int) -> Iterator[tuple[str, ...]]:
    """Token sequences of length <= ``max_tokens`` in (length, lexicographic) order."""
    table: dict[tuple[str, int], set[tuple[str, ...]]] = {}
    shapes = []
    for lhs, body in g.productions:
        slots = [i for i, item in enumerate(body) if isinstance(item, Nonterminal)]
        shapes.append((lhs, body, slots, len(body) - len(slots)))
    for n in range(1, max_tokens + 1):
        changed = True
        while changed:  # unit productions can feed each other at the same length
            changed = False
            for lhs, body, slots, fixed in shapes:
                bucket = table.setdefault((lhs, n), set())
                before = len(bucket)
                free = n - fixed
                if not slots:
                    if free == 0:
                        bucket.add(tuple(body))
                elif free >= len(slots):
                    for sizes in _splits(free, len(slots)):
                        pools = [table.get((body[i].name, k), ()) for i, k in zip(slots, sizes)]
                        if not all(pools):
                            continue
                        for combo in itertools.product(*pools):
                            parts = dict(zip(slots, combo))
                            out: tuple[str, ...] = ()
                            for i, item in enumerate(body):
                                out += parts[i] if i in parts else (item,)
                            bucket.add(out)
                if len(bucket) != before:
                    changed = True
        yield from sorted(table.get((g.start, n), ()))


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_'.]*|[(),])")


def parse_term_string(text: str, alphabet: Mapping[str, int] | None = None) -> Term | None:
    """Parse ``g(h(x),a)``-style text; ``None`` if ill-formed.

    With ``alphabet`` given, every symbol must be used at its declared arity.
    """
    tokens: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            return None
        tokens.append(m.group(1))
        pos = m.end()
    i = 0

    def term() -> Term | None:
        nonlocal i
        if i >= len(tokens) or tokens[i] in "(),":
            return None
        head = tokens[i]
        i += 1
        args: list[Term] = []
        if i < len(tokens) and tokens[i] == "(":
            i += 1
            while True:
                sub = term()
                if sub is None:
                    return None
                args.append(sub)
                if i < len(tokens) and tokens[i] == ",":
                    i += 1
                    continue
                if i < len(tokens) and tokens[i] == ")":
                    i += 1
                    break
                return None
        if alphabet is not None and alphabet.get(head) != len(args):
            return None
        return Term(head, args)

    t = term()
    if t is None or i != len(tokens):
        return None
    return t


def term_to_string(t: Term) -> str:
    if not t.args:
        return t.head
    return t.head + "(" + ",".join(term_to_string(a) for a in t.args) + ")"

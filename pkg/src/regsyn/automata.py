"""Deterministic bottom-up tree automata and regular tree grammars."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import AlphabetError
from .terms import Term, _ranked_key, iter_subterms, sort_terms, term_key

Key = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class TreeGrammar:
    """Regular tree grammar.

    Each production is ``(lhs, rhs)`` where ``rhs`` is a term whose leaves may
    name nonterminals.  A production whose ``rhs`` is a bare nonterminal is a
    chain rule.
    """

    nonterminals: tuple[str, ...]
    start: str
    productions: tuple[tuple[str, Term], ...]

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start} is not a nonterminal")
        nts = set(self.nonterminals)
        arities: dict[str, int] = {}
        for lhs, rhs in self.productions:
            if lhs not in nts:
                raise ValueError(f"undeclared nonterminal {lhs}")
            for s in iter_subterms(rhs):
                if s.head in nts:
                    if s.args:
                        raise ValueError(f"nonterminal {s.head} applied to arguments")
                    continue
                seen = arities.setdefault(s.head, len(s.args))
                if seen != len(s.args):
                    raise ValueError(f"symbol {s.head} used with arities {seen} and {len(s.args)}")

    @property
    def alphabet(self) -> dict[str, int]:
        nts = set(self.nonterminals)
        out: dict[str, int] = {}
        for _, rhs in self.productions:
            for s in iter_subterms(rhs):
                if s.head not in nts:
                    out.setdefault(s.head, len(s.args))
        return dict(sorted(out.items()))

    def rules_for(self, nt: str) -> list[Term]:
        return [rhs for lhs, rhs in self.productions if lhs == nt]


def universal_grammar(alphabet: Mapping[str, int], start: str = "S") -> TreeGrammar:
    """Grammar with one nonterminal generating every term over ``alphabet``."""
    prods = tuple(
        (start, Term(name, [Term(start)] * arity)) for name, arity in sorted(alphabet.items())
    )
    return TreeGrammar((start,), start, prods)


@dataclass(frozen=True)
class TreeAutomaton:
    """Deterministic, possibly incomplete, bottom-up tree automaton.

    ``accepting`` is ``None`` for automata that carry no acceptance condition
    (the congruential automata).  ``variables`` lists nullary symbols that
    sort first when terms are ordered; it does not affect the language.
    """

    alphabet: Mapping[str, int]
    states: frozenset[int]
    transitions: Mapping[Key, int]
    accepting: frozenset[int] | None = None
    labels: Mapping[int, str] = field(default_factory=dict, compare=False)
    variables: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for (sym, args), target in self.transitions.items():
            arity = self.alphabet.get(sym)
            if arity is None:
                raise AlphabetError(f"transition on unknown symbol {sym}")
            if arity != len(args):
                raise AlphabetError(f"transition for {sym} has {len(args)} arguments")
            if target not in self.states or any(a not in self.states for a in args):
                raise ValueError(f"transition {sym}{args} -> {target} uses unknown states")
        if self.accepting is not None and not self.accepting <= self.states:
            raise ValueError("accepting states must be states")

    @property
    def final(self) -> frozenset[int]:
        return self.accepting or frozenset()

    @property
    def is_complete(self) -> bool:
        for sym, arity in self.alphabet.items():
            for args in itertools.product(sorted(self.states), repeat=arity):
                if (sym, args) not in self.transitions:
                    return False
        return True

    def __len__(self) -> int:
        return len(self.states)


def make_automaton(
    alphabet: Mapping[str, int],
    transitions: Mapping[Key, int],
    accepting: Iterable[int] | None = None,
    states: Iterable[int] | None = None,
    variables: Sequence[str] = (),
    labels: Mapping[int, str] | None = None,
) -> TreeAutomaton:
    st = set(states or ())
    for (_, args), target in transitions.items():
        st.add(target)
        st.update(args)
    acc = None if accepting is None else frozenset(accepting)
    if acc is not None:
        st |= acc
    return TreeAutomaton(
        dict(alphabet), frozenset(st), dict(transitions), acc, dict(labels or {}), tuple(variables)
    )


def universal_automaton(alphabet: Mapping[str, int], variables: Sequence[str] = ()) -> TreeAutomaton:
    trans = {(sym, (1,) * arity): 1 for sym, arity in alphabet.items()}
    return make_automaton(alphabet, trans, {1}, {1}, variables)


def empty_automaton(alphabet: Mapping[str, int], variables: Sequence[str] = ()) -> TreeAutomaton:
    return make_automaton(alphabet, {}, set(), set(), variables)


def run(a: TreeAutomaton, t: Term) -> int | None:
    """Bottom-up state of ``t``, or ``None`` when some step is undefined."""
    arity = a.alphabet.get(t.head)
    if arity is None or arity != len(t.args):
        raise AlphabetError(f"symbol {t.head}/{len(t.args)} is not in the alphabet")
    args = []
    for c in t.args:
        q = run(a, c)
        if q is None:
            return None
        args.append(q)
    return a.transitions.get((t.head, tuple(args)))


def member(a: TreeAutomaton, t: Term) -> bool:
    try:
        q = run(a, t)
    except AlphabetError:
        return False
    return q is not None and q in a.final


def extend_alphabet(a: TreeAutomaton, extra: Mapping[str, int]) -> TreeAutomaton:
    """Add symbols without transitions; the language is unchanged."""
    merged = dict(a.alphabet)
    for sym, arity in extra.items():
        if merged.setdefault(sym, arity) != arity:
            raise AlphabetError(f"symbol {sym} has conflicting arities")
    if merged == dict(a.alphabet):
        return a
    return TreeAutomaton(merged, a.states, a.transitions, a.accepting, a.labels, a.variables)


def with_accepting(a: TreeAutomaton, accepting: Iterable[int] | None) -> TreeAutomaton:
    acc = None if accepting is None else frozenset(accepting)
    return TreeAutomaton(a.alphabet, a.states, a.transitions, acc, a.labels, a.variables)


def with_variables(a: TreeAutomaton, variables: Sequence[str]) -> TreeAutomaton:
    return TreeAutomaton(a.alphabet, a.states, a.transitions, a.accepting, a.labels, tuple(variables))


def complete(a: TreeAutomaton) -> TreeAutomaton:
    """Route every missing transition into a fresh non-accepting sink."""
    if a.is_complete:
        return a
    sink = max(a.states, default=0) + 1
    states = sorted(a.states | {sink})
    trans = dict(a.transitions)
    for sym, arity in a.alphabet.items():
        for args in itertools.product(states, repeat=arity):
            trans.setdefault((sym, args), sink)
    labels = dict(a.labels)
    labels[sink] = "sink"
    acc = a.accepting if a.accepting is not None else frozenset()
    return TreeAutomaton(a.alphabet, frozenset(states), trans, acc, labels, a.variables)


def _reachable(transitions: Iterable[tuple[tuple, object]]) -> set:
    """Horn-style propagation: a target is reachable once all its args are."""
    waiting: dict[object, list[int]] = {}
    missing: list[int] = []
    targets: list[object] = []
    ready: list[object] = []
    for i, (args, target) in enumerate(transitions):
        pending = set(args)
        targets.append(target)
        missing.append(len(pending))
        if not pending:
            ready.append(target)
        for q in pending:
            waiting.setdefault(q, []).append(i)
    seen: set = set()
    while ready:
        q = ready.pop()
        if q in seen:
            continue
        seen.add(q)
        for i in waiting.get(q, ()):
            missing[i] -= 1
            if missing[i] == 0:
                ready.append(targets[i])
    return seen


def reachable_states(a: TreeAutomaton) -> set[int]:
    return _reachable((args, q) for (_, args), q in a.transitions.items())


def AND(x: bool, y: bool) -> bool:
    return x and y


def OR(x: bool, y: bool) -> bool:
    return x or y


def product(
    a: TreeAutomaton, b: TreeAutomaton, combiner: Callable[[bool, bool], bool] = AND
) -> TreeAutomaton:
    """Product restricted to reachable pairs; acceptance follows ``combiner``."""
    if dict(a.alphabet) != dict(b.alphabet):
        raise AlphabetError("product needs identical alphabets")
    if (combiner(True, False) or combiner(False, True)) and not (a.is_complete and b.is_complete):
        raise ValueError("complete both automata before a union-style product")
    by_sym: dict[str, list] = {}
    for (sym, args), q in b.transitions.items():
        by_sym.setdefault(sym, []).append((args, q))
    cand = []
    for (sym, args), p in a.transitions.items():
        for args_b, q in by_sym.get(sym, ()):
            cand.append((sym, tuple(zip(args, args_b)), (p, q)))
    live = _reachable((args, tgt) for _, args, tgt in cand)
    ids = {pair: i for i, pair in enumerate(sorted(live), start=1)}
    trans = {}
    for sym, args, tgt in cand:
        if tgt in live and all(x in live for x in args):
            trans[(sym, tuple(ids[x] for x in args))] = ids[tgt]
    fa, fb = a.final, b.final
    acc = {i for (p, q), i in ids.items() if combiner(p in fa, q in fb)}
    labels = {i: f"{p},{q}" for (p, q), i in ids.items()}
    variables = a.variables or b.variables
    return make_automaton(a.alphabet, trans, acc, ids.values(), variables, labels)


def intersect(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    return product(a, b, AND)


def union(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    return product(complete(a), complete(b), OR)


def _best_terms(a: TreeAutomaton) -> dict[int, Term]:
    """Minimal term (size, then tie-break order) reaching each reachable state."""
    rank = {v: i for i, v in enumerate(a.variables)}
    memo: dict = {}

    def key(t: Term):
        if not rank:
            return term_key(t)
        return _ranked_key(t, rank, memo)

    best: dict[int, Term] = {}
    best_key: dict[int, tuple] = {}
    changed = True
    items = sorted(a.transitions.items(), key=lambda kv: (len(kv[0][1]), kv[0][0], kv[0][1]))
    while changed:
        changed = False
        for (sym, args), q in items:
            if not all(x in best for x in args):
                continue
            t = Term(sym, (best[x] for x in args))
            k = key(t)
            if q not in best or k < best_key[q]:
                best[q] = t
                best_key[q] = k
                changed = True
    return best


def is_empty(a: TreeAutomaton) -> bool:
    return not (reachable_states(a) & a.final)


def witness(a: TreeAutomaton) -> Term | None:
    """Smallest accepted term, or ``None`` when the language is empty."""
    best = _best_terms(a)
    accepted = [best[q] for q in a.final if q in best]
    if not accepted:
        return None
    return sort_terms(accepted, a.variables)[0]


def state_representatives(a: TreeAutomaton) -> dict[int, Term]:
    return _best_terms(a)


def coreachable_states(a: TreeAutomaton) -> set[int]:
    """States from which some context leads to acceptance."""
    reach = reachable_states(a)
    co = set(a.final)
    changed = True
    while changed:
        changed = False
        for (_, args), q in a.transitions.items():
            if q not in co or not all(x in reach for x in args):
                continue
            for x in args:
                if x not in co:
                    co.add(x)
                    changed = True
    return co


def trim(a: TreeAutomaton) -> TreeAutomaton:
    keep = reachable_states(a) & coreachable_states(a)
    trans = {
        k: q for k, q in a.transitions.items() if q in keep and all(x in keep for x in k[1])
    }
    acc = None if a.accepting is None else a.accepting & keep
    labels = {q: l for q, l in a.labels.items() if q in keep}
    return TreeAutomaton(a.alphabet, frozenset(keep), trans, acc, labels, a.variables)


def relabel(a: TreeAutomaton, mapping: Mapping[int, int]) -> TreeAutomaton:
    trans = {(s, tuple(mapping[x] for x in args)): mapping[q] for (s, args), q in a.transitions.items()}
    acc = None if a.accepting is None else frozenset(mapping[q] for q in a.accepting)
    labels = {mapping[q]: l for q, l in a.labels.items() if q in mapping}
    return TreeAutomaton(
        a.alphabet, frozenset(mapping[q] for q in a.states), trans, acc, labels, a.variables
    )


def canonical(a: TreeAutomaton) -> TreeAutomaton:
    """Renumber states 1..n by the order of their smallest reaching term."""
    best = _best_terms(a)
    order = sort_terms(best.values(), a.variables)
    by_term = {t: q for q, t in best.items()}
    mapping = {by_term[t]: i for i, t in enumerate(order, start=1)}
    n = len(mapping)
    for q in sorted(a.states - set(mapping)):
        n += 1
        mapping[q] = n
    return relabel(a, mapping)


def isomorphic(a: TreeAutomaton, b: TreeAutomaton) -> bool:
    return canonical(a) == canonical(b)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_language(a: TreeAutomaton, max_size: int) -> Iterator[Term]:
    """Accepted terms of size <= ``max_size`` in (size, tie-break) order."""
    by_size: dict[int, dict[int, list[Term]]] = {}
    final = a.final
    items = list(a.transitions.items())
    for n in range(1, max_size + 1):
        level: dict[int, list[Term]] = {}
        for (sym, args), q in items:
            if not args:
                if n == 1:
                    level.setdefault(q, []).append(Term(sym))
                continue
            for sizes in _compositions(n - 1, len(args)):
                pools = [by_size.get(s, {}).get(x, ()) for s, x in zip(sizes, args)]
                if not all(pools):
                    continue
                bucket = level.setdefault(q, [])
                for combo in itertools.product(*pools):
                    bucket.append(Term(sym, combo))
        by_size[n] = level
        accepted = [t for q, ts in level.items() if q in final for t in ts]
        yield from sort_terms(accepted, a.variables)


def language_by_depth(a: TreeAutomaton, depth: int) -> set[Term]:
    """Accepted terms of height <= ``depth`` (constants have height 1)."""
    layer: dict[int, set[Term]] = {}
    for _ in range(depth):
        nxt: dict[int, set[Term]] = {}
        for (sym, args), q in a.transitions.items():
            pools = [layer.get(x) for x in args]
            if not all(pools):
                continue
            bucket = nxt.setdefault(q, set())
            for combo in itertools.product(*pools):
                bucket.add(Term(sym, combo))
        layer = nxt
    return {t for q, ts in layer.items() if q in a.final for t in ts}


def language_equal_up_to(a: TreeAutomaton, b: TreeAutomaton, depth: int) -> bool:
    return language_by_depth(a, depth) == language_by_depth(b, depth)


def grammar_to_automaton(g: TreeGrammar, variables: Sequence[str] = ()) -> TreeAutomaton:
    """Nondeterministic construction followed by subset determinization."""
    nts = set(g.nonterminals)
    nfta: list[tuple[str, tuple, object]] = []
    chain: dict[str, set[str]] = {nt: set() for nt in g.nonterminals}
    aux = itertools.count()

    def state_of(t: Term):
        if t.head in nts:
            return t.head
        q = ("aux", next(aux))
        nfta.append((t.head, tuple(state_of(c) for c in t.args), q))
        return q

    for lhs, rhs in g.productions:
        if rhs.head in nts:
            chain[rhs.head].add(lhs)
        else:
            nfta.append((rhs.head, tuple(state_of(c) for c in rhs.args), lhs))

    def up(states: set) -> frozenset:
        out = set(states)
        todo = [q for q in states if q in chain]
        while todo:
            q = todo.pop()
            for p in chain[q]:
                if p not in out:
                    out.add(p)
                    todo.append(p)
        return frozenset(out)

    alphabet = g.alphabet
    by_sym: dict[str, list] = {}
    for sym, args, q in nfta:
        by_sym.setdefault(sym, []).append((args, q))

    subsets: list[frozenset] = []
    index: dict[frozenset, int] = {}
    trans: dict[Key, int] = {}

    def add(s: frozenset) -> int:
        if s not in index:
            index[s] = len(subsets) + 1
            subsets.append(s)
        return index[s]

    for sym, arity in alphabet.items():
        if arity == 0:
            hit = up({q for _, q in by_sym.get(sym, ())})
            if hit:
                trans[(sym, ())] = add(hit)
    done = 0
    while done < len(subsets):
        frontier = len(subsets)
        ids = list(range(1, frontier + 1))
        for sym, arity in alphabet.items():
            if arity == 0:
                continue
            rules = by_sym.get(sym, ())
            for combo in itertools.product(ids, repeat=arity):
                if max(combo) <= done:
                    continue
                sets = [subsets[i - 1] for i in combo]
                hit = up({q for args, q in rules if all(x in s for x, s in zip(args, sets))})
                if hit:
                    trans[(sym, combo)] = add(hit)
        done = frontier
    acc = {i for s, i in index.items() if g.start in s}
    labels = {i: "{" + ",".join(sorted(str(q) for q in s if isinstance(q, str))) + "}" for s, i in index.items()}
    return make_automaton(alphabet, trans, acc, index.values(), variables, labels)


def _dot_id(q: int) -> str:
    return f"q{q}"


def to_dot(a: TreeAutomaton, name: str = "automaton") -> str:
    """Graphviz rendering; hyperedges and constants go through point nodes."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for q in sorted(a.states):
        shape = "doublecircle" if q in a.final else "circle"
        label = a.labels.get(q, str(q)).replace('"', r"\"")
        lines.append(f'  {_dot_id(q)} [shape={shape}, label="{q}", tooltip="{label}"];')
    n = 0
    for (sym, args), q in sorted(a.transitions.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if len(args) == 1:
            lines.append(f'  {_dot_id(args[0])} -> {_dot_id(q)} [label="{sym}"];')
            continue
        n += 1
        hub = f"t{n}"
        lines.append(f"  {hub} [shape=point];")
        for i, x in enumerate(args, start=1):
            lines.append(f'  {_dot_id(x)} -> {hub} [label="{i}", arrowhead=none];')
        lines.append(f'  {hub} -> {_dot_id(q)} [label="{sym}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

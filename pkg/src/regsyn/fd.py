"""Synthesis over finite models by enumerating semantically distinct expressions.

Every expression is identified with its function table: the vector of its
values under all assignments of the free variables, in row-major order.  Per
nonterminal we keep one expression per table and grow the sets until an
iteration adds nothing.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .automata import TreeGrammar
from .errors import ModelMismatch, ResourceLimit, Unsupported
from .problem import SygusProblem, Verdict
from .terms import SecondOrderSubstitution, Term, apply_second_order, iter_subterms

MAX_BV_WIDTH = 4
BV_OPS = ("and", "or", "xor", "not", "add", "shl1")


@dataclass(frozen=True)
class FiniteModel:
    """Domain ``0..domain-1`` with explicit tables for every symbol."""

    domain: int
    constants: Mapping[str, int]
    functions: Mapping[str, np.ndarray] = field(compare=False)

    def __post_init__(self):
        d = self.domain
        if d < 1:
            raise ValueError("domain must be non-empty")
        for name, v in self.constants.items():
            if not 0 <= v < d:
                raise ValueError(f"constant {name} = {v} is outside the domain")
        for name, table in self.functions.items():
            if table.ndim < 1 or any(n != d for n in table.shape):
                raise ValueError(f"table for {name} must have shape ({d}, ...) per argument")
            if table.size and (table.min() < 0 or table.max() >= d):
                raise ValueError(f"table for {name} leaves the domain")
        if set(self.constants.values()) != set(range(d)):
            raise ValueError("every domain element needs a constant naming it")

    def arity(self, name: str) -> int | None:
        if name in self.constants:
            return 0
        if name in self.functions:
            return self.functions[name].ndim
        return None

    @property
    def symbols(self) -> dict[str, int]:
        out = {c: 0 for c in self.constants}
        out.update({f: t.ndim for f, t in self.functions.items()})
        return out


@dataclass(frozen=True)
class FunctionTable:
    variables: tuple[str, ...]
    values: tuple[int, ...]

    @classmethod
    def of(cls, variables: Sequence[str], arr: np.ndarray) -> FunctionTable:
        return cls(tuple(variables), tuple(int(v) for v in arr))


def boolean_model() -> FiniteModel:
    tables = {
        "xor": np.array([[0, 1], [1, 0]]),
        "and": np.array([[0, 0], [0, 1]]),
        "or": np.array([[0, 1], [1, 1]]),
        "not": np.array([1, 0]),
    }
    return FiniteModel(2, {"false": 0, "true": 1}, tables)


def bv_model(width: int, ops: Sequence[str] = BV_OPS) -> FiniteModel:
    """Fixed-width bit-vectors; operators are named ``bv<op>``, constants ``bv<n>``."""
    if width > MAX_BV_WIDTH:
        raise ResourceLimit(f"bit-vector width {width} exceeds {MAX_BV_WIDTH}")
    if width < 1:
        raise ValueError("width must be positive")
    d = 1 << width
    mask = d - 1
    x = np.arange(d)
    binary = {
        "and": np.bitwise_and.outer(x, x),
        "or": np.bitwise_or.outer(x, x),
        "xor": np.bitwise_xor.outer(x, x),
        "add": np.add.outer(x, x) & mask,
    }
    unary = {"not": ~x & mask, "shl1": (x << 1) & mask}
    tables = {}
    for op in ops:
        op = op.removeprefix("bv")
        if op in binary:
            tables["bv" + op] = binary[op]
        elif op in unary:
            tables["bv" + op] = unary[op]
        else:
            raise ValueError(f"unknown bit-vector operator {op}")
    return FiniteModel(d, {f"bv{i}": i for i in range(d)}, tables)


def load_model(source: str | Path | Mapping) -> FiniteModel:
    """Read ``{"domain", "constants", "functions": {name: {"arity", "table"}}}``."""
    if isinstance(source, Mapping):
        data = source
    else:
        data = json.loads(Path(source).read_text())
    d = int(data["domain"])
    functions = {}
    for name, entry in data.get("functions", {}).items():
        table = np.asarray(entry["table"], dtype=np.int64)
        if table.ndim != int(entry["arity"]):
            raise ValueError(f"table for {name} does not match arity {entry['arity']}")
        functions[name] = table
    return FiniteModel(d, {k: int(v) for k, v in data.get("constants", {}).items()}, functions)


class Evaluator:
    """Vectorized evaluation of terms over all assignments of ``variables``."""

    def __init__(self, m: FiniteModel, variables: Sequence[str]):
        self.model = m
        self.variables = tuple(variables)
        r = len(self.variables)
        self.size = m.domain**r
        grid = np.indices((m.domain,) * r).reshape(r, -1) if r else np.zeros((0, 1), dtype=np.int64)
        self.columns = {v: grid[i] for i, v in enumerate(self.variables)}
        self.cache: dict[Term, np.ndarray] = {}

    def table(self, t: Term, env: Mapping[str, np.ndarray] | None = None) -> np.ndarray:
        if env is None:
            hit = self.cache.get(t)
            if hit is not None:
                return hit
        out = self._eval(t, env)
        if env is None:
            self.cache[t] = out
        return out

    def _eval(self, t: Term, env) -> np.ndarray:
        m = self.model
        h = t.head
        if env is not None and h in env and not t.args:
            return env[h]
        if not t.args:
            if h in m.constants:
                return np.full(self.size, m.constants[h], dtype=np.int64)
            if h in self.columns:
                return self.columns[h]
        if h in m.functions and m.functions[h].ndim == len(t.args):
            args = [self.table(a, env) for a in t.args]
            return m.functions[h][tuple(args)]
        if h == "true" and not t.args:
            return np.ones(self.size, dtype=np.int64)
        if h == "false" and not t.args:
            return np.zeros(self.size, dtype=np.int64)
        if h == "ite":
            c, a, b = (self.table(x, env) for x in t.args)
            return np.where(c != 0, a, b)
        if h == "=":
            a, b = (self.table(x, env) for x in t.args)
            return (a == b).astype(np.int64)
        if h == "not":
            return (self.table(t.args[0], env) == 0).astype(np.int64)
        if h in ("and", "or"):
            vals = [self.table(x, env) != 0 for x in t.args]
            fn = np.logical_and if h == "and" else np.logical_or
            return fn.reduce(vals).astype(np.int64)
        if h == "=>":
            a, b = (self.table(x, env) != 0 for x in t.args)
            return (~a | b).astype(np.int64)
        if not t.args:
            raise KeyError(f"unassigned variable {h}")
        raise ModelMismatch(f"symbol {h}/{len(t.args)} has no interpretation")


def eval_term(m: FiniteModel, t: Term, assignment: Mapping[str, int]) -> int:
    names = tuple(assignment)
    ev = Evaluator(m, names)
    row = 0
    for v in names:
        row = row * m.domain + int(assignment[v])
    return int(ev.table(t)[row])


def eval_formula(m: FiniteModel, phi: Term, assignment: Mapping[str, int]) -> bool:
    return eval_term(m, phi, assignment) != 0


def function_table(m: FiniteModel, t: Term, variables: Sequence[str]) -> FunctionTable:
    return FunctionTable.of(variables, Evaluator(m, variables).table(t))


@dataclass
class FixpointResult:
    """Per-nonterminal expressions with distinct tables, in discovery order.

    ``history[i][V]`` lists the expressions added to ``V`` in iteration
    ``i + 1``.
    """

    variables: tuple[str, ...]
    sets: dict[str, list[tuple[Term, np.ndarray]]]
    history: list[dict[str, list[Term]]]

    def expressions(self, nt: str) -> list[Term]:
        return [t for t, _ in self.sets[nt]]

    def counts(self) -> dict[str, int]:
        return {nt: len(es) for nt, es in self.sets.items()}


def _nonterminal_leaves(rhs: Term, nts: set[str]) -> list[str]:
    return [s.head for s in _leaves(rhs) if s.head in nts]


def _leaves(t: Term):
    if not t.args:
        yield t
    for a in t.args:
        yield from _leaves(a)


def _plug(rhs: Term, nts: set[str], fill: list[Term]) -> Term:
    """Replace nonterminal leaves left to right by the terms in ``fill``."""
    it = iter(fill)

    def go(t: Term) -> Term:
        if not t.args:
            return next(it) if t.head in nts else t
        return Term(t.head, (go(a) for a in t.args))

    return go(rhs)


def grammar_variables(g: TreeGrammar, variables: Sequence[str]) -> tuple[str, ...]:
    used = {s.head for _, rhs in g.productions for s in iter_subterms(rhs)}
    return tuple(v for v in variables if v in used)


def fixpoint_enumerate(
    m: FiniteModel,
    g: TreeGrammar,
    variables: Sequence[str] = (),
    max_iterations: int | None = None,
) -> FixpointResult:
    """Grow ``E_V`` for every nonterminal until an iteration adds nothing.

    Each iteration reads the sets as they stood at its start, so the contents
    after iteration ``i`` are the functions derivable with height ``i``.
    """
    variables = tuple(variables)
    nts = set(g.nonterminals)
    ev = Evaluator(m, variables)
    for _, rhs in g.productions:
        for s in iter_subterms(rhs):
            if s.head in nts or s.head in variables:
                continue
            if s.head in ("ite", "=", "not", "and", "or", "=>", "true", "false"):
                continue
            if m.arity(s.head) != len(s.args):
                raise ModelMismatch(f"symbol {s.head}/{len(s.args)} has no interpretation")
    rules = [(lhs, rhs, _nonterminal_leaves(rhs, nts)) for lhs, rhs in g.productions]
    sets: dict[str, list[tuple[Term, np.ndarray]]] = {nt: [] for nt in g.nonterminals}
    seen: dict[str, set[bytes]] = {nt: set() for nt in g.nonterminals}
    history: list[dict[str, list[Term]]] = []
    while max_iterations is None or len(history) < max_iterations:
        snapshot = {nt: list(es) for nt, es in sets.items()}
        added: dict[str, list[Term]] = {nt: [] for nt in g.nonterminals}
        for lhs, rhs, leaves in rules:
            pools = [snapshot[nt] for nt in leaves]
            if not all(pools):
                continue
            for combo in itertools.product(*pools):
                env = {f"\0{i}": tab for i, (_, tab) in enumerate(combo)}
                shape = _plug(rhs, nts, [Term(f"\0{i}") for i in range(len(combo))])
                tab = ev.table(shape, env)
                key = tab.tobytes()
                if key in seen[lhs]:
                    continue
                seen[lhs].add(key)
                expr = _plug(rhs, nts, [t for t, _ in combo])
                sets[lhs].append((expr, tab))
                added[lhs].append(expr)
        history.append(added)
        if not any(added.values()):
            break
    return FixpointResult(variables, sets, history)


def _strip_forall(phi: Term) -> tuple[Term, list[str]]:
    bound: list[str] = []
    while phi.head == "forall":
        bound += [v.head for v in phi.args[:-1]]
        phi = phi.args[-1]
    if any(s.head in ("forall", "exists") for s in iter_subterms(phi)):
        raise Unsupported("only top-level universal quantifiers are supported")
    return phi, bound


def problem_variables(p: SygusProblem) -> tuple[tuple[str, ...], Term]:
    """Variables ranged over by the constraint, and the quantifier-free constraint."""
    parts, bound = [], []
    for c in p.constraints:
        body, vs = _strip_forall(c)
        parts.append(body)
        bound += [v for v in vs if v not in bound]
    variables = tuple(p.variables) + tuple(v for v in bound if v not in p.variables)
    phi = parts[0] if len(parts) == 1 else Term("and", parts)
    return variables, phi


def solve_fd(p: SygusProblem, m: FiniteModel) -> Verdict:
    """First expression of the start set (discovery order) that makes the constraint valid."""
    if p.grammar is not None and not isinstance(p.grammar, TreeGrammar):
        raise Unsupported("string grammars need the bounded engine")
    variables, phi = problem_variables(p)
    for name, arity in p.symbols.items():
        if name in p.variables:
            continue
        if m.arity(name) != arity:
            raise ModelMismatch(f"declared symbol {name}/{arity} has no interpretation")
    g = p.tree_grammar()
    gvars = tuple(p.params) + grammar_variables(g, [v for v in variables if v not in p.params])
    result = fixpoint_enumerate(m, g, gvars)
    ev = Evaluator(m, variables)
    for expr, _ in result.sets[g.start]:
        w = SecondOrderSubstitution(p.target, p.params, expr)
        if all(ev.table(apply_second_order(phi, w)) != 0):
            return Verdict("solvable", expr, engine="fd")
    return Verdict("unsolvable", None, engine="fd")


__all__ = [
    "Evaluator",
    "FiniteModel",
    "FixpointResult",
    "FunctionTable",
    "bv_model",
    "boolean_model",
    "eval_formula",
    "eval_term",
    "fixpoint_enumerate",
    "function_table",
    "load_model",
    "problem_variables",
    "solve_fd",
]

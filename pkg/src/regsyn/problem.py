"""Problem files: an s-expression format loosely modelled on SyGuS-IF.

::

    (set-logic EUF)
    (declare-fun g (U) U)
    (declare-const a U)
    (synth-fun f ((x1 U)) U ((S U)) ((S U (a x1 (g S)))))
    (constraint (=> (= (g a) a) (= (f a) a)))
    (check-synth)

The grammar of ``synth-fun`` may be omitted (every term over the signature
and the parameters), or given as ``(cfg <nonterminals> <rules>)`` for string
grammars, where quoted items are terminals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .automata import TreeAutomaton, TreeGrammar, universal_grammar
from .cfg import Nonterminal, StringGrammar
from .errors import (
    ArityMismatch,
    DuplicateDeclaration,
    MissingConstraint,
    ProblemSyntaxError,
    UnknownSymbol,
)
from .formulas import Signature, conj
from .terms import CONNECTIVES, HOLE, Term

LOGICS = ("EUF", "FD", "BV")
RESERVED = CONNECTIVES | {HOLE, "cfg"}
# fixed arities of connectives; None means variadic (at least one argument)
CONNECTIVE_ARITY = {"=": 2, "not": 1, "=>": 2, "ite": 3, "true": 0, "false": 0, "and": None, "or": None}


# --- s-expressions ---------------------------------------------------------

@dataclass(frozen=True)
class Sym:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Lit:
    """A double-quoted string literal."""

    value: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


SExpr = Sym | Lit | SList

_LEX = re.compile(r'\s+|;[^\n]*|\(|\)|"(?:[^"\\]|\\.)*"|[^\s();"]+')


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _LEX.match(text, pos)
        if m is None:
            raise ProblemSyntaxError("unterminated string literal", line, pos - line_start + 1)
        tok = m.group(0)
        if not tok[0].isspace() and tok[0] != ";":
            yield tok, line, pos - line_start + 1
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()


def parse_sexprs(text: str) -> list[SExpr]:
    stack: list[tuple[list, int, int]] = [([], 0, 0)]
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ProblemSyntaxError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            stack[-1][0].append(SList(tuple(items), l0, c0))
        elif tok.startswith('"'):
            stack[-1][0].append(Lit(bytes(tok[1:-1], "utf-8").decode("unicode_escape"), line, col))
        else:
            stack[-1][0].append(Sym(tok, line, col))
    if len(stack) != 1:
        _, line, col = stack[-1]
        raise ProblemSyntaxError("unbalanced '('", line, col)
    return stack[0][0]


def sexpr_to_str(e: SExpr) -> str:
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Lit):
        return '"' + e.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return "(" + " ".join(sexpr_to_str(x) for x in e.items) + ")"


def _err(cls, msg: str, e: SExpr):
    return cls(msg, e.line, e.col)


# --- problems --------------------------------------------------------------

@dataclass(frozen=True)
class Declaration:
    kind: str  # "fun", "const" or "var"
    name: str
    arity: int


@dataclass(frozen=True)
class SygusProblem:
    """Constraint, grammar and target of a synthesis problem."""

    logic: str
    declarations: tuple[Declaration, ...]
    target: str
    params: tuple[str, ...]
    grammar: TreeGrammar | StringGrammar | None
    constraints: tuple[Term, ...]
    sort: str = "U"
    info: tuple[tuple[str, str], ...] = ()

    @property
    def symbols(self) -> dict[str, int]:
        return {d.name: d.arity for d in self.declarations}

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.declarations if d.kind == "var")

    @property
    def signature(self) -> Signature:
        return Signature(self.symbols, self.target, self.params)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def formula(self) -> Term:
        return conj(*self.constraints)

    def info_value(self, key: str) -> str | None:
        for k, v in self.info:
            if k == key:
                return v
        return None

    def tree_grammar(self) -> TreeGrammar:
        """The candidate grammar; the universal one when none was given."""
        if isinstance(self.grammar, StringGrammar):
            raise TypeError("problem uses a string grammar")
        if self.grammar is not None:
            return self.grammar
        alphabet = {n: a for n, a in self.symbols.items()}
        alphabet.update({p: 0 for p in self.params})
        return universal_grammar(alphabet)

    @property
    def candidate_alphabet(self) -> dict[str, int]:
        """Symbols a candidate body may use: the signature plus the parameters."""
        out = dict(self.symbols)
        out.update({p: 0 for p in self.params})
        return dict(sorted(out.items()))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a solver run: ``solvable``, ``unsolvable`` or ``unknown``."""

    outcome: str
    witness: Term | None = None
    solutions: TreeAutomaton | None = None
    bound: int | None = None
    engine: str = ""
    found: tuple[Term, ...] = ()

    @property
    def solvable(self) -> bool:
        return self.outcome == "solvable"

    def record(self) -> str:
        w = "-" if self.witness is None else str(self.witness)
        return f"result={self.outcome} witness={w} engine={self.engine}"


class _Builder:
    def __init__(self):
        self.logic: str | None = None
        self.decls: dict[str, Declaration] = {}
        self.order: list[Declaration] = []
        self.target: str | None = None
        self.params: tuple[str, ...] = ()
        self.grammar = None
        self.constraints: list[Term] = []
        self.sort: str | None = None
        self.info: list[tuple[str, str]] = []

    def note_sort(self, e: SExpr):
        if not isinstance(e, Sym):
            raise _err(ProblemSyntaxError, "expected a sort name", e)
        if self.sort is None:
            self.sort = e.name

    def declare(self, kind: str, name_e: SExpr, arity: int):
        if not isinstance(name_e, Sym):
            raise _err(ProblemSyntaxError, "expected a symbol name", name_e)
        name = name_e.name
        if name in RESERVED:
            raise _err(ProblemSyntaxError, f"{name} is reserved", name_e)
        if name in self.decls or name == self.target or name in self.params:
            raise _err(DuplicateDeclaration, f"{name} is declared twice", name_e)
        d = Declaration(kind, name, arity)
        self.decls[name] = d
        self.order.append(d)


def _expect_list(e: SExpr, what: str) -> tuple:
    if not isinstance(e, SList):
        raise _err(ProblemSyntaxError, f"expected {what}", e)
    return e.items


def _arity_of(b: _Builder, name: str, extra: dict[str, int]) -> int | None:
    if name in extra:
        return extra[name]
    if name in b.decls:
        return b.decls[name].arity
    if name == b.target:
        return len(b.params)
    return None


def _term(b: _Builder, e: SExpr, scope: dict[str, int], allow_connectives: bool = True) -> Term:
    """Convert an s-expression to a term, checking symbols and arities."""
    if isinstance(e, Lit):
        raise _err(ProblemSyntaxError, "string literal in a term", e)
    if isinstance(e, Sym):
        head, args, at = e.name, (), e
    else:
        if not e.items:
            raise _err(ProblemSyntaxError, "empty application", e)
        head_e = e.items[0]
        if not isinstance(head_e, Sym):
            raise _err(ProblemSyntaxError, "application head must be a symbol", head_e)
        head, args, at = head_e.name, e.items[1:], head_e
        if head in ("forall", "exists"):
            return _quantifier(b, e, scope)
    if allow_connectives and head in CONNECTIVE_ARITY:
        want = CONNECTIVE_ARITY[head]
        if want is None and not args or want is not None and want != len(args):
            raise _err(ArityMismatch, f"{head} applied to {len(args)} arguments", at)
        return Term(head, (_term(b, a, scope, allow_connectives) for a in args))
    arity = _arity_of(b, head, scope)
    if arity is None:
        raise _err(UnknownSymbol, f"unknown symbol {head}", at)
    if arity != len(args):
        raise _err(ArityMismatch, f"{head} has arity {arity} but is applied to {len(args)} arguments", at)
    return Term(head, (_term(b, a, scope, allow_connectives) for a in args))


def _quantifier(b: _Builder, e: SList, scope: dict[str, int]) -> Term:
    if len(e.items) != 3:
        raise _err(ProblemSyntaxError, "quantifier needs binders and a body", e)
    scope = dict(scope)
    bound = []
    for binder in _expect_list(e.items[1], "a binder list"):
        parts = _expect_list(binder, "a (name sort) binder")
        if len(parts) != 2 or not isinstance(parts[0], Sym):
            raise _err(ProblemSyntaxError, "expected a (name sort) binder", binder)
        b.note_sort(parts[1])
        scope[parts[0].name] = 0
        bound.append(Term(parts[0].name))
    return Term(e.items[0].name, tuple(bound) + (_term(b, e.items[2], scope),))


def _synth_fun(b: _Builder, e: SList):
    items = e.items
    if len(items) not in (4, 5, 6):
        raise _err(ProblemSyntaxError, "malformed synth-fun", e)
    if b.target is not None:
        raise _err(DuplicateDeclaration, "only one synth-fun is allowed", e)
    name = items[1]
    if not isinstance(name, Sym) or name.name in RESERVED:
        raise _err(ProblemSyntaxError, "bad synth-fun name", name)
    if name.name in b.decls:
        raise _err(DuplicateDeclaration, f"{name.name} is declared twice", name)
    params = []
    for p in _expect_list(items[2], "a parameter list"):
        parts = _expect_list(p, "a (name sort) parameter")
        if len(parts) != 2 or not isinstance(parts[0], Sym):
            raise _err(ProblemSyntaxError, "expected a (name sort) parameter", p)
        pname = parts[0].name
        if pname in b.decls or pname in params or pname in RESERVED or pname == name.name:
            raise _err(DuplicateDeclaration, f"parameter {pname} clashes with another name", parts[0])
        b.note_sort(parts[1])
        params.append(pname)
    b.note_sort(items[3])
    b.target = name.name
    b.params = tuple(params)
    rest = items[4:]
    if not rest:
        return
    if len(rest) == 1 and isinstance(rest[0], SList) and rest[0].items and rest[0].items[0] == Sym("cfg"):
        b.grammar = _cfg(b, rest[0])
    elif len(rest) == 2:
        b.grammar = _tree_grammar(b, rest[0], rest[1])
    else:
        raise _err(ProblemSyntaxError, "malformed grammar", rest[0])


def _nonterminal_decls(b: _Builder, e: SExpr) -> list[str]:
    names: list[str] = []
    for nd in _expect_list(e, "a nonterminal list"):
        parts = _expect_list(nd, "a (name sort) nonterminal")
        if len(parts) != 2 or not isinstance(parts[0], Sym):
            raise _err(ProblemSyntaxError, "expected a (name sort) nonterminal", nd)
        n = parts[0].name
        if n in names or n in b.decls or n in b.params or n == b.target or n in RESERVED:
            raise _err(DuplicateDeclaration, f"nonterminal {n} clashes with another name", parts[0])
        names.append(n)
    if not names:
        raise _err(ProblemSyntaxError, "grammar needs at least one nonterminal", e)
    return names


def _rule_groups(e: SExpr, names: list[str]) -> Iterator[tuple[str, tuple]]:
    seen = set()
    for group in _expect_list(e, "a rule list"):
        parts = _expect_list(group, "a (name sort (rules)) group")
        if len(parts) != 3 or not isinstance(parts[0], Sym):
            raise _err(ProblemSyntaxError, "expected a (name sort (rules)) group", group)
        n = parts[0].name
        if n not in names:
            raise _err(UnknownSymbol, f"rules for undeclared nonterminal {n}", parts[0])
        if n in seen:
            raise _err(DuplicateDeclaration, f"rules for {n} given twice", parts[0])
        seen.add(n)
        yield n, _expect_list(parts[2], "a list of rules")


def _tree_grammar(b: _Builder, nts_e: SExpr, rules_e: SExpr) -> TreeGrammar:
    names = _nonterminal_decls(b, nts_e)
    scope = {n: 0 for n in names}
    scope.update({p: 0 for p in b.params})
    prods = []
    for n, rules in _rule_groups(rules_e, names):
        for r in rules:
            rhs = _term(b, r, scope)
            if rhs.head == b.target or any(s.head == b.target for s in _walk(rhs)):
                raise _err(ProblemSyntaxError, "the target symbol may not occur in its grammar", r)
            prods.append((n, rhs))
    return TreeGrammar(tuple(names), names[0], tuple(prods))


def _walk(t: Term):
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(s.args)


def _cfg(b: _Builder, e: SList) -> StringGrammar:
    if len(e.items) != 3:
        raise _err(ProblemSyntaxError, "cfg grammar needs nonterminals and rules", e)
    names = _nonterminal_decls(b, e.items[1])
    prods = []
    for n, rules in _rule_groups(e.items[2], names):
        for r in rules:
            body = []
            for item in _expect_list(r, "a sequence of grammar items"):
                if isinstance(item, Lit):
                    body.append(item.value)
                elif isinstance(item, Sym) and item.name in names:
                    body.append(Nonterminal(item.name))
                else:
                    raise _err(UnknownSymbol, "cfg items are quoted terminals or nonterminals", item)
            if not body:
                raise _err(ProblemSyntaxError, "empty production", r)
            prods.append((n, tuple(body)))
    return StringGrammar(tuple(names), names[0], tuple(prods))


def parse_problem(text: str) -> SygusProblem:
    b = _Builder()
    for cmd in parse_sexprs(text):
        items = _expect_list(cmd, "a command")
        if not items or not isinstance(items[0], Sym):
            raise _err(ProblemSyntaxError, "expected a command name", cmd)
        name = items[0].name
        if name == "set-logic":
            if len(items) != 2 or not isinstance(items[1], Sym) or items[1].name not in LOGICS:
                raise _err(ProblemSyntaxError, f"logic must be one of {', '.join(LOGICS)}", cmd)
            if b.logic is not None:
                raise _err(DuplicateDeclaration, "logic set twice", cmd)
            b.logic = items[1].name
        elif name == "set-info":
            if len(items) != 3 or not isinstance(items[1], Sym) or not items[1].name.startswith(":"):
                raise _err(ProblemSyntaxError, "expected (set-info :key value)", cmd)
            b.info.append((items[1].name[1:], sexpr_to_str(items[2])))
        elif name == "declare-fun":
            if len(items) != 4:
                raise _err(ProblemSyntaxError, "expected (declare-fun name (sorts) sort)", cmd)
            arg_sorts = _expect_list(items[2], "an argument sort list")
            for s in arg_sorts:
                b.note_sort(s)
            b.note_sort(items[3])
            b.declare("fun", items[1], len(arg_sorts))
        elif name in ("declare-const", "declare-var"):
            if len(items) != 3:
                raise _err(ProblemSyntaxError, f"expected ({name} name sort)", cmd)
            b.note_sort(items[2])
            b.declare("const" if name == "declare-const" else "var", items[1], 0)
        elif name == "synth-fun":
            _synth_fun(b, cmd)
        elif name == "constraint":
            if b.target is None:
                raise _err(ProblemSyntaxError, "constraint before synth-fun", cmd)
            if len(items) != 2:
                raise _err(ProblemSyntaxError, "expected (constraint formula)", cmd)
            b.constraints.append(_term(b, items[1], {}))
        elif name == "check-synth":
            if len(items) != 1:
                raise _err(ProblemSyntaxError, "check-synth takes no arguments", cmd)
        else:
            raise _err(ProblemSyntaxError, f"unknown command {name}", items[0])
    if b.target is None:
        raise ProblemSyntaxError("missing synth-fun", 0, 0)
    if not b.constraints:
        raise MissingConstraint("no constraint given", 0, 0)
    return SygusProblem(
        logic=b.logic or "EUF",
        declarations=tuple(b.order),
        target=b.target,
        params=b.params,
        grammar=b.grammar,
        constraints=tuple(b.constraints),
        sort=b.sort or "U",
        info=tuple(b.info),
    )


def parse_term(text: str, problem: SygusProblem, extra: dict[str, int] | None = None) -> Term:
    """Parse a term over the problem's symbols, its parameters and ``extra``."""
    exprs = parse_sexprs(text)
    if len(exprs) != 1:
        raise ProblemSyntaxError("expected exactly one term", 1, 1)
    b = _Builder()
    b.decls = {d.name: d for d in problem.declarations}
    b.target = problem.target
    b.params = problem.params
    scope = {p: 0 for p in problem.params}
    scope.update(extra or {})
    return _term(b, exprs[0], scope)


# --- printing --------------------------------------------------------------

def _format_term(t: Term, sort: str) -> str:
    if t.head in ("forall", "exists"):
        binders = " ".join(f"({v.head} {sort})" for v in t.args[:-1])
        return f"({t.head} ({binders}) {_format_term(t.args[-1], sort)})"
    if not t.args:
        return t.head
    return "(" + " ".join([t.head] + [_format_term(a, sort) for a in t.args]) + ")"


def _format_grammar(g: TreeGrammar | StringGrammar, sort: str) -> str:
    nts = " ".join(f"({n} {sort})" for n in g.nonterminals)
    groups = []
    for n in g.nonterminals:
        bodies = [body for lhs, body in g.productions if lhs == n]
        if isinstance(g, StringGrammar):
            rules = " ".join(
                "(" + " ".join(i.name if isinstance(i, Nonterminal) else sexpr_to_str(Lit(i)) for i in body) + ")"
                for body in bodies
            )
        else:
            rules = " ".join(_format_term(body, sort) for body in bodies)
        groups.append(f"({n} {sort} ({rules}))")
    sep = "\n   "
    if isinstance(g, StringGrammar):
        return f"(cfg ({nts})\n  ({sep.join(groups)}))"
    return f"({nts})\n  ({sep.join(groups)})"


def print_problem(p: SygusProblem) -> str:
    s = p.sort
    out = [f"(set-logic {p.logic})"]
    out += [f"(set-info :{k} {v})" for k, v in p.info]
    for d in p.declarations:
        if d.kind == "fun":
            out.append(f"(declare-fun {d.name} ({' '.join([s] * d.arity)}) {s})")
        else:
            out.append(f"(declare-{d.kind} {d.name} {s})")
    params = " ".join(f"({x} {s})" for x in p.params)
    head = f"(synth-fun {p.target} ({params}) {s}"
    if p.grammar is None:
        out.append(head + ")")
    else:
        out.append(head + "\n  " + _format_grammar(p.grammar, s) + ")")
    out += [f"(constraint {_format_term(c, s)})" for c in p.constraints]
    out.append("(check-synth)")
    return "\n".join(out) + "\n"

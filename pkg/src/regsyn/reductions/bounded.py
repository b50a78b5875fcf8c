"""Size-bounded enumeration driver for problems outside the decidable fragments."""

from __future__ import annotations

from typing import Callable, Iterator

from ..automata import TreeGrammar, enumerate_language, grammar_to_automaton
from ..cfg import StringGrammar, enumerate_strings, parse_term_string
from ..congruence import ground_formula_valid
from ..errors import Unsupported
from ..formulas import skolemize_universals
from ..problem import SygusProblem, Verdict
from ..terms import SecondOrderSubstitution, Term, apply_second_order
from .bv import check_bv_candidate
from .pcp import PcpInstance, check_pcp_candidate

Oracle = Callable[[Term], bool]


def candidates(p: SygusProblem, max_size: int) -> Iterator[Term]:
    """Grammar members in size order.

    For string grammars the size is the token count and strings that do not
    parse as terms over the signature are skipped.
    """
    g = p.grammar
    if isinstance(g, StringGrammar):
        alphabet = p.candidate_alphabet
        for tokens in enumerate_strings(g, max_size):
            t = parse_term_string("".join(tokens), alphabet)
            if t is not None:
                yield t
        return
    tree: TreeGrammar = p.tree_grammar()
    yield from enumerate_language(grammar_to_automaton(tree, p.params), max_size)


def bounded_solve(
    p: SygusProblem, oracle: Oracle, max_size: int, collect: bool = False
) -> Verdict:
    """First oracle-approved candidate of size <= ``max_size``; never ``unsolvable``.

    With ``collect`` every approved candidate up to the bound is recorded in
    ``found`` (the witness is still the first one).
    """
    found: list[Term] = []
    for w in candidates(p, max_size):
        if oracle(w):
            if not collect:
                return Verdict("solvable", w, bound=max_size, engine="bounded", found=(w,))
            found.append(w)
    if found:
        return Verdict("solvable", found[0], bound=max_size, engine="bounded", found=tuple(found))
    return Verdict("unknown", None, bound=max_size, engine="bounded")


def euf_oracle(p: SygusProblem) -> Oracle:
    """Ground validity of the constraint with the candidate substituted."""
    phi, _ = skolemize_universals(p.formula, p.signature)

    def check(w: Term) -> bool:
        return ground_formula_valid(apply_second_order(phi, SecondOrderSubstitution(p.target, p.params, w)))

    return check


PCP_SOURCES = ("pcp-tree", "pcp-regular", "pcp-arrays")
# generators whose candidates are judged by a dedicated checker, not by EUF validity
CHECKED_SOURCES = PCP_SOURCES + ("cfg-bv",)


def oracle_for(p: SygusProblem) -> Oracle:
    """The exact checker recorded by a generator, else the ground EUF oracle."""
    source = p.info_value("source")
    if source in PCP_SOURCES:
        inst = PcpInstance.from_info(p.info_value("pairs"))
        return lambda w: check_pcp_candidate(inst, w)
    if source == "cfg-bv":
        return check_bv_candidate
    if p.logic == "EUF":
        return euf_oracle(p)
    raise Unsupported(f"no candidate checker for {p.logic} problems")


__all__ = ["CHECKED_SOURCES", "bounded_solve", "candidates", "euf_oracle", "oracle_for"]

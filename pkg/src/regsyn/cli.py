"""Command-line front end.

Results go to stdout as one ``result=... witness=... engine=...`` line,
diagnostics to stderr.  Exit codes: 0 solvable/valid, 1 unsolvable/invalid,
2 unknown, 3 usage or parse error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .automata import enumerate_language, grammar_to_automaton, member, to_dot
from .errors import (
    MalformedCandidate,
    NotRegular,
    ProblemSyntaxError,
    RegsynError,
    ResourceLimit,
)
from .fd import Evaluator, load_model, problem_variables, solve_fd
from .problem import SygusProblem, Verdict, parse_problem, parse_term, print_problem
from .reductions import (
    CHECKED_SOURCES,
    PcpInstance,
    bounded_solve,
    gen_cfg_bv,
    gen_pcp_arrays,
    gen_pcp_regular,
    gen_pcp_tree,
    gen_pcp_wellformed,
    gen_sreu,
    oracle_for,
    parse_cfg_pair,
    parse_sreu,
)
from .regular import normalize, solve
from .terms import SecondOrderSubstitution, Term, apply_second_order

EXIT_SOLVABLE, EXIT_UNSOLVABLE, EXIT_UNKNOWN, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3, 4
ENGINES = ("auto", "regular-euf", "fd", "bounded")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    engine: str = "auto"
    model: Path | None = None
    max_size: int | None = None
    emit_automaton: Path | None = None
    candidate: str | None = None
    kind: str | None = None
    output: Path | None = None
    verbose: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise UsageError(f"unknown engine {self.engine}")
        if self.engine == "fd" and self.model is None:
            raise UsageError("--engine fd needs --model")
        if self.engine == "bounded" and self.max_size is None:
            raise UsageError("--engine bounded needs --max-size")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: Path) -> SygusProblem:
    return parse_problem(Path(path).read_text())


def _model(cfg: RunConfig):
    if cfg.model is None:
        raise UsageError("FD problems need --model")
    return load_model(cfg.model)


def _bounded(cfg: RunConfig, p: SygusProblem, collect: bool = False) -> Verdict:
    if cfg.max_size is None:
        raise UsageError("bounded search needs --max-size")
    return bounded_solve(p, oracle_for(p), cfg.max_size, collect=collect)


def _run(cfg: RunConfig, p: SygusProblem, collect: bool = False) -> Verdict:
    engine = cfg.engine
    if engine == "auto":
        engine = "fd" if p.logic == "FD" else "regular-euf" if p.logic == "EUF" else "bounded"
        source = p.info_value("source")
        if source in CHECKED_SOURCES:
            _log(f"{source} problems are judged by their own checker; using bounded search")
            engine = "bounded"
        if engine == "regular-euf":
            try:
                normalize(p)
            except ResourceLimit:
                raise
            except RegsynError as e:  # NotRegular, string grammars, ite in the grammar
                _log(f"regular-euf not applicable ({e}); falling back to bounded search")
                engine = "bounded"
    if engine == "regular-euf":
        return solve(p)
    if engine == "fd":
        return solve_fd(p, _model(cfg))
    return _bounded(cfg, p, collect)


def _exit_for(v: Verdict) -> int:
    return {"solvable": EXIT_SOLVABLE, "unsolvable": EXIT_UNSOLVABLE}.get(v.outcome, EXIT_UNKNOWN)


def cmd_solve(cfg: RunConfig) -> int:
    p = _load(cfg.input)
    v = _run(cfg, p)
    if cfg.emit_automaton is not None:
        if v.solutions is None:
            _log(f"engine {v.engine} produces no automaton; nothing written")
        else:
            Path(cfg.emit_automaton).write_text(to_dot(v.solutions, name="solutions"))
    print(v.record())
    return _exit_for(v)


def check_candidate(p: SygusProblem, w: Term, model=None) -> bool:
    """Validity of the constraint with ``w`` substituted for the target."""
    if p.logic == "FD":
        if model is None:
            raise UsageError("FD problems need --model")
        variables, phi = problem_variables(p)
        psi = apply_second_order(phi, SecondOrderSubstitution(p.target, p.params, w))
        return bool((Evaluator(model, variables).table(psi) != 0).all())
    try:
        return oracle_for(p)(w)
    except MalformedCandidate as e:
        _log(str(e))
        return False


def cmd_check(cfg: RunConfig) -> int:
    p = _load(cfg.input)
    if cfg.candidate is None:
        raise UsageError("check needs --candidate")
    w = parse_term(cfg.candidate, p, {x: 0 for x in p.params})
    model = load_model(cfg.model) if cfg.model is not None else None
    if p.grammar is not None:
        try:
            in_grammar = member(grammar_to_automaton(p.tree_grammar(), p.params), w)
        except (TypeError, RegsynError):
            in_grammar = True  # string grammars are checked by the oracle only
        if not in_grammar:
            _log(f"note: {w} is not generated by the grammar")
    ok = check_candidate(p, w, model)
    print("valid" if ok else "invalid")
    return EXIT_SOLVABLE if ok else EXIT_UNSOLVABLE


def _gen_pcp(make):
    return lambda text: make(PcpInstance.from_json(json.loads(text)))


GENERATORS = {
    "sreu": lambda text: gen_sreu(parse_sreu(text)),
    "pcp-tree": _gen_pcp(gen_pcp_tree),
    "pcp-regular": _gen_pcp(gen_pcp_regular),
    "pcp-arrays": _gen_pcp(gen_pcp_arrays),
    "pcp-wellformed": _gen_pcp(gen_pcp_wellformed),
    "cfg-bv": lambda text: gen_cfg_bv(parse_cfg_pair(text)),
}


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.kind not in GENERATORS:
        raise UsageError(f"unknown generator kind {cfg.kind!r}; choose from {', '.join(GENERATORS)}")
    text = Path(cfg.input).read_text()
    try:
        p = GENERATORS[cfg.kind](text)
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"bad {cfg.kind} input: {e}") from e
    out = print_problem(p)
    if cfg.output is None:
        sys.stdout.write(out)
    else:
        Path(cfg.output).write_text(out)
    return EXIT_SOLVABLE


def cmd_enum(cfg: RunConfig) -> int:
    p = _load(cfg.input)
    if cfg.max_size is None:
        raise UsageError("enum needs --max-size")
    v = _run(cfg, p, collect=True)
    if v.solutions is not None:
        terms = list(enumerate_language(v.solutions, cfg.max_size))
    elif v.engine == "bounded":
        terms = list(v.found)
    else:
        terms = [v.witness] if v.witness is not None else []
        _log(f"engine {v.engine} reports a single witness")
    for t in terms:
        print(t)
    return EXIT_SOLVABLE if terms else EXIT_UNSOLVABLE


COMMANDS = {"solve": cmd_solve, "check": cmd_check, "gen": cmd_gen, "enum": cmd_enum}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regsyn", description="Synthesis over EUF and finite-domain theories.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def engine_opts(sp):
        sp.add_argument("--engine", default="auto", choices=ENGINES)
        sp.add_argument("--model", type=Path, help="finite model (JSON) for FD problems")
        sp.add_argument("--max-size", type=int, help="size bound for bounded search")

    s = sub.add_parser("solve", help="decide a problem file")
    s.add_argument("input", type=Path)
    engine_opts(s)
    s.add_argument("--emit-automaton", type=Path, help="write the solution automaton as DOT")

    c = sub.add_parser("check", help="check one candidate body")
    c.add_argument("input", type=Path)
    c.add_argument("--candidate", required=True)
    c.add_argument("--model", type=Path)

    g = sub.add_parser("gen", help="emit a problem from a reduction")
    g.add_argument("kind")
    g.add_argument("input", type=Path, help="instance description")
    g.add_argument("-o", "--output", type=Path)

    e = sub.add_parser("enum", help="list solutions up to a size")
    e.add_argument("input", type=Path)
    engine_opts(e)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_SOLVABLE
    opts = {k: v for k, v in vars(ns).items() if v is not None}
    try:
        cfg = RunConfig(**opts)
        return COMMANDS[cfg.command](cfg)
    except ResourceLimit as e:
        _log(f"resource limit: {e}")
        return EXIT_RESOURCE
    except (UsageError, ProblemSyntaxError, NotRegular, RegsynError, OSError) as e:
        _log(f"error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

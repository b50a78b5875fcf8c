"""Exception hierarchy shared by every engine."""

from __future__ import annotations


class RegsynError(Exception):
    """Base class for all library errors."""


class ProblemSyntaxError(RegsynError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class ArityMismatch(ProblemSyntaxError):
    pass


class UnknownSymbol(ProblemSyntaxError):
    pass


class DuplicateDeclaration(ProblemSyntaxError):
    pass


class MissingConstraint(ProblemSyntaxError):
    pass


class Unsupported(RegsynError):
    pass


class ResourceLimit(RegsynError):
    pass


class AlphabetError(RegsynError):
    pass


class InvalidSupport(RegsynError):
    pass


class NotRegular(RegsynError):
    def __init__(self, message: str, clause=None):
        self.clause = clause
        super().__init__(message)


class IteInGrammar(RegsynError):
    pass


class EmptyLanguage(RegsynError):
    pass


class ModelMismatch(RegsynError):
    pass


class MalformedCandidate(RegsynError):
    pass

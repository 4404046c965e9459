"""Exception hierarchy shared across the package."""


class CKRGError(Exception):
    """Base class for every error raised by ckrg."""


# coefficient ring
class NotInvertible(CKRGError):
    pass


class UnexpandedExponential(CKRGError):
    pass


class ExpandedInput(CKRGError):
    pass


class DivergentLimit(CKRGError):
    pass


class TruncationExhausted(CKRGError):
    pass


# trees and functionals
class DegreeCapExceeded(CKRGError):
    pass


class NotACharacter(CKRGError):
    pass


class NotInfinitesimal(CKRGError):
    pass


class UnrepresentableAngle(CKRGError):
    pass


# decomposition and flows
class MissingLowerDegree(CKRGError):
    pass


class DivergentEvolution(CKRGError):
    pass


class NonzeroCounit(CKRGError):
    pass


class PoleBoundViolated(CKRGError):
    pass


# toy rules
class RuleIncomplete(CKRGError):
    pass


class DuplicateTree(CKRGError):
    pass


class ParseError(CKRGError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


# command line
class ConfigError(CKRGError):
    """Invalid run configuration (maps to exit code 2)."""

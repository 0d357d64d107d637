"""Exception hierarchy shared by all modules."""


class GPError(Exception):
    """Base class for all errors raised by gpverify."""


class ParseError(GPError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class TypeMismatch(ParseError):
    pass


class NonSimpleLHS(GPError):
    pass


class UndeclaredVariable(GPError):
    pass


class RHSVariableNotInLHS(GPError):
    pass


class InvalidRule(GPError):
    pass


class RecursiveProcedure(GPError):
    pass


class MissingMain(GPError):
    pass


class UnknownRule(GPError):
    pass


class KindMismatch(GPError):
    pass


class UnboundVariable(GPError):
    pass


class ResidualAuxTerm(GPError):
    pass


class VariableClash(GPError):
    pass


class NotLoopFree(GPError):
    pass


class NotIteration(GPError):
    pass


class BreakUnsupported(GPError):
    pass


class NotControlProgram(GPError):
    pass


class UniverseTooSmall(UserWarning):
    """Issued when a label variable of a non-simple left-hand side
    cannot be bound inside the label universe."""

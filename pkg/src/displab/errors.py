"""Exception hierarchy shared by every displab module."""


class DisplabError(Exception):
    """Base class for all errors raised by displab."""


class DimensionError(DisplabError, ValueError):
    """Operands live in spaces of different dimension."""


class InvalidOperatorError(DisplabError, ValueError):
    """An operator or monotone-operator description violates its invariants."""


class NumericalFailure(DisplabError, ArithmeticError):
    """A numerical subproblem did not meet its accuracy target."""


class NonFiniteIterateError(DisplabError, FloatingPointError):
    """An iteration produced NaN or Inf.

    ``last_iterate`` is the last finite point and ``iteration`` its index.
    """

    def __init__(self, message, last_iterate=None, iteration=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iteration = iteration


class DSLError(DisplabError, ValueError):
    """Operator DSL document rejected by the parser.

    ``code`` is one of the stable error codes listed in :mod:`displab.dsl`;
    ``pointer`` is an RFC 6901 JSON pointer to the offending node.
    """

    def __init__(self, code, message, pointer=""):
        super().__init__(f"{code} at '{pointer or '/'}': {message}")
        self.code = code
        self.pointer = pointer

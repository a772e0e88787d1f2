"""Exception hierarchy shared by every module of the kernel."""


class SurrealCalcError(Exception):
    """Base class for all kernel errors."""


class ParseError(SurrealCalcError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class PowError(SurrealCalcError):
    pass


class DomainError(SurrealCalcError):
    pass


class UnboundSymbol(SurrealCalcError):
    pass


# Unsupported-class family: the input leaves the supported basis or grammar.
class UnsupportedError(SurrealCalcError):
    pass


class UnsupportedExpansion(UnsupportedError):
    pass


class IncomparableMonomials(UnsupportedError):
    pass


class NoAntiderivative(UnsupportedError):
    pass


class UnsupportedSequenceClass(UnsupportedError):
    pass


class UnsupportedSeries(UnsupportedError):
    pass


class NotSolvable(UnsupportedError):
    pass


class NotPurelyInfinite(UnsupportedError):
    pass


class InvalidPower(UnsupportedError):
    pass


# Divergence family: the germ exists but cannot be placed in the target class.
class DivergenceError(SurrealCalcError):
    pass


class NotInvertible(DivergenceError):
    pass


class OrderUnreachable(DivergenceError):
    pass


class GermNotInJPlusR(DivergenceError):
    pass

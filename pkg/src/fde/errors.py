"""Exception hierarchy shared by all fde modules."""


class FdeError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedFamily(FdeError):
    pass


class BadInterval(FdeError):
    pass


class OutOfDomain(FdeError, ValueError):
    pass


class DerivativeOrderTooHigh(FdeError, ValueError):
    pass


class SingularBcSystem(FdeError):
    pass


class GridTooSmall(FdeError, ValueError):
    pass


class IndexOutOfRange(FdeError, IndexError):
    pass


class NoConvergence(FdeError):
    def __init__(self, message, last_updates=()):
        super().__init__(message)
        self.last_updates = tuple(last_updates)


class NonFiniteIterate(FdeError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class MissingLipschitz(FdeError):
    pass


class ExprSyntaxError(FdeError, SyntaxError):
    def __init__(self, message, offset, expected=()):
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")
        self.offset = offset


class UnknownIdentifier(FdeError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class MissingVariable(FdeError):
    pass


class DomainError(FdeError, ArithmeticError):
    def __init__(self, function, argument):
        self.function = function
        self.argument = argument
        super().__init__(f"{function} undefined at argument {argument!r}")


class ProblemFileError(FdeError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class PhiOutOfRange(FdeError):
    pass


class UnknownProblem(FdeError, KeyError):
    pass


class UnknownTable(FdeError, KeyError):
    pass

"""Exception hierarchy shared by all treeminors modules."""


class TreeMinorsError(Exception):
    """Base class for every error raised by this package."""


class InputError(TreeMinorsError, ValueError):
    """Bad input: malformed graph, subset, matrix shape or file."""


class NotATree(InputError):
    pass


class NonPositiveLength(InputError):
    pass


class DuplicateLabel(InputError):
    pass


class InvalidEdge(InputError, IndexError):
    pass


class InvalidVertex(InputError, IndexError):
    pass


class UnknownVertex(InputError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class EmptySubset(InputError):
    pass


class SubsetTooSmall(InputError):
    pass


class NotNested(InputError):
    pass


class NotSquare(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotSymmetric(InputError):
    pass


class Singular(TreeMinorsError, ArithmeticError):
    pass


class NoSuchRoot(InputError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class Disconnected(InputError):
    pass


class BadMomentum(InputError):
    pass


class NotUnitLengths(InputError):
    pass


class TooSmall(InputError):
    pass


class TooLarge(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class IdentityViolation(TreeMinorsError, AssertionError):
    """Two independent routes to the same quantity disagreed.

    This always indicates a bug in the implementation, never bad input.
    """

    def __init__(self, name: str, left, right, context: str = ""):
        msg = f"{name}: {left!r} != {right!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.name = name
        self.left = left
        self.right = right

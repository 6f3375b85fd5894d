"""Exception types shared across the package.

Everything raised on purpose derives from AlgebraError so callers (and the
fuzz tests) can distinguish structured failures from genuine bugs.
"""


class AlgebraError(Exception):
    pass


class DivisionByZero(AlgebraError, ZeroDivisionError):
    """Division by the zero element of a field or ring."""


class ReducibleModulus(AlgebraError):
    """A field modulus turned out to be reducible.

    Detected lazily: inverting a nonzero element produced a nontrivial gcd
    with the modulus.  The offending factor is carried in args.
    """


class ZeroDivisor(AlgebraError):
    """Inversion failed in a quotient ring K[y]/(M) because the element
    shares a nontrivial factor with M.  The ring is not a field."""


class RingMismatch(AlgebraError):
    """Operands belong to different coefficient rings."""


class NotAdditive(AlgebraError):
    """A polynomial was expected to have only p-power exponents."""


class BudgetExceeded(AlgebraError):
    pass


class DegreeBudgetExceeded(BudgetExceeded):
    """A symbolic expansion would exceed the configured degree budget."""


class TauDegreeBudgetExceeded(BudgetExceeded):
    """A twisted product or power would exceed the tau-degree budget."""


class ParseError(AlgebraError, SyntaxError):
    """Syntax error in an expression or scenario, annotated with position.

    Also a SyntaxError so generic handlers see the conventional type.
    """

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.message = message
        self.position = position

    def __str__(self) -> str:
        if self.position >= 0:
            return f"{self.message} (at position {self.position})"
        return self.message


class UndefinedSymbol(ParseError):
    """A symbol (w, y, x, T) used outside a context that defines it."""


class MixedVariables(ParseError):
    """An expression combines x and T, which live in different algebras."""


class ValidationError(AlgebraError):
    """A scenario is structurally invalid.  `field` names the bad key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message

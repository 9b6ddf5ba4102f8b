"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested computation exceeds a configured size bound."""


class SingularSystemError(ArithmeticError):
    """The hitting-time linear system is singular (disconnected walk graph)."""

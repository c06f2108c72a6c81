"""Custom exceptions for cptalloc."""

EXIT_INVALID_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_BUDGET_EXCEEDED = 3


class CptAllocError(Exception):
    """Base exception for cptalloc errors."""

    def __init__(self, message: str, exit_code: int | None = None):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.exit_code:
            return f"[{self.exit_code}] {self.message}"
        return self.message


class InvalidInputError(CptAllocError):
    """Raised when arguments, shapes or probabilities are malformed."""

    def __init__(self, message: str = "Invalid input"):
        super().__init__(message, exit_code=EXIT_INVALID_INPUT)


class InvalidInstanceError(InvalidInputError):
    """Raised when a network instance violates its invariants."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__(f"Invalid instance: {'; '.join(violations)}")


class ConvergenceError(CptAllocError):
    """Raised when a solver cannot produce a usable answer."""

    def __init__(self, message: str = "Solver did not converge"):
        super().__init__(message, exit_code=EXIT_NOT_CONVERGED)


class BudgetExceededError(CptAllocError):
    """Raised when an enumeration exceeds its configured budget."""

    def __init__(self, message: str = "Search budget exceeded", required: int | None = None):
        super().__init__(message, exit_code=EXIT_BUDGET_EXCEEDED)
        self.required = required


class UnboundedProblemError(CptAllocError):
    """Raised when prices are too low for a user problem to have a maximum."""

    def __init__(self, message: str = "Problem is unbounded at these prices"):
        super().__init__(message, exit_code=EXIT_INVALID_INPUT)


class UnsupportedFamilyError(CptAllocError):
    """Raised when an operation needs a weighting function the agent lacks."""

    def __init__(self, message: str = "Unsupported weighting family"):
        super().__init__(message, exit_code=EXIT_INVALID_INPUT)


class StructureUndefinedError(CptAllocError):
    """Raised when the optimal-lottery tail index is undefined (p* > (k-1)/k)."""

    def __init__(self, message: str = "Tail structure undefined"):
        super().__init__(message, exit_code=EXIT_INVALID_INPUT)

"""Exception hierarchy shared by all gramgen modules."""


class GrammarError(ValueError):
    pass


class ValidationError(GrammarError):
    pass


class ShapeError(GrammarError):
    """Rule right-hand side matches none of the supported rule classes."""


class UndeclaredSymbol(GrammarError):
    pass


class DuplicateRule(GrammarError):
    pass


class FormatError(GrammarError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(ValueError):
    """Generation parameters outside their integer domains."""


class InfeasibleParams(ValueError):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(f"infeasible generation parameters: {verdict.describe()}")


class Unsatisfiable(RuntimeError):
    pass


class DeadEnd(RuntimeError):
    """No admissible rule can be added in the current build state."""


class InternalRetryExhausted(RuntimeError):
    pass


class IncompleteBuild(RuntimeError):
    pass


class UnsupportedRule(GrammarError):
    pass


class UnknownTerminal(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NoYield(RuntimeError):
    pass


class EmptyLength(ValueError):
    pass


class Exhausted(RuntimeError):
    """Rejection sampling ran out of attempts; ``partial`` holds what was produced."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)

"""Exception hierarchy shared by the library and the command-line driver.

Each error also derives from the builtin that callers would naturally catch
(``ValueError`` for bad input, ``RuntimeError`` for internal failures), and
carries the process exit code the CLI maps it to.
"""


class MpldError(Exception):
    """Root of all mpld errors."""
    exit_code: int = 1


class ParseError(MpldError, ValueError):
    """Malformed .dg / .lay input. Carries the 1-based line number when known."""
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        elif source:
            where = f"{source}: "
        super().__init__(f"{where}{message}")

    def with_source(self, source: str) -> "ParseError":
        return ParseError(self.message, self.line, source)


class ConfigError(MpldError, ValueError):
    exit_code = 3


class ParameterError(MpldError, ValueError):
    """An operation was called with an argument outside its domain."""
    exit_code = 3


class DimensionError(MpldError, ValueError):
    exit_code = 3


class GraphError(MpldError, ValueError):
    """The graph handed to an operation does not meet its precondition."""
    exit_code = 3


class SolverSizeError(MpldError, ValueError):
    """The exact search was asked to handle more vertices than its limit."""
    exit_code = 3

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"Exact search limited to {limit} vertices, got {n}.")


class BudgetExhaustedError(MpldError, RuntimeError):
    exit_code = 4


class InvariantError(MpldError, RuntimeError):
    """An internal guarantee was broken. Always a bug."""
    exit_code = 1

"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class FFLError(Exception):
    exit_code = 1


class InvalidArgumentError(FFLError, ValueError):
    exit_code = 3


class ConfigParseError(FFLError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigValidationError(InvalidArgumentError):
    exit_code = 3


class DivergenceError(FFLError, ArithmeticError):
    """Raised when the state becomes non-finite; ``step`` and ``index`` locate it."""

    exit_code = 4

    def __init__(self, message, step=None, index=None):
        super().__init__(message)
        self.step = step
        self.index = index


class DegenerateInputError(FFLError, ValueError):
    exit_code = 5


class NoResultError(FFLError):
    exit_code = 6

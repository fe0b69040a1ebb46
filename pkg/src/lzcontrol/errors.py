"""Exception types shared across the package.

Each error class carries a distinct ``exit_code`` so the command-line
front end can map failures to process status without string matching.
"""


class LZControlError(Exception):
    exit_code = 1
    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InvalidArgumentError(LZControlError, ValueError):
    exit_code = 2
    kind = "invalid-argument"


class ParseError(InvalidArgumentError):
    exit_code = 3
    kind = "parse-error"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

    def to_dict(self):
        out = super().to_dict()
        out["line"] = self.line
        return out


class GridMismatchError(ParseError):
    exit_code = 4
    kind = "grid-mismatch"


class UndefinedPhaseError(LZControlError, ArithmeticError):
    """|Tr(V^dag U)| vanished, so the global phase of the target is undefined."""

    exit_code = 5
    kind = "undefined-phase"


class CriticalPointError(LZControlError, ArithmeticError):
    """Constraint gradients are (numerically) linearly dependent."""

    exit_code = 6
    kind = "critical-point"


class NonConvergenceError(LZControlError, RuntimeError):
    """An iterative solver ran out of iterations; ``best`` holds its best iterate."""

    exit_code = 7
    kind = "non-convergence"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ArtifactIOError(LZControlError, OSError):
    """Reading or writing a file failed."""

    exit_code = 8
    kind = "io-error"

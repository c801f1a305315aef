"""Exception taxonomy.

Everything raised on purpose derives from QglError.  The CLI maps
VerificationError / OutOfDomainError / DecompositionError / IterationError
to exit code 1 (a check that ran and failed) and every other QglError to
exit code 2 (bad input).
"""

from __future__ import annotations


class QglError(Exception):
    """Base class for all deliberate failures."""


class ParseError(QglError):
    """A text input could not be parsed.

    Carries the 1-based line number and the path when known.
    """

    def __init__(self, msg: str, line: int | None = None, path: str | None = None):
        self.msg = msg
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {msg}" if where else msg)


class ValidationError(QglError):
    """Structurally well-formed input that violates a precondition."""


class VerificationError(QglError):
    """An internal cross-check that should hold for valid inputs failed."""


class LiftError(QglError):
    """The coefficient quiver admits no consistent grading (a bad cycle)."""


class DecompositionError(QglError):
    """Splitting search exhausted its budget with conflicting evidence."""


class IterationError(QglError):
    """Iterated covering failed to reach a tree within the step bound."""


class ReflectionError(QglError):
    """Reflection is not applicable (loops at the vertex, negative dims)."""


class ChartError(QglError):
    """No rational chart of the expected dimension could be built."""


class OutOfDomainError(QglError):
    """A chart was evaluated at a point outside its domain of definition.

    ``kind`` says which step failed: 'rank' (leaf map dropped rank),
    'pivot' (the frozen pivot complement degenerated) or 'unreflect'
    (the preimage at a reflected source had the wrong dimension).
    """

    def __init__(self, msg: str, kind: str):
        assert kind in ("rank", "pivot", "unreflect")
        self.kind = kind
        super().__init__(msg)

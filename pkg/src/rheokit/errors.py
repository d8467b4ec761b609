"""Exception types shared across the package."""


class RheokitError(Exception):
    """Base class for all package errors."""


class InvalidInputError(RheokitError, ValueError):
    """An argument violates a documented precondition or invariant."""


class OutOfRangeError(InvalidInputError):
    """An evaluation point lies outside the representable grid range."""


class UnsupportedModeError(InvalidInputError):
    """A closed-form mode was requested for parameters it does not cover."""


class NonConvergenceError(RheokitError, RuntimeError):
    """A bracketed solve or time step failed to converge.

    This indicates a broken invariant upstream (ill-posed composite,
    corrupted state), not a tolerance issue.
    """


class SchemaError(InvalidInputError):
    """A model document failed validation.

    ``path`` points at the offending field, e.g. ``children[1].potential.D``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)

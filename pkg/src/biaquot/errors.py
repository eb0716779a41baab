"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed caller input: unknown letters, mismatched alphabets, bad files."""


class PreconditionError(ValueError):
    """A stated operation precondition was violated."""


class StructuralError(RuntimeError):
    """The input breaks a structural guarantee the construction relies on."""


class ResourceError(RuntimeError):
    """A configured search or size cap was exceeded."""

    def __init__(self, message: str, cap: int | None = None):
        super().__init__(message)
        self.cap = cap

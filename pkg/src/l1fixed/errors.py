"""Exception types; the CLI maps each to an exit code."""


class L1FixedError(Exception):
    exit_code = 1


class InputError(L1FixedError, ValueError):
    """Malformed or dimensionally inconsistent input."""

    exit_code = 2


class PreconditionError(L1FixedError, ValueError):
    """Input is well formed but violates an operation's precondition."""

    exit_code = 3


class ResourceError(L1FixedError, RuntimeError):
    """A size or iteration cap was exceeded."""

    exit_code = 4

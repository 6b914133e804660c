"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: InputError -> 2, PreconditionError -> 3,
VerificationError -> 1.
"""


class WorkbenchError(Exception):
    pass


class InputError(WorkbenchError, ValueError):
    """Malformed input: unknown vertex, bad token, bad file."""


class PreconditionError(WorkbenchError, ValueError):
    """Input is well formed but violates an operation's precondition."""


class VerificationError(WorkbenchError):
    """A check that should hold by construction failed."""

"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries one.
"""


class StorageCodeError(Exception):
    exit_code = 1


class ArityError(StorageCodeError, ValueError):
    """Operands live in rings of different arity."""

    exit_code = 2


class ParameterError(StorageCodeError, ValueError):
    """Out-of-range family parameter or mask."""

    exit_code = 2


class ConventionError(StorageCodeError, ValueError):
    """Connection set violates the 0-in-S convention (or is empty)."""

    exit_code = 2


class ParseError(StorageCodeError, ValueError):
    exit_code = 2


class ResourceError(StorageCodeError, MemoryError):
    """Requested object exceeds a configured size ceiling."""

    exit_code = 4


class RepairError(StorageCodeError, ValueError):
    """Repair was requested on a word that is not a codeword."""

    exit_code = 1

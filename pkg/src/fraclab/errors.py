"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
PreconditionError -> 3, verification failures -> 4.
"""


class FraclabError(Exception):
    """Base class for all package errors."""


class ConfigError(FraclabError):
    """Malformed or out-of-domain input: bad spec files, bad parameters."""


class PreconditionError(FraclabError):
    """A numerically meaningful precondition was violated, e.g. a scale
    window reaching below the atomization scale of a discrete measure."""

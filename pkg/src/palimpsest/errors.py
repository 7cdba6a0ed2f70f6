"""Exception types shared across the package.

The CLI maps these onto exit codes: input errors -> 2, resource caps -> 3,
infeasible embeddings -> 4.
"""


class PalimpsestError(Exception):
    """Base class for all package errors."""


class InputError(PalimpsestError, ValueError):
    """Malformed or invalid user input (source files, parameters)."""


class ResourceError(PalimpsestError):
    """A configured size cap would be exceeded."""


class InfeasibleEmbedding(PalimpsestError):
    """No deletion set makes the guest graph embeddable in the host."""

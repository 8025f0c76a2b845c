"""Exception hierarchy for the scaletrack toolkit.

Every error raised on purpose by this package derives from ScaletrackError, so
callers can distinguish "the toolkit rejected or failed this" from a plain bug.
"""


class ScaletrackError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(ScaletrackError, ValueError):
    """A caller-supplied value violates a documented precondition."""


class ContractError(ScaletrackError):
    """A component broke an interface contract (e.g. a provider returned a
    tensor whose shape disagrees with its own descriptor)."""


class ProviderError(ScaletrackError):
    """A feature provider failed at runtime (unreachable process, protocol
    violation, crash).  Deliberately distinct from InvalidInputError so that
    'bad request' and 'backend down' can be told apart."""


class NumericalFailureError(ScaletrackError):
    """An iterative solver diverged.  Carries the last iterate so a caller can
    inspect or fall back to it."""

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegenerateResponseError(ScaletrackError):
    """A correlation response was unusable (all-zero or non-finite)."""


class IngestionError(ScaletrackError):
    """A dataset or sequence on disk could not be parsed."""

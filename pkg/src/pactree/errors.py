"""Exception hierarchy shared across the package."""


class PacTreeError(Exception):
    """Base class for all library errors."""


class DomainError(PacTreeError):
    """A value, parameter, or operation fell outside its allowed domain."""


class ConfigError(PacTreeError):
    """A feature-space or run configuration is invalid or incomplete."""


class TreeStructureError(PacTreeError):
    """A decision-tree invariant was violated (bad node map, not a leaf, ...)."""


class DocumentParseError(PacTreeError):
    """A serialized document could not be parsed; message names the first offender."""


class OracleError(PacTreeError):
    """Base class for membership-oracle failures.

    ``completed`` counts the queries answered before the failure.
    """

    def __init__(self, message: str, completed: int = 0):
        super().__init__(message)
        self.completed = completed


class TransportError(OracleError):
    """A remote oracle could not be reached or returned garbage; retryable."""


class MissingLabelError(OracleError):
    """A fixture oracle has no recorded label for the queried example."""


class TrainingSetError(OracleError):
    """Training-set construction aborted by an oracle failure."""

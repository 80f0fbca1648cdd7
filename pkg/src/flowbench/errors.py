"""Exception hierarchy shared across the package."""


class FlowbenchError(Exception):
    """Base class for all errors raised by this package."""


class InvalidProgramError(FlowbenchError):
    """A program failed validation where a valid one was required."""


class FragmentParseError(FlowbenchError):
    """A source fragment could not be parsed.

    Carries the character position of the failure so catalog loading can
    report line/column diagnostics.
    """

    def __init__(self, message: str, pos: int | None = None):
        super().__init__(message)
        self.pos = pos


class CatalogError(FlowbenchError):
    """Catalog violates its invariants (duplicate ids, kind mismatch, ...)."""


class CatalogParseError(CatalogError):
    """A catalog file could not be parsed; names the offending line/entry."""

    def __init__(self, message: str, line: int | None = None, entry_id: str | None = None):
        super().__init__(message)
        self.line = line
        self.entry_id = entry_id


class InstantiationError(FlowbenchError):
    """A template binding is missing a hole or binds an incompatible entry."""


class GenerationError(FlowbenchError):
    """Dataset generation failed (uncoverable hole, termination failure, ...)."""


class FuelExhaustedError(FlowbenchError):
    """The interpreter ran out of fuel before the program returned."""


class InputBindingError(FlowbenchError):
    """Execution inputs do not bind every program parameter."""


class PromptError(FlowbenchError):
    """Prompt assembly failed (missing marker, empty instruction, ...)."""


class MetricsError(FlowbenchError):
    """A metric was requested on inputs outside its domain."""


class PipelineError(FlowbenchError):
    """A pipeline stage received inconsistent or missing inputs."""


class ProviderError(FlowbenchError):
    """Base class for completion-provider failures (CLI exit code 3)."""


class TransportError(ProviderError):
    """Request failed after exhausting retries, or a non-retryable HTTP error."""


class CredentialError(ProviderError):
    """Authentication failed or no API key is configured; never retried."""


class ReplayMissError(ProviderError):
    """The replay store has no recording for the requested prompt."""


class PersistenceError(ProviderError):
    """A replay store could not be written."""

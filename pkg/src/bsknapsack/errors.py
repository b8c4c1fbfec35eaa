"""Shared exception types."""


class AlphabetMismatchError(ValueError):
    """Two automata with different q or different track layout were combined."""


class TrackLimitError(RuntimeError):
    """A construction would exceed the configured track cap."""


class StateLimitError(RuntimeError):
    """A construction would exceed the configured state cap."""


class InternalSolverError(RuntimeError):
    """A recovered witness failed re-verification; indicates a solver bug."""

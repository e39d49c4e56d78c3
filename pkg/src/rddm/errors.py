"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PipelineError, ValueError):
    """An argument violates a documented precondition."""


class AlignmentError(PipelineError):
    """Paired signals do not cover the same time span."""


class InsufficientDataError(PipelineError):
    """Signal too short for the requested analysis."""


class UndetectableRhythmError(PipelineError):
    """Fewer than two R-peaks found; heart rate is undefined."""


class NoValidWindowsError(PipelineError):
    """Every window in a batch was skipped."""


class NumericError(PipelineError):
    """A non-finite value appeared during computation."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class CheckpointError(PipelineError):
    """Checkpoint file is malformed or incompatible with the requested config."""


class ConfigError(PipelineError):
    """Run configuration failed validation. Message names the offending field."""

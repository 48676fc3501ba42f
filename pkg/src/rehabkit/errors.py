"""Exception hierarchy shared by all engine modules."""


class RehabkitError(Exception):
    """Base class for all engine errors."""


class ValidationError(RehabkitError):
    """A record or argument violates a documented invariant."""


class ManifestError(ValidationError):
    """Session-manifest parsing or validation failure."""


class StreamError(ValidationError):
    """Prediction-stream parsing or validation failure."""


class EvaluationError(ValidationError):
    """Metric or split computation failure (missing truth, unknown subject, ...)."""

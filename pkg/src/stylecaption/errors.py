"""Exception types shared across the package."""


class StyleCaptionError(Exception):
    """Base class for all package errors."""


class ManifestError(StyleCaptionError):
    """A manifest file could not be parsed or violates an invariant."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateIdError(ManifestError):
    pass


class TooFewSpeakersError(StyleCaptionError):
    pass


class FeatureIOError(StyleCaptionError):
    """A feature container is unreadable or its shape header is inconsistent."""


class ConfigError(StyleCaptionError):
    """A run configuration failed schema validation."""


class TrainingDivergedError(StyleCaptionError):
    """Training produced a non-finite loss."""


class ScorerError(StyleCaptionError):
    """An external similarity scorer failed."""

    def __init__(self, message: str, candidate_index: int | None = None):
        if candidate_index is not None:
            message = f"candidate {candidate_index}: {message}"
        super().__init__(message)
        self.candidate_index = candidate_index


class ClientError(StyleCaptionError):
    """A rephrasing client call failed."""


class UndefinedMetricError(StyleCaptionError):
    """Metric input is degenerate (e.g. no caption long enough for an n-gram)."""

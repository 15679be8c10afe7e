"""Exception types shared across the pipeline."""


class GridSenseError(Exception):
    """Base class for all gridsense errors."""


class SchemaError(GridSenseError):
    """A required column or field is missing or malformed."""


class IngestError(GridSenseError):
    """Raw data violates an ingestion contract (NaN, non-monotonic time)."""


class FeatureError(GridSenseError):
    """A feature extractor precondition failed; names feature and channel."""


class ConfigError(GridSenseError):
    """Pipeline configuration is invalid."""


class ModelFormatError(GridSenseError):
    """A serialized model payload cannot be decoded."""


class StageError(GridSenseError):
    """A pipeline stage is missing an upstream artifact."""

    def __init__(self, message, missing_path=None):
        super().__init__(message)
        self.missing_path = missing_path

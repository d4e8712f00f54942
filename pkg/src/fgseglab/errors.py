"""Exception types shared across the package."""


class FgSegLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(FgSegLabError):
    """A model or schedule configuration violates an invariant."""


class DimensionError(FgSegLabError):
    """Array shapes do not match what an operation expects."""


class EvaluationError(FgSegLabError):
    """A metric cannot be computed (e.g. empty evaluation set)."""


class ScanError(FgSegLabError):
    """A dataset directory does not match the expected layout."""


class DataError(FgSegLabError):
    """A data file is readable but its content is invalid."""


class WeightLoadError(FgSegLabError):
    """A pretrained weight bundle does not fit the model."""


class CheckpointError(FgSegLabError):
    """A checkpoint is corrupt or has an unsupported format version."""


class GridParseError(FgSegLabError):
    """An experiment grid document is malformed."""


class TrainingDivergedError(FgSegLabError):
    """Training produced a non-finite loss."""

    def __init__(self, message, epoch=None, batch=None, lr=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.lr = lr

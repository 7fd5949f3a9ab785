"""Exception hierarchy shared across the package."""


class NeedminerError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(NeedminerError):
    """Unusable corpus input: unreadable file, bad schema, broken invariant."""


class PipelineError(NeedminerError):
    """Invalid preprocessing configuration or lexical resource."""


class SamplingError(NeedminerError):
    """Rebalancing cannot be applied to the given training data."""


class TrainingError(NeedminerError):
    """Classifier cannot be trained on the given data."""


class ModelFormatError(NeedminerError):
    """Model file is corrupt, truncated or has an unsupported version."""


class EvaluationError(NeedminerError):
    """Evaluation preconditions violated (fold counts, class presence...)."""


class ServiceError(NeedminerError):
    """Ingestion/orchestration/API failure."""


class ConfigError(NeedminerError):
    """Bad service or CLI configuration."""

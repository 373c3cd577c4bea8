"""Exception hierarchy with process exit codes.

Exit codes: 2 configuration, 3 protocol violation, 4 numerical, 5 I/O or
file-format. Anything else that escapes is a plain crash (1).
"""


class HarnessError(Exception):
    exit_code = 1


class ConfigurationError(HarnessError):
    """Invalid configuration or invalid inputs to an operation."""

    exit_code = 2


class ProtocolViolationError(HarnessError):
    """The incremental-learning contract was broken (frozen weights touched,
    revoked step data accessed, classifier restricted to unknown classes)."""

    exit_code = 3


class NumericalError(HarnessError):
    """A numerical procedure failed beyond its documented repair policy."""

    exit_code = 4


class DataFormatError(HarnessError):
    """A file could not be read or written, or violates its format."""

    exit_code = 5


class ShapeError(ConfigurationError):
    pass


class TrainingError(ConfigurationError):
    pass


class EvaluationError(ConfigurationError):
    pass


class MetricError(ConfigurationError):
    pass


class PromptError(ConfigurationError):
    pass


class CompositionError(ConfigurationError):
    pass


class MatrixError(ConfigurationError):
    pass


class StatisticsError(NumericalError):
    pass


class FrozenExtractorError(ProtocolViolationError):
    pass


class StepDataRevokedError(ProtocolViolationError):
    pass


class BadMagicError(DataFormatError):
    pass


class BadVersionError(DataFormatError):
    pass


class PayloadLengthError(DataFormatError):
    pass


class MetadataCountError(DataFormatError):
    pass

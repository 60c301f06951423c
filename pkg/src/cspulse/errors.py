"""Exception types shared across the pipeline stages."""


class CSPulseError(Exception):
    """Base class for all library errors."""


class DimensionError(CSPulseError, ValueError):
    """Operands live on different numbers of qubits (or wrong vector sizes)."""


class OracleSizeError(CSPulseError, ValueError):
    """A dense operation was requested above the configured qubit limit."""


class NormalizationError(CSPulseError, ValueError):
    """A state vector is not normalized."""


class ParseError(CSPulseError, ValueError):
    """An input file could not be parsed."""


class RankError(CSPulseError, ValueError):
    """A set of Pauli operators that must be independent is not."""


class PreconditionError(CSPulseError, ValueError):
    """An operation was called on input violating its documented precondition."""


class InfeasibleTargetError(CSPulseError, ValueError):
    """A requested qubit count cannot be reached with the available stabilizers."""


class EnumerationLimitError(CSPulseError, ValueError):
    """An exhaustive search would exceed its configured size limit."""


class StageError(CSPulseError, RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")

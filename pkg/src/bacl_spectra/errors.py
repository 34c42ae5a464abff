"""
Exception hierarchy for bacl_spectra

Every error carries a human readable message and optional details, and can be
turned into a machine-readable record for the command line interface.
"""

from typing import Any, Dict


class BaclError(Exception):
    """
    Base class for all library errors

    Args:
        message (str): Human readable description
        **details: Extra JSON-serializable context (sizes, gaps, limits)
    """

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_record(self) -> Dict[str, Any]:
        """
        Build the machine-readable error record printed by the CLI

        Returns:
            dict: ``{"error": <class name>, "message": ..., **details}``
        """
        record: Dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        for key, value in self.details.items():
            record[key] = _jsonable(value)
        return record


class ParameterError(BaclError, ValueError):
    """Invalid argument value"""


class DimensionError(ParameterError):
    """Vector length does not match the operand"""


class DomainError(ParameterError):
    """Argument outside the support of a law, or non-positive log input"""


class ContractError(ParameterError):
    """Input vector violates a stated contract (e.g. not unit norm)"""


class CapacityError(BaclError):
    """Problem size above a configured limit"""


class DegeneracyError(BaclError):
    """Degenerate input: repeated top eigenvalue, zero variance, no signal"""


class NonConvergenceError(BaclError):
    """
    Iterative procedure hit its round cap

    Attributes:
        partial: The partial result computed before giving up
    """

    def __init__(self, message: str, partial: Any = None, **details: Any):
        super().__init__(message, **details)
        self.partial = partial


class ConfigError(BaclError, ValueError):
    """Invalid experiment or CLI configuration"""


def _jsonable(value: Any) -> Any:
    # numpy scalars and arrays show up in details
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value

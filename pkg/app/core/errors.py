"""
Exception hierarchy.

Every error carries a stable ``code`` so the CLI can render and map it to an
exit status without inspecting messages.
"""
from typing import Optional


class HpgError(Exception):
    """Base class for all library errors."""

    code = "error"
    exit_status = 1

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location:
            return f"{self.code}: {self.message} (at {self.location})"
        return f"{self.code}: {self.message}"


# Field and polynomial errors
class FieldMismatchError(HpgError):
    code = "field-mismatch"


class DivisionByZeroError(HpgError, ZeroDivisionError):
    code = "division-by-zero"


class PoleAtSampleError(HpgError):
    code = "pole-at-sample"


class SingularMoebiusError(HpgError):
    code = "singular-moebius"


# Series errors
class InvalidParameterError(HpgError):
    code = "invalid-parameter"


class SeriesError(HpgError):
    code = "series-error"


# Ramification / classification errors
class ConstantMapError(HpgError):
    code = "constant-map"


class PatternParseError(HpgError):
    code = "parse-error"
    exit_status = 2

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(message, location=f"position {position}")
        self.position = position
        self.text = text


class DegreeTooLargeError(HpgError):
    code = "degree-too-large"


# Pull-back errors
class IrregularSingularPointError(HpgError):
    code = "irregular-singular-point"


class IrrationalIndicialRootsError(HpgError):
    code = "irrational-indicial-roots"


class RecognitionError(HpgError):
    code = "more-than-three-relevant-points"


# Family errors
class HypothesisViolationError(HpgError):
    code = "hypothesis-violation"


class LogarithmicCaseError(HpgError):
    code = "logarithmic-case-rejected"


class ParityViolationError(HpgError):
    code = "parity-violation"


# Catalog / verification errors
class CatalogSchemaError(HpgError):
    code = "schema-violation"
    exit_status = 2

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        location = None
        if line is not None:
            location = f"{path or '<catalog>'}:{line}"
        super().__init__(message, location=location)
        self.line = line


class CoefficientMismatchError(HpgError):
    code = "coefficient-mismatch"

    def __init__(self, message: str, index: int):
        super().__init__(message, location=f"coefficient {index}")
        self.index = index


class PatternMismatchError(HpgError):
    code = "pattern-mismatch"

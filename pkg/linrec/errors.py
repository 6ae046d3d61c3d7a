"""Exception hierarchy and the structured diagnostic every failure can render to."""

from typing import Any

from pydantic import BaseModel


class Diagnostic(BaseModel):
    code: str
    location: str = ""
    explanation: str


class LinrecError(Exception):
    code = "error"

    def __init__(self, explanation: str, location: str = ""):
        super().__init__(explanation)
        self.explanation = explanation
        self.location = location

    def diagnostic(self) -> Diagnostic:
        return Diagnostic(code=self.code, location=self.location, explanation=self.explanation)


class ParseError(LinrecError):
    code = "ParseError"

    def __init__(self, explanation: str, line: int = 0, column: int = 0):
        super().__init__(explanation, f"{line}:{column}" if line else "")
        self.line = line
        self.column = column


class DecodeError(LinrecError):
    code = "DecodeError"


# ---- typing ----


class TypeCheckError(LinrecError):
    code = "TypeCheckError"


class TypeMismatch(TypeCheckError):
    code = "TypeMismatch"


class ContractionNotAllowed(TypeCheckError):
    code = "ContractionNotAllowed"

    def __init__(self, variable: str, type_text: str, location: str = ""):
        super().__init__(
            f"variable {variable!r} is used more than once at {type_text}, "
            "which is outside the contraction class",
            location,
        )
        self.variable = variable
        self.type_text = type_text


class RamificationViolation(TypeCheckError):
    code = "RamificationViolation"

    def __init__(self, tier: int, level: int, location: str = ""):
        super().__init__(
            f"recursion argument tier {tier} must exceed the result level {level}", location
        )
        self.tier = tier
        self.level = level


class RecursionContextViolation(TypeCheckError):
    code = "RecursionContextViolation"


class UnboundVariable(TypeCheckError):
    code = "UnboundVariable"


class BranchArityMismatch(TypeCheckError):
    code = "BranchArityMismatch"


class AmbiguousTier(TypeCheckError):
    code = "AmbiguousTier"


# ---- runtime / analysis ----


class FuelExhausted(LinrecError):
    code = "FuelExhausted"

    def __init__(self, explanation: str, stats: Any = None, term: Any = None):
        super().__init__(explanation)
        self.stats = stats
        self.term = term


class ResourceLimit(LinrecError):
    code = "ResourceLimit"

    def __init__(self, explanation: str, bits: int = 0):
        super().__init__(explanation)
        self.bits = bits


class DecompositionMismatch(LinrecError):
    code = "DecompositionMismatch"


class WrongLabel(LinrecError):
    code = "WrongLabel"


class NonStandardDerivation(LinrecError):
    code = "NonStandardDerivation"


class InvariantViolation(LinrecError):
    code = "InvariantViolation"

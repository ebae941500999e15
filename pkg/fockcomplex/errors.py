"""
Exception hierarchy for fockcomplex.
Library code raises these; core.py and run.py map them to exit statuses.
"""

from typing import List, Optional


class FockError(Exception):
    """Base class for all fockcomplex errors"""


class DimensionMismatchError(FockError, ValueError):
    """Operands live in different ambient dimensions"""

    def __init__(self, left: int, right: int, what: str = "operands"):
        super().__init__(f"dimension mismatch between {what}: {left} != {right}")
        self.left = left
        self.right = right


class DegreeError(FockError, ValueError):
    """Form degree outside the range an operation accepts"""


class NotClosedError(FockError):
    """Right-hand side of a canonical solve is not in the kernel of the operator"""

    def __init__(self, message: str, residual=None, residual_norm: Optional[float] = None):
        super().__init__(message)
        self.residual = residual
        self.residual_norm = residual_norm


class NonConstantCoefficientError(FockError, ValueError):
    """Operator has a multiplication part where only derivatives are allowed"""


class WeylSyntaxError(FockError, ValueError):
    """Operator expression does not conform to the grammar"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class WeightSpecError(FockError, ValueError):
    """Weight specification could not be parsed or is invalid"""


class NonPositiveCertificateError(FockError):
    """Commutator form is not positive on the truncated space"""

    def __init__(self, lambda_min: float):
        super().__init__(f"commutator form not positive definite (lambda_min={lambda_min:.6g})")
        self.lambda_min = lambda_min


class NonConvergenceError(FockError):
    """Galerkin residual did not decrease as required when the window grew"""

    def __init__(self, message: str, history: List[float]):
        super().__init__(message)
        self.history = history


class ConfigError(FockError, ValueError):
    """Invalid run configuration; names the offending field"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field

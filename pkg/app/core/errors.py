"""
Error hierarchy

Every failure the toolkit raises on purpose derives from RuminToolkitError and
carries the process exit code the CLI maps it to:
0 success, 1 check or solver failure, 2 input error.
"""
from typing import Any, List, Optional, Sequence, Tuple


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


class RuminToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = EXIT_CHECK_FAILED

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# ==================== Input errors (exit 2) ====================

class InputError(RuminToolkitError):
    exit_code = EXIT_INPUT_ERROR


class AlgebraInputError(InputError):
    """Structurally malformed algebra data (index ranges, layer dims)"""


class UnknownAlgebraError(InputError):
    pass


class SchemaError(InputError):
    """An input document failed schema validation"""


class ParameterError(InputError):
    """A numeric argument is outside its admissible range"""


class DilationError(ParameterError):
    """Dilation factor t <= 0"""


class GridError(InputError):
    pass


class GridTooSmallError(GridError):
    """The grid has no interior points for the widest stencil"""


class MarginError(GridError):
    """Current support (or form region) too close to the grid edge"""

    def __init__(self, message: str, offending: Sequence[Tuple[int, ...]] = ()):
        super().__init__(message)
        self.offending: List[Tuple[int, ...]] = list(offending)


class CurrentError(InputError):
    pass


class OperatorShapeError(InputError):
    pass


class LpInputError(InputError):
    """Inconsistent linear program data (shapes, senses, bounds)"""


class CurveError(InputError):
    """Curve is not closed, or the form is not polynomial"""


class ProbeBudgetError(InputError):
    pass


# ==================== Check failures (exit 1) ====================

class AlgebraValidationError(RuminToolkitError):
    """An algebra failed one of the stratified Lie algebra axioms"""

    def __init__(self, message: str, report: Any):
        super().__init__(message)
        self.report = report


class VerificationError(RuminToolkitError):
    """A Rumin complex failed one of its structural checks"""

    def __init__(self, message: str, report: Any):
        super().__init__(message)
        self.report = report


# ==================== Numerical / solver failures (exit 1) ====================

class LpSolverError(RuminToolkitError):
    pass


class LpStatusError(RuminToolkitError):
    """A quantity that needs an optimal solution was asked of a non-optimal one"""


class ProjectionIterationError(RuminToolkitError):
    pass


class HomotopyError(RuminToolkitError):
    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class CCDistanceError(RuminToolkitError):
    pass

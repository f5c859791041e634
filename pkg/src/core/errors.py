from typing import List, Optional


class LabError(Exception):
    """Base class for every error raised by the lab."""


class ParameterError(LabError, ValueError):
    """A parameter violates the validity window of an operation."""


class RegimeError(LabError):
    """The requested object does not exist in the current (k, p) regime."""


class SingularityError(LabError):
    """Evaluation requested at a singular point of a kernel or potential."""


class PotentialDivergenceError(LabError):
    """A potential or kernel integral is infinite for the given data."""


class QuadratureError(LabError):
    """Quadrature failed (NaN integrand or strict non-convergence)."""


class TailConsistencyError(LabError):
    """An analytically propagated tail law disagrees with computed grid values."""


class BracketError(LabError):
    """A bisection bracket does not straddle the convergence threshold."""

    def __init__(self, message: str, verdicts: Optional[dict] = None):
        super().__init__(message)
        self.verdicts = verdicts or {}


class ConfigError(LabError):
    """Experiment configuration is invalid; carries every issue found."""

    def __init__(self, issues: List[str]):
        self.issues = list(issues)
        super().__init__('; '.join(self.issues) or 'invalid configuration')

"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured diagnostics and scripts can branch on failure modes.
"""


class SteplikeError(Exception):
    code = "error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class SmoothnessError(SteplikeError):
    """Derivative order exceeds what the potential representation supports."""

    code = "insufficient-smoothness"


class MomentError(SteplikeError):
    """A truncated moment integral fails to converge under window doubling."""

    code = "moment-condition-violated"


class WindowError(SteplikeError):
    """Truncation window too small for a requested quadrature."""

    code = "window-too-small"


class IntegrationError(SteplikeError):
    """ODE integration blew up; usually a window misconfiguration."""

    code = "integration-overflow"


class WronskianZeroError(SteplikeError):
    """Wronskian vanished off the discrete spectrum (numerical failure)."""

    code = "spurious-wronskian-zero"


class SearchError(SteplikeError):
    """Eigenvalue scan disagrees with the oscillation-count oracle."""

    code = "eigenvalue-search-incomplete"


class EigenpairError(SteplikeError):
    """Residue identity violated for a computed eigenpair."""

    code = "inconsistent-eigenpair"


class EdgeFitError(SteplikeError):
    """Wronskian near the spectral edge is not of square-root type."""

    code = "edge-not-sqrt-type"


class TailFitError(SteplikeError):
    """Reflection-coefficient tail fit residual too large."""

    code = "insufficient-kmax"


class NearSingularError(SteplikeError):
    """Discretized Marchenko operator is numerically near-singular."""

    code = "glm-near-singular"


class DataError(SteplikeError):
    """Malformed or inconsistent input data."""

    code = "invalid-data"

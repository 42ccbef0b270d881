"""Exception types shared across the package.

Every error raised on purpose derives from :class:`OpaChainError`, so callers
(and the CLI) can separate domain/validation failures from genuine I/O
problems.
"""


class OpaChainError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OpaChainError):
    """An argument violates a documented precondition or physical invariant."""


class SingularCorrectionError(OpaChainError):
    """Finite-gain correction requested at gain <= 1, where it is singular."""


class UnphysicalInputError(OpaChainError):
    """Measured levels are mutually inconsistent (corrected variance <= 0)."""


class InsufficientRipplesError(OpaChainError):
    """Too few spectral extrema to constrain a dispersion estimate."""


class DesignError(OpaChainError):
    """Compensating-fiber design is impossible with the given parameters."""


class InconsistentEfficiencyError(OpaChainError):
    """A loss-chain split yields an efficiency above unity."""


class FitNotConvergedError(OpaChainError):
    """Least-squares fit did not reach the step tolerance.

    Carries diagnostics from the last iteration.
    """

    def __init__(self, message, iterations=None, objective=None, damping=None,
                 params=None):
        super().__init__(message)
        self.iterations = iterations
        self.objective = objective
        self.damping = damping
        self.params = params


class ConfigError(OpaChainError):
    """Scenario-config text failed to parse or validate.

    ``line`` is the 1-based line number of the offending entry, when known.
    """

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class TraceFormatError(OpaChainError):
    """A spectrum-trace CSV file is malformed.

    ``row`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row

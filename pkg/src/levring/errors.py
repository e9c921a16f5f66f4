"""Exception hierarchy.

Two families matter for the CLI exit code: configuration problems
(exit 1) and numerical failures (exit 2).  I/O errors are plain OSError
(exit 3).
"""


class LevringError(Exception):
    """Base class for all package errors."""


class ConfigError(LevringError):
    """Configuration family: bad input files or invalid parameter sets."""


class ParseError(ConfigError):
    """Malformed config file; message carries the line number(s)."""


class ValidationError(ConfigError):
    """Config parsed but violates a documented requirement."""


class ConfigInvalid(ConfigError):
    """A SystemConfig invariant is violated; names the offending field."""


class NumericalError(LevringError):
    """Numerical family: solver or model failures on valid configs."""


class NonPositiveFrequency(NumericalError):
    """Mechanical frequency must be strictly positive."""


class NoRootInInterval(NumericalError):
    """The force-balance equation has no sign change in the trap interval."""


class AllRootsUnstable(NumericalError):
    """Roots exist but none yields a Hurwitz drift matrix."""


class UnstableTrap(NumericalError):
    """cos(2 k x_s) < 0: the optical trap curvature is negative."""


class NoResonantSolution(NumericalError):
    """The resonance-matching system has no admissible root."""


class UnstableResonance(NumericalError):
    """Resonant operating point found but the drift matrix is not Hurwitz."""


class NotConverged(NumericalError):
    """Time integration did not settle before t_max."""


class NonFiniteResult(NumericalError):
    """A transfer denominator underflowed (instability boundary)."""


class UnstableModel(NumericalError):
    """No stationary state: drift matrix is not Hurwitz."""


class SingularSystem(NumericalError):
    """The Lyapunov linear system degenerated (marginal stability)."""


class UnphysicalCovariance(NumericalError):
    """Covariance matrix violates the symplectic positivity requirement."""


class IterationDiverged(NumericalError):
    """Root iteration failed to converge within its iteration cap."""

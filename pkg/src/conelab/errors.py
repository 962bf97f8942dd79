"""Exception hierarchy for the conelab package.

Every failure mode that a caller is expected to branch on gets its own
class.  ``ConelabError`` is the common base; the CLI maps subclasses to
exit codes (config -> 2, solver -> 3, anything else -> 1).
"""


class ConelabError(Exception):
    """Base class for all conelab-specific errors."""


class ConfigError(ConelabError):
    """Malformed or inconsistent configuration input."""


class InvariantViolation(ConelabError):
    """A structural invariant failed a runtime check."""


# --- geometry / model ---------------------------------------------------

class NonPositiveDensity(ConelabError):
    """The volume density G (or H) is not strictly positive."""


class NonPositiveDefinite(ConelabError):
    """The metric coefficient block is not positive definite at a node."""


class TooManyCritical(ConelabError):
    """More critical points of the angular potential than the cap allows."""


class GridTooCoarse(ConelabError):
    """Grid spacing cannot resolve the configured energy window."""


class GridMismatch(ConelabError):
    """Cone and tube grids do not share radial nodes / angular count."""


class InvalidLambda(ConelabError):
    """Conjugate-operator scale parameter must be a positive finite float."""


# --- solvers ------------------------------------------------------------

class SolverError(ConelabError):
    """Base class for numerical solver failures."""


class NotConverged(SolverError):
    """Iterative eigensolver or power iteration failed to converge."""


class NearSingular(SolverError):
    """Resolvent requested at a point too close to the spectrum."""


class SolverDiverged(SolverError):
    """Time stepping produced NaN or a norm explosion."""


# --- spectral / window --------------------------------------------------

class WindowTooWide(ConelabError):
    """Energy window contains more eigenvalues than the configured cap."""


class WindowNotClean(ConelabError):
    """Energy window intersects the fattened exclusion set."""


class DenseCapExceeded(ConelabError):
    """Dense-path operation requested above the dense dimension cap."""


class OutOfWindow(ConelabError):
    """Wave packet has too little spectral mass inside the target window."""


class WindowTooShort(ConelabError):
    """Clean time window spans less than the required range."""


# --- mourre -------------------------------------------------------------

class EmptyFarSpace(ConelabError):
    """No numerically well-conditioned filtered states away from the core."""


class DegeneratePartition(ConelabError):
    """Angular partition of unity cannot be resolved on this grid."""

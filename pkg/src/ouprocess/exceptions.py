"""Exception hierarchy for the ouprocess package."""


class OUProcessError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "OU_ERROR"


class StationarityViolation(OUProcessError):
    """A parameter vector maps to a root with non-positive real part."""

    code = "STATIONARITY_VIOLATION"


class DegenerateRoots(OUProcessError):
    """Two roots coincide where pairwise-distinct roots are required."""

    code = "DEGENERATE_ROOTS"


class NotPositiveDefinite(OUProcessError):
    """A covariance matrix failed to factorize even after jitter escalation."""

    code = "NOT_POSITIVE_DEFINITE"


class NoAdmissibleStart(OUProcessError):
    """No admissible starting point could be found for an optimization."""

    code = "NO_ADMISSIBLE_START"


class QuadratureNonConvergence(OUProcessError):
    """The covariance quadrature oracle did not reach its tolerance."""

    code = "QUADRATURE_NON_CONVERGENCE"


class AdmissibilityViolation(OUProcessError):
    """Autocorrelations outside the admissible AR(2) region."""

    code = "ADMISSIBILITY_VIOLATION"


class SingularSystem(OUProcessError):
    """A linear system (e.g. Yule-Walker) is singular."""

    code = "SINGULAR_SYSTEM"


class ParseError(OUProcessError):
    """A CSV input file could not be parsed."""

    code = "PARSE_ERROR"

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class IrregularSpacing(OUProcessError):
    """Timestamps in a two-column CSV are not equally spaced."""

    code = "IRREGULAR_SPACING"

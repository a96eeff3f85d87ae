"""Exception types raised across the package."""


class ConesmithError(Exception):
    """Base class for all package errors."""


class NoSolution(ConesmithError):
    """A linear system ``A x = b`` has no rational solution.

    ``certificate`` is a rational row vector ``y`` with ``y A = 0`` and
    ``y b != 0``.
    """

    def __init__(self, certificate, value):
        super().__init__("inconsistent linear system")
        self.certificate = tuple(certificate)
        self.value = value


class NotSymmetric(ConesmithError):
    pass


class DegenerateLattice(ConesmithError):
    pass


class NotIntegral(ConesmithError):
    """A reflection formula does not yield an integral matrix."""


class NotInStabilizer(ConesmithError):
    """An isometry does not map the isotropic line to itself."""


class LiftNotFound(ConesmithError):
    """No lift was found within the search bound (not a non-existence proof)."""


class NoPartner(ConesmithError):
    """No vector pairs to 1 with the given isotropic vector."""

    def __init__(self, message, divisibility):
        super().__init__(message)
        self.divisibility = divisibility


class NonPointedCone(ConesmithError):
    pass


class InvalidFan(ConesmithError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class CertificateFailure(ConesmithError):
    """The enumeration bound was too small to certify a perfect facet."""

    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate


class NonUnimodular(ConesmithError):
    pass


class GroupTooLarge(ConesmithError):
    pass


class GroupDoesNotAct(ConesmithError):
    pass


class InternalInconsistency(ConesmithError):
    """Two independent computations that must agree did not."""

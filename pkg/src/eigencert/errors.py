"""Exception hierarchy shared by all eigencert modules."""


class EigenCertError(Exception):
    """Base class for every error raised by eigencert."""


class InputError(EigenCertError):
    """Malformed or out-of-range input (bad matrix file, non-square data...)."""


class SingularSystem(EigenCertError):
    pass


class NoConvergence(EigenCertError):
    pass


class ZeroEigenvalue(EigenCertError):
    pass


class TrackingLost(EigenCertError):
    pass


class HypothesisError(EigenCertError):
    """A certificate hypothesis is not met; the CLI maps these to exit code 2."""


class NotSimple(HypothesisError):
    pass


class DegeneratePairing(HypothesisError):
    pass


class BadOverride(HypothesisError):
    pass


class BadK(HypothesisError):
    pass


class OutOfRadius(HypothesisError):
    pass


class BadDelta(HypothesisError):
    pass


class HypothesisFailed(HypothesisError):
    pass


class RegimeMismatch(HypothesisError):
    pass


class ZeroC(HypothesisError):
    pass

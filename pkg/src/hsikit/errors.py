"""Exception hierarchy.  Every domain failure derives from HSIError so the CLI
can map it to exit status 1."""


class HSIError(Exception):
    pass


class SingularLog(HSIError):
    pass


class UnknownGenerator(HSIError):
    pass


class InvalidGenus(HSIError):
    pass


class UnsupportedCurve(HSIError):
    pass


class InvalidPoint(HSIError):
    """A moduli point violates its defining relation or a norm bound."""


class MomentNotZero(HSIError):
    pass


class OnComplementC(HSIError):
    """The point lies on C- = {B~ = -I}, which the reduction does not reach."""


class ZeroSection(HSIError):
    pass


class NoSolution(HSIError):
    pass


class UnsupportedShape(HSIError):
    pass


class GenusMismatch(HSIError):
    pass


class NotComposable(HSIError):
    pass


class InvalidParams(HSIError):
    pass


class PatternMismatch(HSIError):
    pass


class UnsupportedFamily(HSIError):
    pass


class AdditivityFails(HSIError):
    pass


class NotATree(HSIError):
    pass

"""Exception hierarchy shared by all aimwell modules."""


class AimError(Exception):
    """Base class for every error raised by aimwell."""


class CenterMismatchError(AimError, ValueError):
    """Two jets expanded about different points were combined."""


class InsufficientOrderError(AimError, ValueError):
    """A jet does not carry enough Taylor coefficients for the operation."""


class SingularExpansionError(AimError, ZeroDivisionError):
    """Division by a jet whose constant term vanishes (expansion at a pole)."""


class InvalidEvaluationPointError(AimError, ValueError):
    """The AIM evaluation point cannot be used (e.g. lambda_0 vanishes identically)."""


class OrderExhaustedError(AimError, ValueError):
    """The recursion was asked for more iterations than the jets can support."""


class PrecisionExhaustedError(AimError, ArithmeticError):
    """The quantization function is indistinguishable from rounding noise."""


class DomainError(AimError, ValueError):
    """A coordinate lies outside the open interval where it is defined."""


class WavefunctionUnavailableError(AimError, RuntimeError):
    """The wavefunction cannot be assembled for the requested state."""

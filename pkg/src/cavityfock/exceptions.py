"""Exception types raised across the package."""


class CavityFockError(Exception):
    """Base class for all package errors."""


class CutoffError(CavityFockError, ValueError):
    """A photon number does not fit inside the Fock cutoff."""


class DomainError(CavityFockError, ValueError):
    """A parameter lies outside its physical range."""


class NonPhysicalGainError(DomainError):
    """Parametric gain at or above 1."""


class DivergenceError(CavityFockError, ArithmeticError):
    """Cavity with sqrt(R_i * R_m) == 1 has no finite build-up."""


class TruncationError(CavityFockError, ArithmeticError):
    """Trace lost to the Fock cutoff is too large to renormalize away."""


class ImpossibleHeraldError(CavityFockError, ArithmeticError):
    """The requested click pattern has zero probability."""


class UnsupportedStateError(CavityFockError, ValueError):
    """The operation needs a diagonal (phase-symmetric) state."""


class NumericalSupportError(CavityFockError, ArithmeticError):
    """A measurement record has vanishing probability under the current estimate."""

    def __init__(self, index: int, prob: float):
        self.index = index
        self.prob = prob
        super().__init__(f"record {index} has probability {prob:.3g} under the current estimate")


class ConfigError(CavityFockError, ValueError):
    """Invalid configuration or malformed input file."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)

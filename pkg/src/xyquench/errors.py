class XYQuenchError(Exception):
    """Base class for library errors."""


class ConvergenceFailure(XYQuenchError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NotPositive(XYQuenchError):
    """A constructed density matrix has a clearly negative eigenvalue."""


class InvalidSpectrum(XYQuenchError):
    """Entropy requested for a spectrum with a clearly negative eigenvalue."""


class OptimizerFailure(XYQuenchError):
    """Measurement-basis refinement did not converge within its budget."""


class UnstableDerivative(XYQuenchError):
    """Finite-difference slope failed its Richardson consistency check."""

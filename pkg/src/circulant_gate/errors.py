"""Exception hierarchy shared by the simulator modules."""


class CirculantGateError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianError(CirculantGateError):
    """An operator expected to be Hermitian is not, beyond tolerance."""


class NonUnitaryError(CirculantGateError):
    """A matrix expected to be unitary is not, beyond tolerance."""


class DegeneracyError(CirculantGateError):
    """Eigenvalue collision that invalidates branch labeling or tracking.

    ``pair`` names the colliding branches when known; ``time`` is the
    schedule time at which the collision was detected.
    """

    def __init__(self, message, pair=None, time=None):
        super().__init__(message)
        self.pair = pair
        self.time = time


class ConvergenceError(CirculantGateError):
    """An iterative procedure hit its ceiling before reaching tolerance.

    ``residual`` carries the last residual for diagnostics.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResonanceError(CirculantGateError):
    """Beatnote frequency coincides with a vibrational mode."""


class ChainInstabilityError(CirculantGateError):
    """Linear-chain assumption broken: a transverse mode has softened."""


class ConfigError(CirculantGateError):
    """Invalid scenario/sweep configuration; message names the field."""

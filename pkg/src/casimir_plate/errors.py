"""Exception hierarchy.

Validation problems subclass ``ValueError``; numerical failures subclass
``ArithmeticError`` so callers (and the CLI exit codes) can tell them apart.
"""


class CasimirPlateError(Exception):
    """Base class for all package errors."""


class ValidationError(CasimirPlateError, ValueError):
    pass


class NumericalError(CasimirPlateError, ArithmeticError):
    pass


class CoincidentAtoms(ValidationError):
    pass


class BelowPlate(ValidationError):
    pass


class InvalidAtom(ValidationError):
    pass


class PoleProximity(ValidationError):
    def __init__(self, k_p0: float, k: float):
        super().__init__(f"k={k!r} lies within the pole guard of the resonance k_p0={k_p0!r}")
        self.k_p0 = k_p0
        self.k = k


class DegenerateSeparation(ValidationError):
    pass


class StepTooLarge(ValidationError):
    pass


class NonUnitDirection(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class ResonantIntegrand(ValidationError):
    """Real-axis integration requested for an integrand with resonance poles."""


class QuadratureFailure(NumericalError):
    pass


class ExtrapolationUnstable(NumericalError):
    pass


class EndpointSingularity(NumericalError):
    pass

"""Exception types raised by the rate calculators, simulators and CLI."""


class RotcavError(ValueError):
    """Base class for all invalid-input errors in this package."""


class SuperluminalOrbitError(RotcavError):
    pass


class NonPositiveFrequencyError(RotcavError):
    pass


class NotAtResonanceError(RotcavError):
    pass


class DivergentAtResonanceError(RotcavError):
    pass


class WrongRegimeError(RotcavError):
    pass


class CoincidentPeaksError(RotcavError):
    pass


class BothRatesZeroError(RotcavError):
    pass


class NegativeTimeError(RotcavError):
    pass


class UnknownScenarioError(RotcavError):
    pass


class WindowExcludesPeakError(RotcavError):
    pass


class InvalidConfigError(RotcavError):
    """Raised with one message per offending config field."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class QuadratureNotConvergedError(ArithmeticError):
    """Numerical non-convergence; deliberately not a RotcavError."""

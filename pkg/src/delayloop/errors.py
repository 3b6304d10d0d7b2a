"""Exception hierarchy shared across the package."""


class NumericalError(ArithmeticError):
    """A computation lost accuracy or diverged."""


class ConditioningError(NumericalError):
    """Basis coefficients grew past the range where double precision is trustworthy."""


class DivergenceError(NumericalError):
    """A time integration produced a non-finite state."""


class InfeasibleTuning(ValueError):
    """The requested presets admit no tuning point."""


class OverdampedError(ValueError):
    """A closed form that needs an underdamped response was given an overdamped one."""

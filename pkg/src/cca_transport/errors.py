"""Exception types raised by the simulator."""


class DimensionCapError(ValueError):
    """A Fock sector would exceed the configured dimension cap."""


class NumericalGuardError(RuntimeError):
    """An integration or search left its numerical safety envelope."""


class PeriodUnavailableError(RuntimeError):
    """The spectrum has no commensurate period within the search bound."""

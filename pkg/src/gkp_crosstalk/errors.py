"""Exception types raised by the crosstalk simulator."""


class DegenerateLatticeError(ValueError):
    """Lattice generators are (numerically) linearly dependent."""


class NotInvertibleError(ValueError):
    """An integer has no inverse modulo the requested modulus."""


class InadmissibleEtaError(ValueError):
    """Transmissivity is not of the perfect-transmission form for the given code dimensions."""


class InvalidStateError(ValueError):
    """A discrete state fails its normalization or shape contract."""


class ResidualGaugeError(ValueError):
    """After correction the state still carries gauge content that cannot be discarded."""


class TooLargeError(ValueError):
    """Requested object exceeds the desk-scale size guard."""


class DegenerateDistributionError(RuntimeError):
    """A rejection sampler could not land inside its target interval."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed."""

"""Exception hierarchy shared by all modules."""


class FockgenError(Exception):
    """Base class for errors raised by fockgen."""


class InfeasibleTargetError(FockgenError, ValueError):
    """A requested pulse area exceeds what one full cavity transit delivers."""

    def __init__(self, message, atom_index=None):
        super().__init__(message)
        self.atom_index = atom_index


class SlotOverflowError(FockgenError, ValueError):
    """A resonant window plus its two Stark transitions does not fit in a slot."""

    def __init__(self, message, atom_index=None):
        super().__init__(message)
        self.atom_index = atom_index


class TruncationError(FockgenError):
    """Evolution would populate a Fock level above the cutoff."""


class QuadratureError(FockgenError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

"""Exception types raised by kerrjc."""


class KerrJCError(Exception):
    """Base class for all library errors."""


class TruncationError(KerrJCError, ValueError):
    """The truncated Fock space is too small for the requested state or operator."""


class DimensionMismatch(KerrJCError, ValueError):
    """Operands live in spaces of different dimension."""


class InvalidBranch(KerrJCError, ValueError):
    """Branch index outside {0, 1}."""


class DegenerateInput(KerrJCError, ValueError):
    """Parameters for which a quantity is undefined (e.g. g = chi = 0)."""


class UnnormalizedInput(KerrJCError, ValueError):
    """Qubit amplitudes or a state vector that is not unit norm."""

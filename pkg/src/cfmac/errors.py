"""Exception hierarchy for the cfmac package.

Everything raised on purpose derives from :class:`CfmacError`, so callers can
catch one type at the boundary.  Input-contract violations additionally derive
from :class:`ValidationError` (itself a ``ValueError``).
"""

from __future__ import annotations

__all__ = [
    "CfmacError",
    "ValidationError",
    # channel models
    "NonStochasticRowError",
    "NegativeEntryError",
    "LengthMismatchError",
    "SymbolOutOfRangeError",
    "PreimageCapExceededError",
    "NotDeterministicError",
    "StateSpaceCapExceededError",
    # information measures
    "InvalidPmfError",
    "OutOfRangeError",
    "AlphabetMismatchError",
    # optimization / bounds
    "InvalidDeltaError",
    "SolverDivergedError",
    "DimensionCapExceededError",
    "InvalidBoundsError",
    "InfeasibleInputError",
    "CapExceededError",
    "DeltaOutOfRangeError",
    "NotProductError",
    "NotInCstarError",
    "InversionFailedError",
    # two-phase scheme
    "Phase2TooShortError",
    "DegenerateRatesError",
    "TooManyCodewordsError",
    "ListOverflowError",
    "BadOutputError",
    "IndexOutOfListError",
    "ExhaustiveCapExceededError",
]


class CfmacError(Exception):
    """Base class for all errors raised by cfmac."""


class ValidationError(CfmacError, ValueError):
    """An input violated a documented precondition."""


# --- channel models ---------------------------------------------------------

class NonStochasticRowError(ValidationError):
    """A transition row does not sum to one within tolerance."""


class NegativeEntryError(ValidationError):
    """A probability table contains a negative entry."""


class LengthMismatchError(ValidationError):
    """Input words passed to an n-letter operation have unequal lengths."""


class SymbolOutOfRangeError(ValidationError):
    """A word contains a symbol outside the declared alphabet."""


class PreimageCapExceededError(CfmacError):
    """Enumerating a preimage would exceed the configured size cap."""


class NotDeterministicError(ValidationError):
    """The operation requires a deterministic channel."""


class StateSpaceCapExceededError(CfmacError):
    """Exact evaluation would enumerate more output words than the cap allows."""


# --- information measures ---------------------------------------------------

class InvalidPmfError(ValidationError):
    """A probability vector has negative mass or does not sum to one."""


class OutOfRangeError(ValidationError):
    """A scalar argument lies outside its legal interval."""


class AlphabetMismatchError(ValidationError):
    """Two distributions that must share an alphabet have different shapes."""


# --- optimization and bounds -------------------------------------------------

class InvalidDeltaError(ValidationError):
    """A dependence budget must be nonnegative."""


class SolverDivergedError(CfmacError):
    """The ascent produced a non-finite objective value."""


class DimensionCapExceededError(CfmacError):
    """A product-alphabet construction would exceed the configured cap."""


class InvalidBoundsError(ValidationError):
    """Bound combination received negative or inconsistent inputs."""


class InfeasibleInputError(ValidationError):
    """The supplied distribution violates the stated dependence budget."""


class CapExceededError(CfmacError):
    """A conditioning table grew past the configured cap."""


class DeltaOutOfRangeError(ValidationError):
    """The continuity envelope is only valid for small enough budgets."""


class NotProductError(ValidationError):
    """A distribution that must factor into independent marginals does not."""


class NotInCstarError(CfmacError):
    """The channel/input pair fails the dependence-gain membership test."""


class InversionFailedError(CfmacError):
    """A requested budget cannot be inverted through the mixture curve."""


# --- two-phase scheme --------------------------------------------------------

class Phase2TooShortError(ValidationError):
    """The second phase is too short to carry the list index."""


class DegenerateRatesError(ValidationError):
    """The requested block length leaves no room for actual messages."""


class TooManyCodewordsError(ValidationError):
    """More codewords were requested than distinct words exist."""


class ListOverflowError(CfmacError):
    """A decoding list exceeded its configured cap.

    Carries the offending list length in ``list_size`` when known.
    """

    def __init__(self, message: str, list_size: int | None = None):
        super().__init__(message)
        self.list_size = list_size


class BadOutputError(CfmacError):
    """The observed first-phase output has too many erasures to decode."""


class IndexOutOfListError(CfmacError):
    """The transmitted list index points past the end of the decoded list."""


class ExhaustiveCapExceededError(CfmacError):
    """An exhaustive sweep was requested over too many message pairs."""

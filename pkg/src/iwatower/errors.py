"""Exception hierarchy shared by all iwatower modules."""


class IwatowerError(Exception):
    """Base class for all errors raised by this package."""


class ZeroInput(IwatowerError):
    """ord_p of 0 requested; callers wanting +infinity must branch."""


class HypothesisViolated(IwatowerError):
    """An input fails a stated hypothesis of the underlying lemma."""


class OddPrimeRequired(IwatowerError):
    """The operation is only valid for odd p."""


class ResidueCharacteristicP(IwatowerError):
    """Residue cardinality not coprime to p."""


class ContextMismatch(IwatowerError):
    """Arithmetic attempted between elements of different precision contexts."""


class DegreeOverflow(IwatowerError):
    """A degree bound D would be exceeded in power-series mode."""


class PrecisionExhausted(IwatowerError):
    """The requested quantity cannot be certified at coefficient precision N."""


class DimensionOverflow(IwatowerError):
    """A coinvariant computation would exceed the configured basis bound."""


class NotSquare(IwatowerError):
    """A square presentation matrix was required."""


class GroupTooLarge(IwatowerError):
    """A finite group exceeds the configured order cap."""


class InsufficientData(IwatowerError):
    """Not enough unflagged tower points to solve for model coefficients."""


class NonIntegralCoefficient(IwatowerError):
    """A fitted main-term coefficient is not a non-negative integer."""


class MissingInvariant(IwatowerError):
    """An invariant slot required by the chosen growth law is absent."""

"""Exception hierarchy shared across the library.

Branch-indexed errors carry a 1-based ``index`` so diagnostics match the
branch numbering used when specifying a system (branch 1 is the topmost).
"""


class Error(Exception):
    """Base class for all library errors."""


class MixedFields(Error):
    """Operands belong to different field contexts."""


class DivisionByZero(Error, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class OddPrimeRequired(Error):
    """Operation is only defined over odd prime fields."""


class ArityMismatch(Error):
    """Vector or variable count does not match the expected width."""


class DomainTooLarge(Error):
    """Exhaustive enumeration would exceed the configured domain cap."""


class DuplicateAbscissa(Error):
    """Interpolation points share a first coordinate."""


class DegreeTooLow(Error):
    """Polynomial degree below what the operation requires."""


class SingularMatrix(Error):
    """Matrix is not invertible over the field."""


class KeyShapeMismatch(Error):
    """Round-key matrix shape does not match the cipher geometry."""


class WeightSumNonzero(Error):
    """Lai-Massey weights do not sum to zero."""


class BadM(Error):
    """Lai-Massey weight vector has no usable pivot index."""


class BadExponent(Error):
    """Exponent fails its coprimality/congruence requirement."""


class DiscriminantResidue(Error):
    """Quadratic discriminant is a square, so the polynomial has roots."""


class ParseError(Error):
    """Malformed JSON input."""


class _IndexedError(Error):
    """Error tied to a specific branch index (1-based)."""

    def __init__(self, index: int | None = None, detail: str = ""):
        self.index = index
        self.detail = detail
        super().__init__(index if detail == "" else f"{index}: {detail}")

    def __str__(self) -> str:
        name = type(self).__name__
        if self.index is None:
            return f"{name}({self.detail})" if self.detail else name
        if self.detail:
            return f"{name}({self.index}): {self.detail}"
        return f"{name}({self.index})"


class NotAPermutation(_IndexedError):
    """Polynomial does not induce a bijection of the field."""


class GiHasZero(_IndexedError):
    """A multiplier polynomial g_i vanishes somewhere on the field."""


class VariableOutOfScope(_IndexedError):
    """Branch polynomial references a variable outside its allowed suffix."""


class HypothesisUnverified(_IndexedError):
    """A theorem's side condition could not be established for a branch."""

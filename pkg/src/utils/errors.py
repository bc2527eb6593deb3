from typing import Any


class BSeriesError(Exception):
    """Base class for every error raised by the library."""
    pass


class SpecError(BSeriesError):
    """Raised when an equation spec file is malformed."""
    pass


class InvalidTree(BSeriesError):
    """Raised when a decorated tree violates the noise invariants."""
    pass


class GrammarError(InvalidTree):
    """Raised when tree text cannot be parsed."""

    def __init__(self, text: str, position: int, message: str):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class NoiseClash(BSeriesError):
    """Raised when both factors of a tree product carry a root noise."""
    pass


class UnknownLabel(BSeriesError):
    """Raised when a tree uses a label the spec does not declare."""
    pass


class NotSubcritical(BSeriesError):
    """Raised when tree generation would not terminate."""
    pass


class MalformedLeft(BSeriesError):
    """Raised when the left operand of star2 carries a root noise."""
    pass


class OrderTooLarge(BSeriesError):
    """Raised when an enumeration exceeds the configured bound."""
    pass


class IncompatiblePreparationMap(BSeriesError):
    """Raised when a preparation map breaks the right-morphism law."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None):
        self.witness = witness or {}
        super().__init__(message)


class TheoremMismatch(BSeriesError):
    """Raised when two computation paths of an identity disagree."""

    def __init__(self, identity: str, counterexample: dict[str, Any]):
        self.identity = identity
        self.counterexample = {"identity": identity, **counterexample}
        super().__init__(f"{identity} failed: {counterexample.get('summary', 'see counterexample')}")


class StencilExceeded(BSeriesError):
    """Raised when a tree needs a kernel derivative beyond the stored order."""
    pass


class DegenerateSamples(BSeriesError):
    """Raised when decay samples vanish identically."""
    pass

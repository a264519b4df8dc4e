"""Exception hierarchy.  Every error the kernel raises derives from CDGAError."""


class CDGAError(Exception):
    pass


class ValidationError(CDGAError, ValueError):
    """An input violates a stated invariant; the message names it."""


class ParseError(CDGAError, ValueError):
    def __init__(self, message: str, position: int | None = None, source: str | None = None):
        self.message = message
        self.position = position
        self.source = source
        where = f" at position {position}" if position is not None else ""
        if source is not None:
            where += f" in {source!r}"
        super().__init__(f"{message}{where}")


class MixedPresentation(CDGAError, ValueError):
    pass


class PositiveDegreeInput(CDGAError, ValueError):
    pass


class InfiniteSlice(CDGAError, ValueError):
    """A (degree, weight) slice is not finite-dimensional for this presentation."""


class NonHomogeneousDifferential(ValidationError):
    pass


class IndexOutOfRange(CDGAError, IndexError):
    pass


class LevelMismatch(CDGAError, ValueError):
    pass


class NotSurjective(CDGAError, ValueError):
    pass


class UnsupportedDegree0(CDGAError, ValueError):
    pass


class UnsupportedMorphism(CDGAError, ValueError):
    pass


class DegreeError(CDGAError, ValueError):
    pass


class SizeMismatch(CDGAError, ValueError):
    pass


class RelationViolation(CDGAError, ValueError):
    pass


class InvalidLie(ValidationError):
    pass


class InvalidAction(ValidationError):
    pass

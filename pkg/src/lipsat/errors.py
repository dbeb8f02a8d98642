"""Exception hierarchy shared by every lipsat module."""


class LipsatError(Exception):
    """Base class for engine errors (CLI exit code 3 unless noted)."""


class DivisionByZero(LipsatError, ZeroDivisionError):
    pass


class UnknownVariable(LipsatError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class IllegalComposition(LipsatError):
    pass


class ParseError(LipsatError, ValueError):
    """Malformed polynomial text; ``position`` is the 0-based column."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NoSingularPoint(LipsatError):
    pass


class NotSquarefree(LipsatError):
    pass


class UnsupportedExtension(LipsatError):
    """A root lives outside every cyclotomic field we can represent."""

    def __init__(self, minpoly):
        self.minpoly = minpoly
        super().__init__(f"root of {minpoly} is not of the form r*zeta with r rational")


class TruncationInsufficient(LipsatError):
    pass


class NotFiniteColength(LipsatError):
    pass


class NotNested(LipsatError):
    pass


class EmptyIdeal(LipsatError):
    pass


class NotAFamilyOverY(LipsatError):
    pass


class NonIsolatedFiber(LipsatError):
    pass


class NonIsolatedSection(LipsatError):
    pass


class NotOnVariety(LipsatError):
    pass


class DegenerateInput(LipsatError):
    pass


class DegenerateCurve(LipsatError):
    pass

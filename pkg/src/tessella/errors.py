"""Exception hierarchy shared by every tessella module."""


class TessellaError(Exception):
    """Base class for all errors raised by tessella."""


# geometry

class ModeMismatch(TessellaError):
    """Exact and approximate values were mixed in one operation."""


class DegenerateGeometry(TessellaError):
    """A polygon has zero area, repeated vertices or self-intersections."""


class NotARotation(TessellaError):
    """A rotation-only operation received an orientation-reversing map."""


# rule files

class RuleParseError(TessellaError):
    """Base class for rule-file parse errors."""


class RuleSyntaxError(RuleParseError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = "" if line is None else f" (line {line}, column {column})"
        super().__init__(f"{message}{where}")


class UnknownPrototile(RuleParseError):
    pass


class LambdaOutOfRange(RuleParseError):
    pass


class UnsupportedRadicand(RuleParseError):
    pass


class UnknownBuiltin(TessellaError):
    pass


# engine

class UnknownTileType(TessellaError):
    pass


class PatchTooLarge(TessellaError):
    def __init__(self, projected, cap):
        self.projected = projected
        self.cap = cap
        super().__init__(f"projected patch size {projected} exceeds cap {cap}")


# analysis

class SpectralNoConverge(TessellaError):
    def __init__(self, message, last_estimate=None):
        self.last_estimate = last_estimate
        super().__init__(message)


class UseCountInstead(TessellaError):
    """Weyl sums are only defined for m != 0; m = 0 is the tile count."""


class ReducibleMatrix(TessellaError):
    pass


# space

class InsufficientRadius(TessellaError):
    pass

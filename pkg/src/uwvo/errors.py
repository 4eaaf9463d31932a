"""Exception hierarchy shared by all uwvo modules."""


class UwvoError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(UwvoError, ValueError):
    """Array dimensions disagree."""


class ParameterError(UwvoError, ValueError):
    """A parameter or input violates a documented precondition."""


class DegenerateInputError(UwvoError):
    """Too few usable correspondences survived sampling."""


class DegenerateGeometryError(UwvoError):
    """The correspondences do not constrain an essential matrix (no baseline, collinear points)."""


class CheiralityError(UwvoError):
    """No motion hypothesis places enough points in front of both cameras."""


class RankDeficiencyError(UwvoError):
    """Point configuration does not determine a unique alignment."""


class ParseError(UwvoError, ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)

"""Exception hierarchy shared across the toolkit."""


class CapstanError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CapstanError, ValueError):
    """An input value is outside its physical or mathematical domain."""


class GeometryError(CapstanError):
    """The requested geometric construction is impossible (e.g. overlapping disks)."""


class InfeasibleError(CapstanError):
    """A valid request has no solution under the given constraints."""


class RoutingError(InfeasibleError):
    """A declared winding cannot be realized as a taut path.

    Carries the id of the offending capstan when one can be named.
    """

    def __init__(self, message: str, capstan_id: str | None = None):
        super().__init__(message)
        self.capstan_id = capstan_id


class PlanInfeasibleError(InfeasibleError):
    """No winding satisfies the maneuver request; carries the best margin attained."""

    def __init__(self, message: str, best_margin: float):
        super().__init__(message)
        self.best_margin = best_margin


class DegenerateDataError(CapstanError, ValueError):
    """A fit or statistic is requested on data that cannot support it."""


class UnknownSurfaceClassError(CapstanError, KeyError):
    """A surface class is not present in the friction library."""

    def __init__(self, surface_class: str):
        super().__init__(f"unknown surface class {surface_class!r}")
        self.surface_class = surface_class


class FormatError(CapstanError, ValueError):
    """A file or serialized document does not match its expected format."""


class SceneFormatError(FormatError):
    """Scene JSON is malformed or violates scene invariants."""


class TableFormatError(FormatError):
    """A CSV table has a bad header or an invalid row.

    ``row`` is the 1-based data-row index (header excluded), if applicable.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row

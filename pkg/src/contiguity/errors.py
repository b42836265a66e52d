"""Exception types shared across the package."""


class ContiguityError(Exception):
    """Base class for errors raised by this package."""


class ComplexError(ContiguityError, ValueError):
    """Malformed complex, simplex or subdivision input."""


class CapExceededError(ContiguityError):
    """A combinatorial construction would exceed its configured size cap."""


class MapError(ContiguityError, ValueError):
    """A vertex assignment is not a valid simplicial map for the request."""


class FiltrationError(ContiguityError, ValueError):
    """A sequence of complexes or maps does not form a valid direct system."""

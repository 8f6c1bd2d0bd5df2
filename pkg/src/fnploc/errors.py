"""Exception types raised on malformed inputs."""


class FnplocError(ValueError):
    """Base class for input errors; the CLI maps these to exit code 2."""


class DisconnectedInput(FnplocError):
    pass


class CyclicTreeInput(FnplocError):
    pass


class BadDimension(FnplocError):
    pass


class CycleTooShort(FnplocError):
    pass


class GraphTooLarge(FnplocError):
    pass


class NotATree(FnplocError):
    pass


class BoundsTooLarge(FnplocError):
    pass


class SpecError(FnplocError):
    """A graph or rule JSON spec could not be parsed."""

"""Exception types raised across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input to a graph or rank operation."""


class ParseError(InputError):
    """A dataset file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class SizingError(InputError):
    """A requested workload does not fit the available data."""


class InvariantError(RuntimeError):
    """An internal structural guarantee (e.g. no dead ends) was broken."""

"""Exception types shared across the package."""


class VeltmanError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(VeltmanError):
    """Bad input: unknown world, invalid structure, malformed file, out-of-range argument."""


class ResourceError(VeltmanError):
    """A configured budget (valuations, atoms, bits) would be exceeded."""


class FormulaSyntaxError(UsageError):
    """Raised by the formula parser, carrying a position and the expected tokens."""

    def __init__(self, message: str, text: str, offset: int, expected=()):
        self.text = text
        self.offset = offset
        self.line = text.count("\n", 0, offset) + 1
        self.column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        self.expected = tuple(sorted(set(expected)))
        where = f"line {self.line}, column {self.column}"
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(f"{where}: {message}")

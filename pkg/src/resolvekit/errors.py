"""Exception hierarchy shared by every module."""


class ResolveKitError(Exception):
    """Base class for all library errors."""


class InputError(ResolveKitError, ValueError):
    """Malformed user input (bad problem description, bad arguments)."""


class ParseError(InputError):
    def __init__(self, message, text="", line=1, column=1):
        self.message = message
        self.text = text
        self.line = line
        self.column = column
        super().__init__("%s (line %d, column %d)" % (message, line, column))


class RingMismatchError(InputError):
    """Operands live in different polynomial rings or coefficient rings."""


class UnknownVariableError(InputError):
    pass


class ResourceCapError(ResolveKitError):
    """A configured computation cap was hit."""


class NotPermissibleError(ResolveKitError):
    """A requested blow-up or division violates permissibility."""


class InvariantViolation(ResolveKitError):
    """An internal consistency check failed."""


class MaximalContactNotFound(ResolveKitError):
    pass


class NonCoordinateCenter(ResolveKitError):
    """A center exists but cannot be brought into coordinate form.

    ``components`` holds the defining ideals found so far.
    """

    def __init__(self, message, components=(), step=None):
        self.components = tuple(components)
        self.step = step
        super().__init__(message)


class CertificationFailure(ResolveKitError):
    """A truncated (nilpotent-base) object does not mirror its closed fiber.

    ``witness`` maps short labels to printable ideals.
    """

    def __init__(self, message, witness=None):
        self.witness = dict(witness or {})
        super().__init__(message)

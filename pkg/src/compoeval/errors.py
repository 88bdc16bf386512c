"""Exception hierarchy.

Validation problems (bad queries, exhausted binding spaces, malformed
files) and backend problems (unreachable or protocol-violating
translators) are kept apart so the CLI can map them to distinct exit
codes (1 and 2 respectively).
"""


class CompoevalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CompoevalError):
    """Bad input, bad query, or an unsatisfiable request."""


class UnknownLexicalClassError(ValidationError):
    pass


class IncompleteParadigmError(ValidationError):
    pass


class BindingSpaceExhaustedError(ValidationError):
    def __init__(self, requested, maximum):
        super().__init__(
            f"binding space exhausted: requested {requested}, "
            f"maximum distinct bindings is {maximum}"
        )
        self.requested = requested
        self.maximum = maximum


class NoSubstituteError(ValidationError):
    pass


class EmptyFillerPoolError(ValidationError):
    pass


class TreeSyntaxError(ValidationError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ConjunctionNotFoundError(ValidationError):
    pass


class DegenerateInputError(ValidationError):
    pass


class BackendError(CompoevalError):
    """Backend unreachable or misbehaving."""


class ProtocolError(BackendError):
    """Backend answered, but violated the translation protocol."""

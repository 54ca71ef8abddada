"""Exception hierarchy shared by all biasaudit modules.

The CLI maps these onto process exit codes: InputError and its
subclasses exit 1 (bad data or configuration), any other
BiasAuditError exits 2 (runtime failure).
"""


class BiasAuditError(Exception):
    """Base class for every error raised by this package."""


class InputError(BiasAuditError):
    """Invalid input data, configuration, or arguments."""


class ParseError(InputError):
    """A file could not be parsed; the message names the file and line."""


class MissingKeyError(InputError):
    """A required sidecar key is absent; the message names the key."""

    def __init__(self, key: str, where: str = "sidecar"):
        self.key = key
        super().__init__(f"{where} is missing required key {key!r}")

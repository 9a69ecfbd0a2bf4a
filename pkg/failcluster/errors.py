"""
Exception types raised by the failcluster library.

Library code raises these; only the command line front end catches them.
"""


class FailclusterError(Exception):
    """Base class for every error raised by failcluster."""


class CoverageParseError(FailclusterError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ProgramSyntaxError(FailclusterError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DomainError(FailclusterError, ValueError):
    """A precondition on the inputs of an operation does not hold."""


class GenerationError(FailclusterError, RuntimeError):
    """Fault injection could not produce a valid faulty version."""


class ConfigurationError(FailclusterError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class CorpusError(FailclusterError, RuntimeError):
    def __init__(self, version_id, message):
        self.version_id = version_id
        super().__init__(f"version {version_id}: {message}")

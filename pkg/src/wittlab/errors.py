"""Exception hierarchy shared by the engine and the CLI."""


class WittlabError(Exception):
    pass


class ValidationError(WittlabError, ValueError):
    """Bad input: tower mismatch, failed precondition, malformed literal."""


class ResourceError(WittlabError):
    """A search budget (work count or wall-clock) was exhausted."""


class InvariantViolation(WittlabError):
    """A witness guaranteed by theory was not found.

    On the towers this package models that can only mean an engine bug, so
    the failing instance is carried along for replay.
    """

    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance

"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ContractViolation(EngineError):
    """An internal contract was broken (dimension mismatch, bad argument)."""


class InputError(EngineError):
    """User-supplied input was rejected (empty sentence, malformed file)."""


class NoRetrievalSupport(EngineError):
    """A retrieval-derived quantity was requested on an empty neighbor set."""


class CorpusFormatError(InputError):
    """A corpus file could not be parsed; the message names the line."""


class SnapshotError(EngineError):
    """Base class for datastore snapshot problems."""


class SnapshotFormatError(SnapshotError):
    """The file is not a datastore snapshot (bad magic or header)."""


class SnapshotVersionError(SnapshotError):
    """The snapshot was written by an incompatible format version."""


class SnapshotKindError(SnapshotError):
    """The snapshot holds a different datastore kind than expected."""


class SnapshotDimensionError(SnapshotError):
    """The snapshot's vector dimension does not match the consumer."""


class SnapshotTruncatedError(SnapshotError):
    """The snapshot body is shorter than its header promises."""

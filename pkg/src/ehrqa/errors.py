"""Exception hierarchy shared across the pipeline."""


class EHRQAError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EHRQAError, ValueError):
    """Invalid parameters or experiment configuration."""


class MalformedRecordError(EHRQAError, ValueError):
    """A corpus record failed to parse.

    ``line`` is the 1-based line number in the source file when known.
    """

    def __init__(self, message, line=None, record_id=None):
        self.line = line
        self.record_id = record_id
        where = []
        if line is not None:
            where.append(f"line {line}")
        if record_id is not None:
            where.append(f"record {record_id!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class IntegrityError(EHRQAError):
    """Cross-reference or uniqueness violation (duplicate ids, dangling refs)."""


class DanglingReferenceError(IntegrityError):
    def __init__(self, item_id, note_id):
        self.item_id = item_id
        self.note_id = note_id
        super().__init__(f"QA item {item_id!r} references unknown note_id {note_id!r}")


class ServiceError(EHRQAError):
    """An external model service failed."""


class RetryableServiceError(ServiceError):
    """Transient failure; raised after bounded retries were exhausted."""

    def __init__(self, message, attempts=None):
        self.attempts = attempts
        super().__init__(message)


class DimensionMismatchError(ServiceError, ConfigurationError):
    """Embedding dimensionality disagrees with the configured index dimension."""


class ContextOverflowError(EHRQAError):
    """Prompt does not fit in the generator's context window."""

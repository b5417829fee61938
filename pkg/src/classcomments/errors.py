"""Exception hierarchy.

``ConfigError`` subclasses map to CLI exit code 2, ``DataError`` subclasses
to exit code 3.
"""

from __future__ import annotations


class ClassCommentsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ClassCommentsError):
    pass


class DataError(ClassCommentsError):
    pass


class UnbalancedDelimiter(DataError):
    def __init__(self, path: str, line: int, column: int, what: str):
        self.path = path
        self.line = line
        self.column = column
        self.what = what
        super().__init__(f"{path}:{line}:{column}: unterminated or unbalanced {what}")


class SchemaError(ConfigError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


class UnknownLabel(DataError):
    def __init__(self, record_id: str, label: str):
        self.record_id = record_id
        self.label = label
        super().__init__(f"record {record_id!r}: unknown or inapplicable label {label!r}")


class MalformedRecord(DataError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownMatcherKind(ConfigError):
    pass


class EmptyCorpus(DataError):
    pass


class NamespaceCollision(DataError):
    pass


class DegenerateLabel(DataError):
    """Raised when a binary problem has only one class present."""


class EmptyDataset(DataError):
    pass


class LanguageMismatch(DataError):
    pass


class TooFewInstances(ConfigError):
    pass


class FingerprintMismatch(ConfigError):
    pass


class TaxonomyVersionMismatch(ConfigError):
    pass


class ModelFormatError(ConfigError):
    pass

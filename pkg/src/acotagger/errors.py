"""Exception hierarchy shared by every acotagger module."""


class AcoTaggerError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(AcoTaggerError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCorpusError(AcoTaggerError, ValueError):
    pass


class SplitError(AcoTaggerError, ValueError):
    pass


class GenerationError(AcoTaggerError, ValueError):
    pass


class TrainingError(AcoTaggerError, ValueError):
    pass


class ModelLookupError(AcoTaggerError, KeyError):
    """Unknown tag passed to a model lookup."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ModelFormatError(AcoTaggerError, ValueError):
    def __init__(self, message, section=None, line=None):
        self.section = section
        self.line = line
        where = []
        if section is not None:
            where.append(f"section {section}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class DomainError(AcoTaggerError, ValueError):
    pass


class OracleCapacityError(AcoTaggerError, ValueError):
    pass


class EvaluationError(AcoTaggerError, ValueError):
    pass

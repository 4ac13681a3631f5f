"""Exception types shared across the package."""


class TriageError(Exception):
    """Base class for all package errors."""


class MissingField(TriageError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required field missing: {name}")


class MalformedTimestamp(TriageError):
    pass


class EmptyCategory(TriageError):
    pass


class LatenessExceeded(TriageError):
    pass


class UnknownAlert(TriageError):
    pass


class DuplicateResolution(TriageError):
    pass


class DegenerateLabels(TriageError):
    pass


class EmptyData(TriageError):
    pass


class DimensionMismatch(TriageError):
    pass


class UnsupportedModel(TriageError):
    pass


class VersionMismatch(TriageError):
    pass


class CorruptArtifact(TriageError):
    pass


class LengthMismatch(TriageError):
    pass


class EmptyInput(TriageError):
    pass


class TooFewRows(TriageError):
    pass


class MalformedRecord(TriageError):
    pass


class ModelUnavailable(TriageError):
    pass


class StoreLagging(TriageError):
    pass


class ValidationRegression(TriageError):
    pass

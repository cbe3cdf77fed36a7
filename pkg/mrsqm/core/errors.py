"""Exception hierarchy shared by every service."""


class MrsqmError(Exception):
    """Base class for all errors raised by the library."""


class ArgumentError(MrsqmError, ValueError):
    """An operation was called with arguments outside its contract."""


class DatasetFormatError(MrsqmError):
    """A dataset file is structurally invalid (missing @data, ragged rows, empty)."""


class DatasetParseError(DatasetFormatError):
    """A dataset value could not be parsed as a finite number."""


class NotFittedError(MrsqmError):
    """A representation or model was used before being fitted."""


class ModelFileError(MrsqmError):
    """A model file is truncated, corrupt or inconsistent."""


class UnsupportedModelVersionError(ModelFileError):
    """A model file was written by an incompatible format version."""

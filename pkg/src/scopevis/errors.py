"""Exception hierarchy.

``InputError`` subclasses signal bad input data or contract violations
(CLI exit code 2); anything else escaping a command is an internal failure.
"""


class ScopevisError(Exception):
    pass


class InputError(ScopevisError):
    pass


class FormatError(InputError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class TruncationError(InputError):
    def __init__(self, frame_index, expected, got):
        super().__init__(
            f"truncated frame payload at frame {frame_index}: expected {expected} bytes, got {got}"
        )
        self.frame_index = frame_index


class UnsupportedFormatError(InputError):
    pass


class DimensionError(InputError):
    def __init__(self, message, frame_index=None):
        if frame_index is not None:
            message = f"frame {frame_index}: {message}"
        super().__init__(message)
        self.frame_index = frame_index


class MissingFrameError(InputError):
    def __init__(self, index, path=None):
        where = f" ({path})" if path else ""
        super().__init__(f"missing frame at index {index}{where}")
        self.index = index


class GeometryError(InputError):
    pass


class EmptyInputError(InputError):
    pass


class ScenarioError(InputError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigError(InputError):
    pass


class CompositionError(InputError):
    def __init__(self, slot, message):
        super().__init__(f"slot {slot!r}: {message}")
        self.slot = slot


class DataError(InputError):
    pass


class DegenerateInputError(InputError):
    pass


class UnsupportedError(InputError):
    pass

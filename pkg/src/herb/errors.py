"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
numeric failures exit 2.
"""


class HerbError(Exception):
    """Base class for all package errors."""


class ShapeError(HerbError):
    """Operands have incompatible shapes."""

    def __init__(self, op, *shapes):
        super().__init__(f"{op}: incompatible shapes {' vs '.join(map(str, shapes))}")


class NumericError(HerbError):
    """Numeric-domain violation or non-finite value."""


class TrainingError(NumericError):
    """Training diverged; carries the epoch where it happened."""

    def __init__(self, message, epoch):
        super().__init__(f"{message} (epoch {epoch})")
        self.epoch = epoch


class ConfigError(HerbError):
    """Invalid configuration or unusable input combination."""


class ParseError(ConfigError):
    """A data or config file failed to parse; carries file and line."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no

"""Exception types shared across the package."""


class RgbwForgeError(ValueError):
    """Base class for all library errors."""


class ShapeError(RgbwForgeError):
    """Array dimensions violate an operation's contract."""


class ConfigError(RgbwForgeError):
    """Invalid parameter or configuration value."""


class ParseError(RgbwForgeError):
    """Malformed text input (config file, sidecar, meta file)."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class PairingError(RgbwForgeError):
    """Prediction and ground-truth sets cannot be matched one-to-one."""


class EstimationError(RgbwForgeError):
    """Not enough data to fit the requested model."""


class IncompleteReportError(RgbwForgeError):
    """A composite metric was requested with components missing."""

"""Exception types shared across the package."""


class LicentiaError(Exception):
    """Base class for all errors raised by this package."""


class ScanError(LicentiaError):
    """Project tree could not be scanned (unreadable root, bad arguments)."""


class CorpusError(LicentiaError):
    """Bundled or user-supplied license corpus failed validation."""


class DetectionError(LicentiaError):
    """Incompatibility detection was invoked with incomplete inputs."""

"""Exception types shared across the package."""


class UsageError(ValueError):
    """Bad parameters or malformed input encodings."""


class InfeasibleError(RuntimeError):
    """The requested computation is out of the supported range."""


class ResourceError(RuntimeError):
    """Memory budget, checkpoint, or lock-file problems."""


class CheckpointError(ResourceError):
    """Unreadable, version-mismatched, or locked checkpoint state."""

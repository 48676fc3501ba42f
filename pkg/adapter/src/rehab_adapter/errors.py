class AdapterError(Exception):
    """Base class for adapter failures."""


class VideoReadError(AdapterError):
    """Video file missing, unreadable, or inconsistent with its annotation."""


class BackendError(AdapterError):
    """Backend misconfiguration: missing weights, wrong output shape, bad mode."""

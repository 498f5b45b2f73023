"""Exception types shared across the package."""


class SerplabError(Exception):
    """Base class for all errors raised by this package."""


class NotFoundError(SerplabError):
    """A referenced element or record does not exist."""


class InvalidArgumentError(SerplabError, ValueError):
    """An operation was called with arguments outside its contract."""


class InvalidConfigError(SerplabError, ValueError):
    """A configuration file or value is malformed or inconsistent."""


class DegenerateModelError(SerplabError):
    """The click model assigns zero total weight to a page."""


class EmptyGroupError(SerplabError):
    """An estimator was asked about a treatment group with no events."""


class UndefinedDistortionError(SerplabError):
    """Distortion is undefined because the reference click rate is zero."""


class UnstableStatisticError(SerplabError):
    """Too many bootstrap resamples left the statistic undefined."""

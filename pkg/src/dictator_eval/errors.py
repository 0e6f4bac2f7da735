class DictatorEvalError(Exception):
    pass


class ConfigError(DictatorEvalError):
    """A bundled or user-supplied data/config file is malformed."""


class FormatError(DictatorEvalError, ValueError):
    """Agent response text has no usable payload."""


class StoreError(DictatorEvalError):
    pass


class DuplicateTrialError(StoreError):
    pass


class RegressionError(DictatorEvalError, ValueError):
    pass


class AlignmentError(DictatorEvalError):
    pass

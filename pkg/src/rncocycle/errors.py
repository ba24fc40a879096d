class RNCocycleError(Exception):
    """Base class for package errors."""


class CapExceeded(RNCocycleError):
    def __init__(self, cap, what="a 1"):
        super().__init__(f"no {what} found within the materialization cap of {cap} indices")
        self.cap = cap


class InvalidParameter(RNCocycleError, ValueError):
    pass


class NotPowerCompatible(RNCocycleError, ValueError):
    pass


class TooLarge(RNCocycleError, ValueError):
    pass


class IndexOutOfPrefix(RNCocycleError, IndexError):
    pass


class DepthMismatch(RNCocycleError, ValueError):
    pass

"""
Exception hierarchy shared by the ledger, sequence, zops and dynsim modules.
Library code raises these; only handlers.py catches them.
"""


class SubseqError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SubseqError):
    """Bad run configuration or command-line input."""


class CheckFailed(SubseqError):
    """A verification finished and at least one check did not hold."""


# ledger

class MissingBlock(SubseqError):
    pass


class MissingCount(SubseqError):
    pass


class InfeasibleAtScale(SubseqError):
    """The smallest admissible parameter exceeds the caller's resource bound."""

    def __init__(self, m: int, what: str, required, bound):
        self.m = m
        self.what = what
        self.required = required
        self.bound = bound
        super().__init__(
            f"block {m}: minimal admissible {what} is {required}, above the bound {bound}"
        )

    @property
    def required_k(self):
        return self.required if self.what == "K" else None


class NoPrimeWindow(SubseqError):
    pass


class ConstraintViolation(SubseqError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# sequence

class LedgerIncomplete(SubseqError):
    pass


class OutOfBuiltRange(SubseqError):
    pass


class WindowTooLarge(SubseqError):
    pass


# zops

class LengthMismatch(SubseqError):
    pass


class NonpositiveLambda(SubseqError):
    pass


class GridRatioError(SubseqError):
    pass


# dynsim

class BadSpec(SubseqError):
    pass


class HorizonExceeded(SubseqError):
    pass


class TowerTooShort(SubseqError):
    pass


class TowerCoverageError(SubseqError):
    pass

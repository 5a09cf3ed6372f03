"""Exception hierarchy shared by the library and the CLI."""


class ApproxGroupsError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(ApproxGroupsError, ValueError):
    """An operation was called on input outside its contract."""


class ScalarError(PreconditionError):
    """Malformed scalar input or an invalid scalar inverse."""


class DimensionError(PreconditionError):
    """Operands of incompatible dimension."""


class NotUpperTriangularError(PreconditionError):
    """A structural map that needs an upper-triangular matrix got something else."""


class CapExceeded(ApproxGroupsError):
    """A computed set (or evaluation count) would exceed its budget.

    The partial result is discarded; nothing is ever silently truncated.
    """

    def __init__(self, limit, reached, stage=""):
        self.limit = limit
        self.reached = reached
        self.stage = stage
        where = f" during {stage}" if stage else ""
        super().__init__(f"growth cap of {limit} exceeded{where} (reached {reached})")


class ParseError(ApproxGroupsError, ValueError):
    """Wire-format input could not be decoded."""


class VerificationError(ApproxGroupsError):
    """A stored report or certificate failed an independent re-check."""

    def __init__(self, check, detail=""):
        self.check = check
        self.detail = detail
        msg = check if not detail else f"{check}: {detail}"
        super().__init__(msg)

"""Exception types shared across the package."""


class LatentMatteError(Exception):
    """Base class for all package errors."""


class ShapeError(LatentMatteError):
    """Array extents do not satisfy an operation's contract."""


class StepOutOfRange(LatentMatteError):
    """Diffusion step index outside the schedule."""


class ConstantInput(LatentMatteError):
    """Histogram has all mass in one bin; no threshold separates two classes."""


class InvalidSpec(LatentMatteError):
    """Scene description violates its own constraints."""


class OutOfBounds(LatentMatteError):
    """A point lies outside the frame bounds."""


class EmptyMask(LatentMatteError):
    """An operation that needs masked pixels received a mask with none."""


class NoCheckpoint(LatentMatteError):
    """Model weights required but not loaded or not found."""


class BudgetZero(LatentMatteError):
    """Training budget is negative (zero is allowed and returns the init)."""


class InsufficientCorrespondences(LatentMatteError):
    """A mean over token pairs needs at least two tokens."""


class TrackingFailed(LatentMatteError):
    """No query token has enough correspondences or surround tokens to guide."""


class DegenerateMask(LatentMatteError):
    """Attention-derived mask is constant; Otsu cannot split it."""


class MissingSoftMask(LatentMatteError):
    """Alpha extraction needs the soft mask, not just the binary one."""


class UnknownObject(LatentMatteError):
    """Object index outside the request's mask list."""


class EmptySuite(LatentMatteError):
    """A benchmark run received no scenes."""


class UsageError(LatentMatteError):
    """Bad command line: unknown command, flag, or missing argument."""


class ConfigError(LatentMatteError):
    """Bad config file: unknown key, bad section, or unparsable value."""

"""Exception types raised by sirkit.

Every error derives from :class:`SirkitError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""

from __future__ import annotations


class SirkitError(ValueError):
    """Base class for all sirkit errors."""


class NonPositiveParameter(SirkitError):
    def __init__(self, which: str, value: float):
        self.which = which
        self.value = value
        super().__init__(f"{which} must be > 0, got {value!r}")


class NonFiniteParameter(SirkitError):
    def __init__(self, which: str, value: float):
        self.which = which
        self.value = value
        super().__init__(f"{which} must be finite, got {value!r}")


class NonFiniteState(SirkitError):
    pass


class NegativeTolerance(SirkitError):
    pass


class NegativeInitialData(SirkitError):
    pass


class InvalidConfig(SirkitError):
    pass


class StepBudgetExhausted(SirkitError):
    def __init__(self, t: float, max_steps: int):
        self.t = t
        self.max_steps = max_steps
        super().__init__(f"step budget of {max_steps} exhausted at t={t!r}")


class StepUnderflow(SirkitError):
    def __init__(self, t: float, h: float):
        self.t = t
        self.h = h
        super().__init__(f"step size {h!r} below machine resolution at t={t!r}")


class TimeOutOfRange(SirkitError):
    pass


class UnorderedSamples(SirkitError):
    pass


class NonpositiveS(SirkitError):
    pass


class NegativeI(SirkitError):
    pass


class NonFiniteInput(SirkitError):
    pass


class InvalidRange(SirkitError):
    pass

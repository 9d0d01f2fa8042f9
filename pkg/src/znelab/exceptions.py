"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateSampleError(ValueError):
    """A statistic is undefined for the given sample (e.g. zero variance).

    Raised instead of returning p = 0 or p = 1 so that callers can decide how
    to classify the sample.
    """

class GConvexError(Exception):
    """ Base class of all errors raised by pygconvex. """
    pass


class InputError(GConvexError, ValueError):
    pass


class UsageError(GConvexError, ValueError):
    pass


class PreconditionError(UsageError):
    pass


class ConditioningError(GConvexError, ArithmeticError):
    pass


class DegeneracyError(ConditioningError):
    pass


class CapacityError(GConvexError, ValueError):
    pass


class EvaluationError(GConvexError, ArithmeticError):
    """ A scalar field returned a non finite value. location holds the point (and t) of the failure. """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class IntegrationError(GConvexError, RuntimeError):
    """ The geodesic integration left the valid region. trace holds the samples up to the last valid state. """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class StagnationError(GConvexError, RuntimeError):
    """ A descent step could not decrease the objective. best / value hold the best iterate found. """

    def __init__(self, message, best=None, value=None, iterations=0):
        super().__init__(message)
        self.best = best
        self.value = value
        self.iterations = iterations

"""
Exception hierarchy of the wavefront engine.

Everything numerical derives from ``NumericalError`` so the commands can map
it to exit status 3 in one place.
"""


class WavefrontError(Exception):
    """Base class for wavefront errors."""


class NumericalError(WavefrontError):
    """A computation could not be carried out."""


# Metric evaluation

class MetricError(NumericalError):
    pass


class DegenerateVelocityError(MetricError):
    def __init__(self, velocity):
        self.velocity = tuple(velocity)
        super().__init__(f'velocity {self.velocity} is too close to zero')


class NotPositiveDefiniteError(MetricError):
    """The fundamental tensor lost positive definiteness."""

    def __init__(self, eigenvalues, location=None):
        self.eigenvalues = tuple(float(e) for e in eigenvalues)
        self.location = location
        where = f' at {location}' if location is not None else ''
        super().__init__(f'fundamental tensor is not positive definite{where}: eigenvalues {self.eigenvalues}')


class SingularTensorError(MetricError):
    def __init__(self, condition):
        self.condition = float(condition)
        super().__init__(f'tensor is numerically singular (condition number {self.condition:.3e})')


class InvalidZermeloDataError(NumericalError):
    """Zermelo data outside a >0, b >0 and λ = 1 - h(C,C) > 0."""

    def __init__(self, location, reason):
        self.location = None if location is None else tuple(float(x) for x in location)
        self.reason = reason
        where = f' at (t,u,v)={self.location}' if location is not None else ''
        super().__init__(f'invalid Zermelo data{where}: {reason}')


class RootSearchError(NumericalError):
    def __init__(self, message, profile=None):
        self.profile = profile
        super().__init__(message)


# Integration

class IntegrationError(NumericalError):
    pass


class StepSizeUnderflowError(IntegrationError):
    def __init__(self, t, state, step):
        self.t = float(t)
        self.state = tuple(float(x) for x in state)
        self.step = float(step)
        super().__init__(f'step size underflow ({self.step:.3e}) at t={self.t:.6g}, state={self.state}')


class DomainExitError(IntegrationError):
    def __init__(self, t, point):
        self.t = float(t)
        self.point = tuple(float(x) for x in point)
        super().__init__(f'ray left the metric domain at t={self.t:.6g}, p={self.point}')


class RayIntegrationError(IntegrationError):
    """A ray of a net failed; carries the ray's s index."""

    def __init__(self, s_index, cause):
        self.s_index = s_index
        self.cause = cause
        super().__init__(f'ray {s_index} failed: {cause}')


class QuadratureError(NumericalError):
    pass


# Time fields

class TimeFieldError(NumericalError):
    pass


class OutsideNetImageError(TimeFieldError):
    def __init__(self, point):
        self.point = tuple(float(x) for x in point)
        super().__init__(f'point {self.point} is outside the image of the net')


class NetFoldingError(TimeFieldError):
    def __init__(self, s, t, point):
        self.s = float(s)
        self.t = float(t)
        self.point = tuple(float(x) for x in point)
        super().__init__(f'net folds near s={self.s:.6g}, t={self.t:.6g}, p={self.point}')


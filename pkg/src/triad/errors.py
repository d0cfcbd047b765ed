"""Exception hierarchy shared by the triad modules."""


class TriadError(Exception):
    """Base class for every error raised by triad."""


class DomainError(TriadError, ValueError):
    """An argument lies outside the domain of a function (e.g. negative concentration)."""


class CurveClassError(TriadError, TypeError):
    """A growth curve does not belong to the hypothesis class an operation requires."""


class ParameterError(TriadError, ValueError):
    """Model parameters violate a structural constraint."""


class StructureError(TriadError, ValueError):
    """A matrix does not have the expected block-zero pattern."""


class NumericError(TriadError, RuntimeError):
    """A numerical solve failed to meet its residual tolerance."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class StiffnessError(TriadError, RuntimeError):
    """The integrator step size underflowed."""

    def __init__(self, message, t=None, h=None):
        super().__init__(message)
        self.t = t
        self.h = h

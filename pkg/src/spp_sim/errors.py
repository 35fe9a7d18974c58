"""Exception hierarchy shared by all modules."""


class SppSimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SppSimError, ValueError):
    """A physical parameter is outside its allowed range."""


class IncompatibleDimensionsError(ValidationError):
    pass


class NonPositiveArgumentError(ValidationError):
    pass


class NegativeArgumentError(ValidationError):
    pass


class BranchAmbiguityError(SppSimError):
    pass


class OverdampedPoleError(SppSimError):
    """The Drude pole equation has no oscillatory root at this wavenumber."""


class NegativeLagError(ValidationError):
    pass


class StepTooCoarseError(SppSimError):
    pass


class SingularKernelError(SppSimError):
    pass


class DegenerateParametersError(ValidationError):
    pass


class InsufficientDataError(SppSimError):
    pass


class PeakOnBoundaryError(SppSimError):
    pass


class InfeasiblePlanError(SppSimError):
    pass


class ProtectionViolatedError(SppSimError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CutoffTooSmallError(ValidationError):
    pass


class PvGridMisalignedError(SppSimError):
    pass


class ConfigParseError(SppSimError):
    pass

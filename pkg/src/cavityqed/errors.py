"""Exception types raised by the package."""


class CavityQEDError(Exception):
    """Base class for all package errors."""


class AdmissibilityError(CavityQEDError, ValueError):
    """Model parameters outside the region where the dressed frame exists."""


class ConvergenceError(CavityQEDError):
    """A truncated quantity did not converge under dimension doubling."""


class StepSizeError(CavityQEDError, ValueError):
    """Time step too large for the integrator's accuracy guard."""


class ConfigError(CavityQEDError, ValueError):
    """Invalid run configuration."""

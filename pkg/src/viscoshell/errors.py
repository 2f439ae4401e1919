"""Exception hierarchy for the shell library."""


class ViscoShellError(Exception):
    """Base class for all library errors."""


class InvalidDegreeError(ViscoShellError):
    pass


class UnsupportedKnotVectorError(ViscoShellError):
    pass


class InvalidWeightError(ViscoShellError):
    pass


class DegenerateGeometryError(ViscoShellError):
    """Tangent vectors do not span a surface (|a1 x a2| below threshold)."""


class DegenerateMetricError(ViscoShellError):
    pass


class InvertedElementError(ViscoShellError):
    """Surface stretch J <= 0 at a quadrature point."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class DegenerateViscosityError(ViscoShellError):
    """A Maxwell branch with zero viscosity cannot be integrated."""


class LocalSolverError(ViscoShellError):
    """Local Newton iteration for an evolution law failed to converge."""

    def __init__(self, message, residual_norm=None, iterations=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class TangentSingularityError(ViscoShellError):
    """Singular sensitivity system while building consistent tangents."""


class SolverError(ViscoShellError):
    """Global Newton failure (singular tangent or divergence)."""

    def __init__(self, message, step=None, iterations=None, residual_norm=None):
        super().__init__(message)
        self.step = step
        self.iterations = iterations
        self.residual_norm = residual_norm


class ProjectionError(ViscoShellError):
    pass


class ConfigError(ViscoShellError):
    """Scenario configuration violates the schema; `path` names the field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnsupportedStudyError(ViscoShellError):
    pass

"""Exception types shared across the package."""


class DomainError(ValueError):
    """A coordinate lies outside the potential's domain."""


class ConfigurationError(ValueError):
    """Invalid physical or run configuration (bad geometry, bad mesh, bad file)."""


class MeshResolutionError(ConfigurationError):
    """Requested element size cannot resolve the geometry."""


class OracleSizeError(ConfigurationError):
    """Finite-difference oracle grid exceeds the dense-solve budget."""


class ConvergenceError(RuntimeError):
    """Eigensolver failed to converge or to certify its result.

    ``pairs`` carries whatever eigenpairs were obtained before the failure.
    """

    def __init__(self, message, pairs=None):
        super().__init__(message)
        self.pairs = pairs if pairs is not None else []

"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input or result breaks a documented numerical contract."""


class ResourceLimitError(MemoryError):
    """Requested dense object exceeds the configured size guard."""


class DiagonalizationError(ContractViolation):
    """Joint diagonalization failed its reconstruction check.

    Usually means ``cluster_tol`` was too small so that two nearly
    degenerate ``Re(U)`` eigenvectors got mixed.
    """

    def __init__(self, message, residual, worst_cluster):
        super().__init__(message)
        self.residual = residual
        self.worst_cluster = worst_cluster


class ConfigError(ValueError):
    """Malformed run configuration (file or flags)."""

"""Exception types shared across the package."""

from __future__ import annotations


class DispquadError(Exception):
    """Base class for all package-specific errors."""


class MeshError(DispquadError, ValueError):
    """Invalid mesh description (element count, knot structure)."""


class ParameterError(DispquadError, ValueError):
    """Argument outside its documented domain."""


class UnsupportedOrderError(DispquadError, ValueError):
    """Quadrature order outside the supported catalog range."""


class ConfigError(DispquadError, ValueError):
    """Invalid run configuration (bc/family combination, preset name, file)."""


class PolicyError(DispquadError, ValueError):
    """Quadrature policy unusable for the requested assembly."""


class StencilError(DispquadError, ValueError):
    """Stencil extraction requested from matrices that define none."""


class InconsistencyError(DispquadError):
    """Assembled rows are not translation invariant on a uniform periodic mesh."""


class DerivationError(DispquadError):
    """Newton derivation failed to converge; carries the final residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class SingularSystemError(DispquadError):
    """Jacobian became singular during a Newton iteration."""


class StopBandError(DispquadError):
    """No real wavenumber exists at the requested frequency; carries the cutoff."""

    def __init__(self, lam: float, cutoff: float):
        super().__init__(
            f"Lambda={lam:.6g} is beyond the stop-band cutoff {cutoff:.6g}"
        )
        self.cutoff = cutoff


class InsufficientDataError(DispquadError):
    """Too few usable points survived filtering for a least-squares fit."""


class NotSPDError(DispquadError):
    """Matrix expected to be symmetric positive definite is not."""


class SizeError(DispquadError):
    """Problem size exceeds the supported desk-scale cap."""


class PairingError(DispquadError):
    """Discrete eigenvector could not be matched to an exact mode cluster."""

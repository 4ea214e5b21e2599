"""Exception types shared across the package."""

from __future__ import annotations


class RandApproxError(Exception):
    """Base class; ``kind`` is the machine-readable tag used by the CLI."""

    kind = "error"


class ConfigError(RandApproxError, ValueError):
    kind = "config_error"


class InputError(RandApproxError, ValueError):
    kind = "input_error"


class ResourceError(RandApproxError):
    kind = "resource_error"


class InsufficientDivergence(RandApproxError):
    """Partial sums never reached the first checkpoint before the cap."""

    kind = "insufficient_divergence"

    def __init__(self, achieved, n_cap: int):
        self.achieved = achieved
        self.n_cap = n_cap
        super().__init__(
            f"partial sum only reached {float(achieved):.6g} (exact {achieved}) by N_cap={n_cap}"
        )

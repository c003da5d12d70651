"""Exception types shared across the package."""


class WorldsheetError(Exception):
    """Base class for all errors raised by this package."""


class ChartError(WorldsheetError):
    """Invalid grid chart construction or usage (bad axis, bad size...)."""


class BackgroundError(WorldsheetError):
    """Invalid background spacetime or metric evaluation failure."""


class EmbeddingError(WorldsheetError):
    """Embedding samples inconsistent with chart or background."""


class DegenerateMetricError(WorldsheetError):
    """Induced metric determinant below the degeneracy threshold.

    Carries the flat index of the worst node so the caller can locate it.
    """

    def __init__(self, message, node=None, value=None):
        super().__init__(message)
        self.node = node
        self.value = value


class FrameError(WorldsheetError):
    """Normal frame construction failed (exhausted reference axes...)."""


class CurveError(WorldsheetError):
    """Generator curve is unusable (cusp, too few samples, not closed)."""


class ConvergenceError(WorldsheetError):
    """Iteration failed to reach its target residual.

    ``history`` holds the residual (or step) record accumulated so far.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class StepInstabilityError(ConvergenceError):
    """Relaxation step kept increasing the area after repeated halving."""


class DeformationError(WorldsheetError):
    """Deformation field inconsistent with its embedding."""


class OracleError(WorldsheetError):
    """Finite-difference oracle inconsistent across step sizes."""


class ConfigError(WorldsheetError):
    """Scenario configuration file missing, malformed, or out of range."""

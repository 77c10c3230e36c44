"""Custom exceptions for the package."""


class BadEnvironmentError(Exception):
    """Exception raised when the environment is not set correctly."""

    def __init__(self, current_environment: str, allowed_environments: set[str]) -> None:
        """Initialise the exception."""
        super().__init__(
            f"Environment {current_environment} not allowed. "
            f"Allowed environments are {allowed_environments}."
        )


class InvalidModelParamsError(Exception):
    """Exception raised when model parameters violate the two-ends constraints."""

    def __init__(self, message: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Invalid model parameters: {message}")


class UnsupportedMeshModeError(ValueError):
    """Exception raised when a model is requested in a mode that cannot be built."""

    def __init__(self, mode: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Mesh mode '{mode}' is not supported by the model builder.")


class DisconnectedModelError(ValueError):
    """Exception raised when a model graph has more than one connected component."""

    def __init__(self, n_components: int) -> None:
        """Initialise the exception."""
        super().__init__(f"Model graph must be connected, found {n_components} components.")


class InvalidSiteError(IndexError):
    """Exception raised when a site index is outside the model."""

    def __init__(self, site: int, n_sites: int) -> None:
        """Initialise the exception."""
        super().__init__(f"Site {site} is not a valid site of a model with {n_sites} sites.")


class InsufficientRangeError(ValueError):
    """Exception raised when a volume regime has too few sample radii."""

    def __init__(self, regime: str, n_radii: int, required: int) -> None:
        """Initialise the exception."""
        super().__init__(
            f"Volume regime '{regime}' has {n_radii} sample radii, at least {required} required."
        )


class NegativePotentialError(ValueError):
    """Exception raised when a potential takes negative values."""

    def __init__(self, min_value: float, site: int) -> None:
        """Initialise the exception."""
        super().__init__(f"Potential must be non-negative, found {min_value:.3e} at site {site}.")


class SpectralSizeError(ValueError):
    """Exception raised when a model is too large for the dense spectral oracle."""

    def __init__(self, n_sites: int, cap: int) -> None:
        """Initialise the exception."""
        super().__init__(f"Model has {n_sites} sites, the spectral size cap is {cap}.")


class SpectralConvergenceError(ArithmeticError):
    """Exception raised when the dense eigensolver fails to converge."""

    def __init__(self, detail: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Eigendecomposition did not converge: {detail}")


class SpectralInvariantError(ArithmeticError):
    """Exception raised when a decomposition breaks orthonormality or residual tolerances."""

    def __init__(self, invariant: str, value: float, tolerance: float) -> None:
        """Initialise the exception."""
        super().__init__(
            f"Spectral invariant '{invariant}' violated: {value:.3e} exceeds {tolerance:.1e}."
        )


class DerivativeOrderError(ValueError):
    """Exception raised when a Gaussian time-derivative order is out of range."""

    def __init__(self, order: int, max_order: int) -> None:
        """Initialise the exception."""
        super().__init__(f"Derivative order {order} not in the supported range 1..{max_order}.")


class SectorViolationError(ValueError):
    """Exception raised when a complex time lies outside the open sector |arg z| < pi/4."""

    def __init__(self, z: complex) -> None:
        """Initialise the exception."""
        super().__init__(f"Complex time {z} is outside the sector |arg z| < pi/4.")


class QuadratureNonConvergenceError(ArithmeticError):
    """Exception raised when a truncated quadrature does not settle."""

    def __init__(self, what: str, last_change: float, tail_estimates: tuple[float, float]) -> None:
        """Initialise the exception."""
        self.last_change = last_change
        self.tail_estimates = tail_estimates
        super().__init__(
            f"Quadrature for {what} did not converge: last change {last_change:.3e}, "
            f"tail estimates (left={tail_estimates[0]:.3e}, right={tail_estimates[1]:.3e})."
        )


class EmptyRegimeError(ValueError):
    """Exception raised when a bound regime has no usable samples."""

    def __init__(self, regime: str) -> None:
        """Initialise the exception."""
        super().__init__(f"No usable samples for regime {regime}.")


class BoundFitPreconditionError(ValueError):
    """Exception raised when kernel samples are too few to fit bound constants."""

    def __init__(self, message: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Bound fit needs more samples: {message}")


class ThresholdError(ValueError):
    """Exception raised when a decomposition threshold is not positive."""

    def __init__(self, threshold: float) -> None:
        """Initialise the exception."""
        super().__init__(f"Threshold must be positive, got {threshold}.")


class CZPreconditionError(ValueError):
    """Exception raised when the root dyadic cube is already above the threshold."""

    def __init__(self, root_average: float, threshold: float) -> None:
        """Initialise the exception."""
        super().__init__(
            f"Root cube average {root_average:.3e} exceeds threshold {threshold:.3e}; "
            "the initial mesh condition |Q| >= ||f||_1 / lambda cannot hold on this chart."
        )


class WhitneyDomainError(ValueError):
    """Exception raised when a Whitney cover is requested for an improper open set."""

    def __init__(self, message: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Whitney cover needs a non-empty proper subset: {message}")


class SerializationVersionError(ValueError):
    """Exception raised when a model file has an unknown version header."""

    def __init__(self, header: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Unsupported model file header: '{header}'.")


class ExperimentCheckError(Exception):
    """Exception raised when an invariant check of an experiment run fails."""

    def __init__(self, check_name: str, detail: str) -> None:
        """Initialise the exception."""
        self.check_name = check_name
        super().__init__(f"Check '{check_name}' failed: {detail}")


class InvalidQuadratureSpecError(Exception):
    """Exception raised when a quadrature window is empty."""

    def __init__(self, v_min: float, v_max: float) -> None:
        """Initialise the exception."""
        super().__init__(f"Quadrature window needs v_min < v_max, got [{v_min}, {v_max}].")


class InvalidRegimeTagError(Exception):
    """Exception raised when a regime tag does not match its region pair."""

    def __init__(self, label: str) -> None:
        """Initialise the exception."""
        super().__init__(f"Regime tag {label} is inconsistent with its regions or time regime.")

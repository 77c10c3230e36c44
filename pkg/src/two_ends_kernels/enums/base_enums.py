"""Enumeration classes for models, schemas and experiments."""

from enum import Enum


class RegionEnum(str, Enum):
    """Region of a site of the two-ends model."""

    BIG_END = "big_end"
    SMALL_END = "small_end"
    CENTER = "center"


class MeshModeEnum(str, Enum):
    """Discretization mode of the manifold."""

    RADIAL_RAY = "radial_ray"
    FULL_MESH = "full_mesh"


class KernelKindEnum(str, Enum):
    """Kind of semigroup kernel."""

    HEAT = "heat"
    POISSON = "poisson"


class BoundSideEnum(str, Enum):
    """Side of a two-sided kernel estimate."""

    UPPER = "upper"
    LOWER = "lower"


class TimeRegimeEnum(str, Enum):
    """Time split used by the heat kernel estimates."""

    SHORT = "t<=1"
    LONG = "t>1"


class QuadratureTransformEnum(str, Enum):
    """Change of variables used by the quadrature engine."""

    LOG_GRID = "log_grid"


class CalculusMethodEnum(str, Enum):
    """Route used to apply a spectral multiplier."""

    ORACLE = "oracle"
    QUADRATURE = "quadrature"


class OperatorKindEnum(str, Enum):
    """Operator assembled for an experiment."""

    LAPLACIAN = "laplacian"
    SCHRODINGER = "schrodinger"


class PotentialKindEnum(str, Enum):
    """Named non-negative potential profiles."""

    CONSTANT = "constant"
    BUMP = "bump"
    RADIAL_DECAY = "radial_decay"


class MultiplierKindEnum(str, Enum):
    """Named Laplace-transform multipliers."""

    CONSTANT = "constant"
    INDICATOR = "indicator"
    IMAGINARY_POWER = "imaginary_power"
    TABLE = "table"


class ExperimentKindEnum(str, Enum):
    """Experiment kinds understood by the runner."""

    VOLUME = "volume"
    HEAT_CHECK = "heat-check"
    POISSON_CHECK = "poisson-check"
    BOUNDS_FIT = "bounds-fit"
    DOMINATION = "domination"
    MULTIPLIER = "multiplier"
    G_FUNCTION = "g-function"
    MAXIMAL = "maximal"
    CZ_DEMO = "cz-demo"
    WHITNEY_DEMO = "whitney-demo"
    WEAK11 = "weak11"

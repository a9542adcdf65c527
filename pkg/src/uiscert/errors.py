"""Exception hierarchy.

Every exception carries a stable ``code`` used by the CLI in its
machine-readable error output.
"""


class UISError(Exception):
    code = "UIS_ERROR"


class ZeroVector(UISError, ValueError):
    code = "ZERO_VECTOR"


class DimensionMismatch(UISError, ValueError):
    code = "DIMENSION_MISMATCH"


class TrivialCoefficient(UISError, ValueError):
    code = "TRIVIAL_COEFFICIENT"


class NotEntangled(UISError, ValueError):
    code = "NOT_ENTANGLED"


class WrongShape(UISError, ValueError):
    code = "WRONG_SHAPE"


# prop5_check reports the same condition under this name
ShapeMismatch = WrongShape


class NotBiseparable(UISError, ValueError):
    code = "NOT_BISEPARABLE"


class NotGenuinelyEntangled(UISError, ValueError):
    code = "NOT_GENUINELY_ENTANGLED"


class MissingStructure(UISError, ValueError):
    """The state lacks the single-product-ray Schmidt structure a check requires."""

    code = "MISSING_STRUCTURE"


class NonOrthonormalBasis(UISError, ValueError):
    code = "NON_ORTHONORMAL_BASIS"


class ConstraintOutsideSubspace(UISError, ValueError):
    code = "CONSTRAINT_OUTSIDE_SUBSPACE"


class IndexOutOfRange(UISError, IndexError):
    code = "INDEX_OUT_OF_RANGE"


class StateFileError(UISError, ValueError):
    code = "MALFORMED_FILE"

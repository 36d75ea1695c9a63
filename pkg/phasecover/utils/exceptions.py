"""
Custom exceptions for the phase-space verification harness
"""


class PhaseCoverError(Exception):
    """Base exception for all phasecover errors"""
    pass


class CarrierError(PhaseCoverError):
    """Raised when an element or function does not belong to the expected carrier"""
    def __init__(self, carrier: str, message: str):
        self.carrier = carrier
        super().__init__(f"Carrier {carrier}: {message}")


class NodeSetError(PhaseCoverError):
    """Raised when a node set is empty or contains duplicates"""
    pass


class PreconditionError(PhaseCoverError):
    """Raised when an operation is called outside its documented preconditions"""
    pass


class NeighborhoodError(PhaseCoverError):
    """Raised when a neighborhood is not symmetric or misses the identity"""
    pass


class WeightError(PhaseCoverError):
    """Raised when a weight is not strictly positive or its family is unknown"""
    pass


class SpaceSpecError(PhaseCoverError):
    """Raised when a solid space description is malformed"""
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"Invalid space parameter {field}: {message}")


class SubgroupError(PhaseCoverError):
    """Raised when a node set is not closed under the group operation"""
    def __init__(self, element, message: str = "node set is not closed under the group operation"):
        self.element = element
        super().__init__(f"{message} (witness {element})")


class CoverageGapError(PhaseCoverError):
    """Raised when translated profiles leave a point of the working window uncovered"""
    def __init__(self, point):
        self.point = point
        super().__init__(f"Partition profiles vanish at {point}; centers are too sparse for the profile width")


class PartitionError(PhaseCoverError):
    """Raised when an exact partition of unity is required but not supplied"""
    pass


class NotAFrameError(PhaseCoverError):
    """Raised when a system fails the lower frame bound"""
    def __init__(self, sigma_min: float, sigma_max: float):
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max
        super().__init__(
            f"System is not a frame: sigma_min={sigma_min:.3e} below cutoff relative to sigma_max={sigma_max:.3e}"
        )


class MaskRejectedError(PhaseCoverError):
    """Raised when a symbol mask does not satisfy the positivity requirements"""
    def __init__(self, message: str):
        super().__init__(f"Mask rejected: {message}")


class ZeroWindowError(PhaseCoverError):
    """Raised when a window has zero norm"""
    pass


class IndexRangeError(PhaseCoverError):
    """Raised when a time/frequency index falls outside its range"""
    def __init__(self, name: str, value: int, bound: int):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value} outside [0, {bound})")


class ConfigValidationError(PhaseCoverError):
    """Raised when an experiment configuration fails validation"""
    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"Invalid config at `{field_path}`: {message}")


class NumericFailureError(PhaseCoverError):
    """Raised when an experiment cannot proceed for numeric reasons"""
    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"Numeric failure in {stage}: {message}")


class MissingBaselineError(PhaseCoverError):
    """Raised when a baseline artifact file is missing"""
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"Missing baseline file: {path}")


class VerificationMismatchError(PhaseCoverError):
    """Raised when a recomputed artifact differs from the baseline"""
    def __init__(self, file: str, row: int, column: str, expected, actual):
        self.file = file
        self.row = row
        self.column = column
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Mismatch in {file} row {row} column {column}: expected {expected!r}, got {actual!r}"
        )

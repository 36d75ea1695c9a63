"""
Pydantic models for experiment configuration
"""

import math
from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PositiveFloat, field_validator, model_validator

from ..utils.exceptions import ConfigValidationError


def _exponent(value):
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    return value


# "inf" is accepted wherever an exponent is expected
Exponent = Annotated[float, BeforeValidator(_exponent)]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=True)


class CarrierConfig(StrictModel):
    """Carrier group Z^d or Z_N^d"""
    kind: Literal["lattice", "cyclic"]
    dim: int = Field(1, ge=1, description="Number of coordinates")
    modulus: Optional[int] = Field(None, ge=1, description="N for Z_N^d; omitted on Z^d")
    v_radius: int = Field(1, ge=0, description="Radius of the box neighborhood V")


class WeightConfig(StrictModel):
    family: Literal["constant", "polynomial", "exponential", "table"] = "constant"
    alpha: float = Field(0.0, description="Exponent of (1+|x|)^alpha")
    beta: float = Field(1.0, gt=0, description="Base of beta^|x|")
    table: List[Tuple[List[int], PositiveFloat]] = Field(
        default_factory=list, description="(element, value) pairs of a table weight"
    )
    default: PositiveFloat = Field(1.0, description="Table weight value off the listed elements")

    @model_validator(mode="after")
    def _table_needs_entries(self):
        if self.family == "table" and not self.table:
            raise ValueError("table weights need at least one (element, value) entry")
        return self


class SpaceConfig(StrictModel):
    """Solid space l^p_v or l^{p,q}_v; the weight defaults to the experiment weight"""
    p: Exponent = Field(description="Inner exponent in [1, inf]; 'inf' accepted")
    q: Optional[Exponent] = Field(None, description="Outer exponent for mixed norms")
    weight: Optional[WeightConfig] = None

    @field_validator("p", "q")
    @classmethod
    def _at_least_one(cls, value):
        if value is not None and not value >= 1.0:
            raise ValueError(f"exponent {value} outside [1, inf]")
        return value


class SystemKind(str, Enum):
    GABOR = "gabor"
    LOCALIZED_FRAME = "localized_frame"
    DELTA = "delta"
    BLOCK = "block"


class SystemConfig(StrictModel):
    """Molecule system family and its parameters"""
    kind: SystemKind
    N: Optional[int] = Field(None, ge=2, description="Signal length for gabor, delta and block systems")
    a: Optional[int] = Field(None, ge=1, description="Time step of the Gabor lattice")
    b: Optional[int] = Field(None, ge=1, description="Frequency step of the Gabor lattice")
    sigma: float = Field(1.0, gt=0, description="Gaussian window spread")
    radius: int = Field(32, ge=1, description="Index range [-R, R] of a localized frame")
    decay: float = Field(0.5, gt=0)
    perturbation: float = Field(0.2, ge=0)


class MaskConfig(StrictModel):
    """Named mask family or dense values on the working window"""
    family: Literal["constant", "half_plane", "cosine", "sign_split", "dense"]
    value: float = 1.0
    offset: float = 0.6
    amplitude: float = 0.3
    axis: int = Field(0, ge=0)
    values: Optional[List[float]] = None


class PartitionConfig(StrictModel):
    profile: Literal["triangular", "raised_cosine", "gaussian_normalized"] = "raised_cosine"
    centers: List[int] = Field(description="Center lattice step per axis")
    width: float = Field(gt=0, description="Profile width W")
    mask: Optional[MaskConfig] = Field(None, description="Turns eta_gamma into theta_gamma = m eta_gamma")


class ExhaustionConfig(StrictModel):
    initial_radius: int = Field(2, ge=0)
    doublings: int = Field(3, ge=0)


class ModulationConfig(StrictModel):
    """Exponent combinations (p, q, s, t) for the modulation-norm harness"""
    combos: List[Tuple[Exponent, Exponent, Exponent, Exponent]] = Field(min_length=1)


class ExperimentConfig(StrictModel):
    """One reproducible experiment"""
    name: str = "experiment"
    seed: int = Field(description="Seed for every random draw")
    trials: int = Field(100, ge=1)
    carrier: CarrierConfig
    weight: WeightConfig = Field(default_factory=WeightConfig)
    spaces: List[SpaceConfig] = Field(min_length=1)
    block_space: SpaceConfig = Field(default_factory=lambda: SpaceConfig(p=2.0))
    system: SystemConfig
    partition: PartitionConfig
    multiplier_mask: MaskConfig = Field(default_factory=lambda: MaskConfig(family="half_plane"))
    exhaustion: ExhaustionConfig = Field(default_factory=ExhaustionConfig)
    modulation: Optional[ModulationConfig] = None

    def check_consistency(self) -> None:
        """Cross-field checks; raises ConfigValidationError with the offending field path"""
        carrier, system = self.carrier, self.system
        if carrier.kind == "cyclic" and carrier.modulus is None:
            raise ConfigValidationError("carrier.modulus", "cyclic carriers need a modulus")
        if carrier.kind == "lattice" and carrier.modulus is not None:
            raise ConfigValidationError("carrier.modulus", "lattice carriers take no modulus")
        expected = {
            SystemKind.GABOR.value: ("cyclic", 2),
            SystemKind.DELTA.value: ("cyclic", 1),
            SystemKind.BLOCK.value: ("cyclic", 1),
            SystemKind.LOCALIZED_FRAME.value: ("lattice", 1),
        }[system.kind]
        if (carrier.kind, carrier.dim) != expected:
            raise ConfigValidationError(
                "carrier", f"{system.kind} systems need a {expected[0]} carrier of dimension {expected[1]}"
            )
        if system.kind != SystemKind.LOCALIZED_FRAME.value:
            if system.N is None:
                raise ConfigValidationError("system.N", f"{system.kind} systems need N")
            if system.N != carrier.modulus:
                raise ConfigValidationError("system.N", f"N={system.N} differs from the carrier modulus {carrier.modulus}")
        if len(self.partition.centers) != carrier.dim:
            raise ConfigValidationError("partition.centers", f"expected {carrier.dim} steps")
        if self.modulation is not None and system.kind != SystemKind.GABOR.value:
            raise ConfigValidationError("modulation", "the modulation harness needs a gabor system")
        for i, space in enumerate(self.spaces + [self.block_space]):
            if space.q is not None and carrier.dim % 2:
                path = f"spaces.{i}.q" if i < len(self.spaces) else "block_space.q"
                raise ConfigValidationError(path, "mixed norms need an even-dimensional carrier")
        weights = [("weight", self.weight)] + [
            (f"spaces.{i}.weight", s.weight) for i, s in enumerate(self.spaces) if s.weight is not None
        ]
        for path, weight in weights:
            for j, (key, _) in enumerate(weight.table):
                if len(key) != carrier.dim:
                    raise ConfigValidationError(f"{path}.table.{j}", f"expected {carrier.dim} coordinates")

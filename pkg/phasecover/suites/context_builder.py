"""
Context Builder Suite - Loads the config and assembles the system, partition and masks
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from ..core.atomic import MoleculeSystem
from ..core.base_suite import BaseSuite
from ..core.cover import PartitionOfUnity, build_bupu, modulate
from ..core.group import GFunc, GroupCarrier, Neighborhood, RelSepSet, Weight, WeightFamily
from ..core.multiplier import SymbolMask, counterexample_block_system, named_mask
from ..core.spaces import SolidSpaceSpec
from ..data.fixtures import FIXTURES, fixture_path
from ..frames.gabor import GaborSystem, gabor_molecule_system
from ..frames.localized import LocalizedFrame, localized_frame, localized_molecule_system
from ..models.experiment_models import ExperimentConfig, MaskConfig, SpaceConfig, WeightConfig
from ..utils.exceptions import ConfigValidationError
from ..utils.serialization import config_hash, round_floats


def load_config(source: Union[str, Path]) -> ExperimentConfig:
    """Parse a config file, or a bundled fixture given by name"""
    path = Path(source)
    if not path.exists():
        if str(source) not in FIXTURES:
            raise ConfigValidationError("config", f"no config file or fixture named {source}")
        path = fixture_path(str(source))
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError("config", f"{path}: invalid JSON ({e})") from e
    return parse_config(document)


def parse_config(document: dict) -> ExperimentConfig:
    try:
        config = ExperimentConfig.model_validate(document)
    except ValidationError as e:
        error = e.errors()[0]
        field_path = ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigValidationError(field_path, error["msg"]) from e
    config.check_consistency()
    return config


def experiment_hash(config: ExperimentConfig) -> str:
    return config_hash(round_floats(config.model_dump()))


def make_weight(spec: WeightConfig, carrier: Optional[GroupCarrier] = None) -> Weight:
    """Weight of a config entry; table keys are reduced to canonical elements of the carrier"""
    if spec.family == "table":
        keys = [carrier.normalize(k) if carrier is not None else tuple(k) for k, _ in spec.table]
        return Weight(WeightFamily.TABLE, table=tuple(zip(keys, (v for _, v in spec.table))), default=spec.default)
    if spec.family == "polynomial":
        return Weight.polynomial(spec.alpha)
    if spec.family == "exponential":
        return Weight.exponential(spec.beta)
    return Weight.constant()


def make_carrier(config: ExperimentConfig) -> GroupCarrier:
    if config.carrier.kind == "cyclic":
        return GroupCarrier.cyclic(config.carrier.modulus, config.carrier.dim)
    return GroupCarrier.lattice(config.carrier.dim)


def make_space(carrier: GroupCarrier, spec: SpaceConfig, w: Weight) -> SolidSpaceSpec:
    v = make_weight(spec.weight, carrier) if spec.weight is not None else w
    return SolidSpaceSpec(carrier, spec.p, spec.q, v, w)


def make_mask(sys: MoleculeSystem, spec: MaskConfig) -> SymbolMask:
    return named_mask(
        sys.window,
        spec.family,
        value=spec.value,
        offset=spec.offset,
        amplitude=spec.amplitude,
        axis=spec.axis,
        values=spec.values,
    )


@dataclass
class ExperimentContext:
    """Everything the analysis suites share"""
    config: ExperimentConfig
    config_hash: str
    carrier: GroupCarrier
    V: Neighborhood
    weight: Weight
    spaces: List[SolidSpaceSpec]
    block_space: SolidSpaceSpec
    system: MoleculeSystem
    partition: PartitionOfUnity
    mask: SymbolMask
    theta: Optional[PartitionOfUnity] = None
    gabor: Optional[GaborSystem] = None
    frame: Optional[LocalizedFrame] = None
    threads: int = 1


class ContextBuilderSuite(BaseSuite):
    """Builds the molecule system, partition of unity and masks named by a config"""

    def __init__(self, threads: int = 1):
        super().__init__("ContextBuilder")
        self.threads = threads

    def _system(self, config: ExperimentConfig, carrier: GroupCarrier):
        spec = config.system
        if spec.kind == "gabor":
            gabor = GaborSystem.gaussian(spec.N, spec.a, spec.b, spec.sigma)
            return gabor_molecule_system(gabor), gabor, None
        if spec.kind == "localized_frame":
            frame = localized_frame(spec.radius, spec.decay, spec.perturbation)
            return localized_molecule_system(frame), None, frame
        if spec.kind == "block":
            sys, _ = counterexample_block_system(spec.N)
            return sys, None, None
        nodes = RelSepSet(carrier, tuple(carrier.elements()))
        deltas = [GFunc.delta(carrier, lam) for lam in nodes]
        return MoleculeSystem.build(nodes, deltas, deltas, canonical=True), None, None

    def process(self, config: ExperimentConfig) -> ExperimentContext:
        self.log(f"Building {config.system.kind} system for {config.name}")
        carrier = make_carrier(config)
        weight = make_weight(config.weight, carrier)
        sys, gabor, frame = self._system(config, carrier)
        window = None if carrier.is_finite else sys.window
        centers = RelSepSet.regular(carrier, config.partition.centers, window=window)
        pu = build_bupu(centers, config.partition.profile, config.partition.width, window=sys.window)
        theta = None
        if config.partition.mask is not None:
            theta = modulate(pu, make_mask(sys, config.partition.mask).m)
        ctx = ExperimentContext(
            config=config,
            config_hash=experiment_hash(config),
            carrier=carrier,
            V=Neighborhood.box(carrier, config.carrier.v_radius),
            weight=weight,
            spaces=[make_space(carrier, s, weight) for s in config.spaces],
            block_space=make_space(carrier, config.block_space, weight),
            system=sys,
            partition=pu,
            mask=make_mask(sys, config.multiplier_mask),
            theta=theta,
            gabor=gabor,
            frame=frame,
            threads=self.threads,
        )
        self.log(f"{len(sys.nodes)} atoms on {carrier.label}, {len(pu)} partition centers, hash {ctx.config_hash}")
        return ctx

"""
Solid mixed-norm spaces, their discrete versions and amalgam norms
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .group import (
    ElementLike,
    GFunc,
    GroupCarrier,
    Neighborhood,
    RelSepSet,
    Side,
    Weight,
    Window,
    convolve,
    involute,
)
from ..models.report_models import AmalgamRatioReport
from ..utils.config import SAMPLE_RADIUS
from ..utils.exceptions import CarrierError, NodeSetError, SpaceSpecError

logger = logging.getLogger(__name__)


def _check_exponent(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < 1.0:
        raise SpaceSpecError(name, f"exponent {value} outside [1, inf]")
    return value


def exponent_label(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def lp_norm(values: np.ndarray, p: float, axis=None) -> np.ndarray:
    """l^p norm of |values| over `axis` (all axes when None); sup for p = inf, 0 for empty input"""
    a = np.abs(values)
    if a.size == 0:
        return np.float64(0.0)
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1.0:
        return a.sum(axis=axis)
    return (a ** p).sum(axis=axis) ** (1.0 / p)


@dataclass(frozen=True)
class SolidSpaceSpec:
    """Weighted l^p_v, or mixed l^{p,q}_v when `mixed` is set.

    Mixed norms split the coordinates in half: the inner l^p sum runs over the
    first half (time), the outer l^q over the second half (frequency).
    `w` is the reference admissible weight used by weak/strong amalgams.
    """
    carrier: GroupCarrier
    p: float = 2.0
    q: Optional[float] = None
    v: Weight = field(default_factory=Weight)
    w: Weight = field(default_factory=Weight)

    def __post_init__(self):
        object.__setattr__(self, "p", _check_exponent("p", self.p))
        if self.q is not None:
            object.__setattr__(self, "q", _check_exponent("q", self.q))
            if self.carrier.dim % 2:
                raise SpaceSpecError("q", f"mixed norms need an even-dimensional carrier, got {self.carrier.label}")

    @property
    def mixed(self) -> bool:
        return self.q is not None

    @property
    def name(self) -> str:
        if self.mixed:
            return f"l{exponent_label(self.p)},{exponent_label(self.q)}"
        return f"l{exponent_label(self.p)}"

    @property
    def q_value(self) -> float:
        return self.q if self.mixed else self.p

    def with_exponents(self, p: float, q: Optional[float] = None) -> "SolidSpaceSpec":
        return SolidSpaceSpec(self.carrier, p, q, self.v, self.w)


def _check_carrier(f: GFunc, E: SolidSpaceSpec) -> None:
    if f.carrier != E.carrier:
        raise CarrierError(f.carrier.label, f"space declared on {E.carrier.label}")


def space_norm(f: GFunc, E: SolidSpaceSpec) -> float:
    """||f||_E as an exact finite sum or sup"""
    _check_carrier(f, E)
    if f.is_zero():
        return 0.0
    window = f.window
    weighted = np.abs(f.values) * E.v.evaluate(f.carrier, window.points).reshape(window.shape)
    if not E.mixed:
        return float(lp_norm(weighted, E.p))
    half = f.carrier.dim // 2
    inner = lp_norm(weighted, E.p, axis=tuple(range(half)))
    return float(lp_norm(inner, E.q))


def translation_norm(
    E: SolidSpaceSpec,
    x: ElementLike,
    side: Union[Side, str] = Side.LEFT,
    window: Optional[Window] = None,
) -> float:
    """Operator norm of L_x (left) or R_{-x} (right): sup_y v(y + x)/v(y) over the window"""
    carrier = E.carrier
    x = np.asarray(carrier.normalize(x), dtype=np.int64)
    window = window or Window.box(carrier, SAMPLE_RADIUS)
    # both sides reduce to the same shift on abelian carriers
    Side(side)
    pts = window.points
    ratios = E.v.evaluate(carrier, pts + x) / E.v.evaluate(carrier, pts)
    return float(ratios.max())


def admissibility_constant(E: SolidSpaceSpec, w: Weight, carrier: GroupCarrier, sample_radius: int) -> float:
    """Largest C with w(x) >= C max{u(x), u(-x)} on the sample box"""
    box = np.asarray(carrier.box(sample_radius), dtype=np.int64)
    window = Window.box(carrier, sample_radius)
    ys = window.points
    vy = E.v.evaluate(carrier, ys)
    shifted = (ys[None, :, :] + box[:, None, :]).reshape(-1, carrier.dim)
    u_plus = (E.v.evaluate(carrier, shifted).reshape(len(box), len(ys)) / vy).max(axis=1)
    shifted = (ys[None, :, :] - box[:, None, :]).reshape(-1, carrier.dim)
    u_minus = (E.v.evaluate(carrier, shifted).reshape(len(box), len(ys)) / vy).max(axis=1)
    return float((w.evaluate(carrier, box) / np.maximum(u_plus, u_minus)).min())


def _dilate_window(f: GFunc, V: Neighborhood) -> Window:
    return f.window.grow(V.radius) if not f.carrier.is_finite else f.window


def local_max(f: GFunc, V: Neighborhood, side: Union[Side, str] = Side.LEFT) -> GFunc:
    """f^#(x) = max_{y in V} |f(x + y)|; the right version f_# coincides on abelian carriers"""
    Side(side)
    if f.is_zero():
        return GFunc.zero(f.carrier)
    window = _dilate_window(f, V)
    padded = np.append(np.abs(f.on(window)), 0.0)
    table = window.shift_table(V.array)
    return GFunc.from_window(window, padded[table].max(axis=1))


def local_norm_control(f: GFunc, V: Neighborhood) -> GFunc:
    """K(f)(x) = ||f chi_{x+V}||_1"""
    return convolve(f.abs(), V.indicator())


class AmalgamKind(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    WEAK_LEFT = "weak_left"
    WEAK_RIGHT = "weak_right"
    STRONG = "strong"
    L1_LINF = "l1_linf"
    L1_LINF_INV_W = "l1_linf_inv_w"


def _l1_weighted(f: GFunc, w: Weight) -> float:
    return space_norm(f, SolidSpaceSpec(f.carrier, 1.0, None, w))


def amalgam_norm(
    f: GFunc,
    kind: Union[AmalgamKind, str],
    measure: Union[SolidSpaceSpec, Weight, None],
    V: Neighborhood,
) -> float:
    """Amalgam norm of f.

    left/right take a solid space E (a bare weight w means E = l^1_w); the weak,
    strong and inverse-weight kinds take a weight (a space contributes its
    reference weight). l1_linf ignores `measure`.
    """
    kind = AmalgamKind(kind)
    if isinstance(measure, SolidSpaceSpec):
        E, w = measure, measure.w
    else:
        w = measure if measure is not None else Weight()
        E = SolidSpaceSpec(f.carrier, 1.0, None, w)
    if kind is AmalgamKind.LEFT:
        return space_norm(local_max(f, V, Side.LEFT), E)
    if kind is AmalgamKind.RIGHT:
        return space_norm(involute(local_max(f, V, Side.RIGHT)), E)
    chi = V.indicator()
    if kind is AmalgamKind.WEAK_LEFT:
        return _l1_weighted(local_max(convolve(chi, f.abs()), V, Side.LEFT), w)
    if kind is AmalgamKind.WEAK_RIGHT:
        return _l1_weighted(local_max(convolve(f.abs(), chi), V, Side.RIGHT), w)
    if kind is AmalgamKind.STRONG:
        return _l1_weighted(local_max(local_max(f, V, Side.RIGHT), V, Side.LEFT), w)
    control = local_norm_control(f, V)
    if control.is_zero():
        return 0.0
    if kind is AmalgamKind.L1_LINF:
        return control.max_abs()
    window = control.window
    return float((np.abs(control.values).ravel() / w.evaluate(f.carrier, window.points)).max())


@dataclass(frozen=True, eq=False)
class DiscreteCoeffs:
    """One complex coefficient per node"""
    nodes: RelSepSet
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).ravel()
        if len(values) != len(self.nodes):
            raise NodeSetError(f"{len(values)} coefficients for {len(self.nodes)} nodes")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, nodes: RelSepSet) -> "DiscreteCoeffs":
        return cls(nodes, np.zeros(len(nodes)))

    @classmethod
    def unit(cls, nodes: RelSepSet, node: ElementLike, value: complex = 1.0) -> "DiscreteCoeffs":
        values = np.zeros(len(nodes), dtype=complex)
        values[nodes.index_of(node)] = value
        return cls(nodes, values)

    def __add__(self, other: "DiscreteCoeffs") -> "DiscreteCoeffs":
        return DiscreteCoeffs(self.nodes, self.values + other.values)

    def __mul__(self, scalar) -> "DiscreteCoeffs":
        return DiscreteCoeffs(self.nodes, self.values * complex(scalar))

    __rmul__ = __mul__

    def inner(self, other: "DiscreteCoeffs") -> complex:
        return complex(np.vdot(other.values, self.values))

    def norm2(self) -> float:
        return float(np.linalg.norm(self.values))

    def as_function(self) -> GFunc:
        """Coefficients placed at their nodes"""
        return GFunc.from_dict(self.nodes.carrier, dict(zip(self.nodes.elements, self.values)))


@dataclass(frozen=True)
class VectorCoeffs:
    """One function per node of Gamma"""
    nodes: RelSepSet
    entries: Tuple[GFunc, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if len(entries) != len(self.nodes):
            raise NodeSetError(f"{len(entries)} entries for {len(self.nodes)} nodes")
        carriers = {e.carrier for e in entries}
        if len(carriers) > 1:
            raise CarrierError(entries[0].carrier.label, "vector entries live on different carriers")
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, i: int) -> GFunc:
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> GFunc:
        out = GFunc.zero(self.entries[0].carrier)
        for entry in self.entries:
            out = out + entry
        return out

    def scale(self, t: complex) -> "VectorCoeffs":
        return VectorCoeffs(self.nodes, tuple(e * t for e in self.entries))

    def entry_norms(self, B: SolidSpaceSpec) -> np.ndarray:
        return np.array([space_norm(e, B) for e in self.entries])


def sample_on_nodes(f: GFunc, nodes: RelSepSet) -> DiscreteCoeffs:
    """(f(lambda))_lambda"""
    window = Window.bounding(nodes.carrier, nodes.array)
    vec = f.on(window)
    return DiscreteCoeffs(nodes, vec[window.index(nodes.array)])


def discrete_weighted_norm(c: DiscreteCoeffs, p: float, w: Weight) -> float:
    """(sum |c_lambda|^p w(lambda)^p)^(1/p)"""
    p = _check_exponent("p", p)
    weighted = np.abs(c.values) * w.evaluate(c.nodes.carrier, c.nodes.array)
    return float(lp_norm(weighted, p))


def stack_indicators(c: DiscreteCoeffs, V: Neighborhood) -> GFunc:
    """sum_lambda |c_lambda| chi_{lambda + V}"""
    carrier = c.nodes.carrier
    window = Window.bounding(carrier, c.nodes.array, margin=V.radius)
    acc = np.zeros(window.size)
    moved = (c.nodes.array[:, None, :] + V.array[None, :, :]).reshape(-1, carrier.dim)
    idx = window.index(moved)
    weights = np.repeat(np.abs(c.values), len(V))
    np.add.at(acc, idx, weights)
    return GFunc.from_window(window, acc)


def ed_norm(c: DiscreteCoeffs, E: SolidSpaceSpec, V: Neighborhood) -> float:
    """||sum |c_lambda| chi_{lambda+V}||_E"""
    return space_norm(stack_indicators(c, V), E)


def edb_norm(F: VectorCoeffs, E: SolidSpaceSpec, B: SolidSpaceSpec, V: Neighborhood) -> float:
    """ed_norm of the entrywise B-norms"""
    return ed_norm(DiscreteCoeffs(F.nodes, F.entry_norms(B)), E, V)


def space_family(
    carrier: GroupCarrier,
    exponents: Sequence[Tuple[float, Optional[float]]],
    v: Optional[Weight] = None,
    w: Optional[Weight] = None,
) -> Tuple[SolidSpaceSpec, ...]:
    """Spaces sharing one weight, one per (p, q) pair"""
    v = v or Weight()
    w = w or v
    return tuple(SolidSpaceSpec(carrier, p, q, v, w) for p, q in exponents)


def solidity_excess(f: GFunc, g: GFunc, E: SolidSpaceSpec, V: Neighborhood) -> float:
    """Largest relative growth ||g|| / ||f|| - 1 over the E norm and every amalgam kind.

    Nonpositive up to rounding whenever |g| <= |f| pointwise.
    """
    pairs = [(space_norm(f, E), space_norm(g, E))]
    pairs += [(amalgam_norm(f, kind, E, V), amalgam_norm(g, kind, E, V)) for kind in AmalgamKind]
    return max((ng - nf) / nf if nf > 0 else ng for nf, ng in pairs)


def amalgam_ratios(functions: Sequence[GFunc], w: Weight, V: Neighborhood) -> AmalgamRatioReport:
    """Weak amalgam against l^1_w, and strong/right amalgams against the left one, all with weight w"""
    weak, strong, right = [], [], []
    for f in functions:
        l1 = _l1_weighted(f, w)
        if l1 == 0:
            continue
        left = amalgam_norm(f, AmalgamKind.LEFT, w, V)
        weak.append(amalgam_norm(f, AmalgamKind.WEAK_LEFT, w, V) / l1)
        strong.append(amalgam_norm(f, AmalgamKind.STRONG, w, V) / left)
        right.append(amalgam_norm(f, AmalgamKind.RIGHT, w, V) / left)
    if not weak:
        raise SpaceSpecError("functions", "every function is zero")
    return AmalgamRatioReport(
        trials=len(weak),
        weak_min=min(weak), weak_max=max(weak),
        strong_min=min(strong), strong_max=max(strong),
        right_min=min(right), right_max=max(right),
    )


def product_embedding_constant(pairs: Sequence[Tuple[GFunc, GFunc]], V: Neighborhood) -> float:
    """max ||f g||_1 / (||f||_{W(l^1, l^inf)} ||g||_{W(l^inf, l^1)}); at most 1/|V|"""
    worst = 0.0
    for f, g in pairs:
        denom = amalgam_norm(f, AmalgamKind.L1_LINF, None, V) * amalgam_norm(g, AmalgamKind.LEFT, None, V)
        if denom > 0:
            worst = max(worst, space_norm(f * g, SolidSpaceSpec(f.carrier, 1.0)) / denom)
    return worst


def sampling_constant(functions: Sequence[GFunc], nodes: RelSepSet, E: SolidSpaceSpec, V: Neighborhood) -> float:
    """max ||f restricted to nodes||_{E_d} / ||f||_{W(l^inf, E)}; at most the spreadness of the nodes"""
    worst = 0.0
    for f in functions:
        denom = amalgam_norm(f, AmalgamKind.LEFT, E, V)
        if denom > 0:
            worst = max(worst, ed_norm(sample_on_nodes(f, nodes), E, V) / denom)
    return worst

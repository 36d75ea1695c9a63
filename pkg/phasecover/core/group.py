"""
Computable groups, finitely supported functions, weights and relatively separated sets.

Two carriers are supported: the lattice Z^d and the finite cyclic group Z_N^d,
both written additively. The Haar measure is counting measure and the modular
function is identically 1, so every integral below is a finite sum.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import signal

from ..models.report_models import (
    FGLShellReport,
    GRSGeneratorReport,
    GRSReport,
    ModerateReport,
    WeightAdmissibilityReport,
)
from ..utils.config import DEFAULT_SEED, DEFAULT_V_RADIUS, GRS_N_MAX, GRS_TOLERANCE, RANDOM_TRIPLES
from ..utils.exceptions import (
    CarrierError,
    NeighborhoodError,
    NodeSetError,
    PreconditionError,
    SubgroupError,
    WeightError,
)

logger = logging.getLogger(__name__)

Element = Tuple[int, ...]
ElementLike = Union[int, Sequence[int]]

# Largest coordinate magnitude accepted on Z^d
LATTICE_BOUND = 2 ** 31


class CarrierKind(str, Enum):
    LATTICE = "lattice"
    CYCLIC = "cyclic"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class GroupCarrier:
    """Z^d (kind=lattice) or Z_N^d (kind=cyclic)"""
    kind: CarrierKind
    dim: int = 1
    modulus: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CarrierKind(self.kind))
        if self.dim < 1:
            raise CarrierError(self.label, "dimension must be positive")
        if self.kind is CarrierKind.CYCLIC:
            if self.modulus is None or self.modulus < 1:
                raise CarrierError(self.label, "cyclic carriers need a positive modulus")
        elif self.modulus is not None:
            raise CarrierError(self.label, "lattice carriers take no modulus")

    @classmethod
    def lattice(cls, dim: int = 1) -> "GroupCarrier":
        return cls(CarrierKind.LATTICE, dim)

    @classmethod
    def cyclic(cls, modulus: int, dim: int = 1) -> "GroupCarrier":
        return cls(CarrierKind.CYCLIC, dim, modulus)

    @property
    def label(self) -> str:
        if self.kind is CarrierKind.CYCLIC:
            return f"Z_{self.modulus}^{self.dim}"
        return f"Z^{self.dim}"

    @property
    def is_finite(self) -> bool:
        return self.kind is CarrierKind.CYCLIC

    @property
    def order(self) -> Optional[int]:
        return self.modulus ** self.dim if self.is_finite else None

    @property
    def identity(self) -> Element:
        return (0,) * self.dim

    def normalize(self, x: ElementLike) -> Element:
        """Canonical representative of x; raises CarrierError when x is not an element"""
        if isinstance(x, (int, np.integer)):
            coords = (int(x),)
        else:
            coords = tuple(int(c) for c in x)
        if len(coords) != self.dim:
            raise CarrierError(self.label, f"element {coords} has {len(coords)} coordinates, expected {self.dim}")
        if self.is_finite:
            return tuple(c % self.modulus for c in coords)
        if any(abs(c) > LATTICE_BOUND for c in coords):
            raise CarrierError(self.label, f"element {coords} outside the representation range")
        return coords

    def normalize_points(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        if self.is_finite:
            return np.mod(pts, self.modulus)
        if pts.size and np.abs(pts).max() > LATTICE_BOUND:
            raise CarrierError(self.label, "points outside the representation range")
        return pts

    def product(self, x: ElementLike, y: ElementLike) -> Element:
        x, y = self.normalize(x), self.normalize(y)
        return self.normalize(tuple(a + b for a, b in zip(x, y)))

    def inverse(self, x: ElementLike) -> Element:
        return self.normalize(tuple(-c for c in self.normalize(x)))

    def power(self, x: ElementLike, n: int) -> Element:
        return self.normalize(tuple(n * c for c in self.normalize(x)))

    def norms(self, points) -> np.ndarray:
        """Euclidean length |x| of the centered representative, row-wise"""
        pts = self.normalize_points(points)
        if self.is_finite:
            half = self.modulus // 2
            pts = np.mod(pts + half, self.modulus) - half
        return np.sqrt(np.sum(pts.astype(float) ** 2, axis=1))

    def norm(self, x: ElementLike) -> float:
        return float(self.norms([self.normalize(x)])[0])

    def elements(self) -> Iterator[Element]:
        if not self.is_finite:
            raise CarrierError(self.label, "cannot enumerate an infinite carrier")
        return itertools.product(range(self.modulus), repeat=self.dim)

    def box(self, radius: int) -> List[Element]:
        """Sorted elements of the centered box {-r..r}^d (reduced mod N on cyclic carriers)"""
        if radius < 0:
            raise PreconditionError(f"box radius must be nonnegative, got {radius}")
        side = range(-radius, radius + 1)
        return sorted({self.normalize(x) for x in itertools.product(side, repeat=self.dim)})

    def check_group_axioms(self, samples: int = RANDOM_TRIPLES, seed: int = DEFAULT_SEED) -> bool:
        """Associativity, identity and inverse on all triples of a small cyclic group or on random triples"""
        if self.is_finite and self.order <= 16:
            triples = itertools.product(list(self.elements()), repeat=3)
        else:
            rng = np.random.default_rng(seed)
            span = self.modulus if self.is_finite else 50
            raw = rng.integers(-span, span + 1, size=(samples, 3, self.dim))
            triples = [tuple(self.normalize(p) for p in row) for row in raw]
        e = self.identity
        for x, y, z in triples:
            if self.product(self.product(x, y), z) != self.product(x, self.product(y, z)):
                return False
            if self.product(x, e) != x or self.product(e, x) != x:
                return False
            if self.product(x, self.inverse(x)) != e:
                return False
        return True


@dataclass(frozen=True)
class Window:
    """Box of elements offset + [0, shape); on cyclic carriers always the whole group"""
    carrier: GroupCarrier
    offset: Element
    shape: Tuple[int, ...]

    @classmethod
    def full(cls, carrier: GroupCarrier) -> "Window":
        if not carrier.is_finite:
            raise CarrierError(carrier.label, "infinite carriers have no full window")
        return cls(carrier, carrier.identity, (carrier.modulus,) * carrier.dim)

    @classmethod
    def box(cls, carrier: GroupCarrier, radius: int) -> "Window":
        if carrier.is_finite:
            return cls.full(carrier)
        return cls(carrier, (-radius,) * carrier.dim, (2 * radius + 1,) * carrier.dim)

    @classmethod
    def empty(cls, carrier: GroupCarrier) -> "Window":
        if carrier.is_finite:
            return cls.full(carrier)
        return cls(carrier, carrier.identity, (0,) * carrier.dim)

    @classmethod
    def bounding(cls, carrier: GroupCarrier, points, margin: int = 0) -> "Window":
        if carrier.is_finite:
            return cls.full(carrier)
        pts = carrier.normalize_points(points)
        if len(pts) == 0:
            return cls.empty(carrier)
        lo = pts.min(axis=0) - margin
        hi = pts.max(axis=0) + margin
        return cls(carrier, tuple(int(c) for c in lo), tuple(int(c) for c in hi - lo + 1))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape)) if self.shape else 0

    @cached_property
    def points(self) -> np.ndarray:
        """Window elements in C order, one row per element"""
        if self.size == 0:
            return np.zeros((0, self.carrier.dim), dtype=np.int64)
        grid = np.indices(self.shape).reshape(self.carrier.dim, -1).T
        return grid.astype(np.int64) + np.asarray(self.offset, dtype=np.int64)

    def elements(self) -> List[Element]:
        return [tuple(int(c) for c in row) for row in self.points]

    def index(self, points) -> np.ndarray:
        """Flat window index of each point, -1 for points outside the window"""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.carrier.dim)
        out = np.full(len(pts), -1, dtype=np.int64)
        if self.size == 0 or len(pts) == 0:
            return out
        if self.carrier.is_finite:
            return np.ravel_multi_index(tuple(np.mod(pts, self.carrier.modulus).T), self.shape).astype(np.int64)
        rel = pts - np.asarray(self.offset, dtype=np.int64)
        inside = np.all((rel >= 0) & (rel < np.asarray(self.shape)), axis=1)
        if inside.any():
            out[inside] = np.ravel_multi_index(tuple(rel[inside].T), self.shape)
        return out

    def contains(self, x: ElementLike) -> bool:
        return bool(self.index([self.carrier.normalize(x)])[0] >= 0)

    def union(self, other: "Window") -> "Window":
        if self.carrier.is_finite or other.size == 0:
            return self
        if self.size == 0:
            return other
        lo = np.minimum(self.offset, other.offset)
        hi = np.maximum(np.add(self.offset, self.shape), np.add(other.offset, other.shape))
        return Window(self.carrier, tuple(int(c) for c in lo), tuple(int(c) for c in hi - lo))

    def grow(self, margin: int) -> "Window":
        if self.carrier.is_finite:
            return self
        return Window(
            self.carrier,
            tuple(c - margin for c in self.offset),
            tuple(s + 2 * margin for s in self.shape),
        )

    def shift_table(self, shifts) -> np.ndarray:
        """Table T[i, k] = index of points[i] + shifts[k], -1 when that lands outside"""
        sh = np.asarray(shifts, dtype=np.int64).reshape(-1, self.carrier.dim)
        moved = self.points[:, None, :] + sh[None, :, :]
        return self.index(moved.reshape(-1, self.carrier.dim)).reshape(self.size, len(sh))


def _trim(offset: np.ndarray, values: np.ndarray) -> Tuple[Element, np.ndarray]:
    nz = np.nonzero(values)
    if len(nz[0]) == 0:
        return (0,) * values.ndim, np.zeros((0,) * values.ndim, dtype=complex)
    lo = [int(a.min()) for a in nz]
    hi = [int(a.max()) + 1 for a in nz]
    trimmed = values[tuple(slice(a, b) for a, b in zip(lo, hi))]
    return tuple(int(o) + a for o, a in zip(offset, lo)), trimmed


@dataclass(frozen=True, eq=False)
class GFunc:
    """Finitely supported complex function on a carrier, stored on its bounding box.

    Lattice functions are trimmed to the box of their nonzero values at construction
    (exact zeros never count as support). Cyclic functions are stored densely.
    """
    carrier: GroupCarrier
    offset: Element
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if self.carrier.is_finite:
            expected = (self.carrier.modulus,) * self.carrier.dim
            if values.shape != expected:
                raise CarrierError(self.carrier.label, f"dense values of shape {values.shape}, expected {expected}")
            offset = self.carrier.identity
        else:
            if values.ndim != self.carrier.dim:
                raise CarrierError(self.carrier.label, f"values of dimension {values.ndim}, expected {self.carrier.dim}")
            offset, values = _trim(np.asarray(self.offset, dtype=np.int64), values)
            if values.size:
                self.carrier.normalize(offset)
                self.carrier.normalize(tuple(o + s - 1 for o, s in zip(offset, values.shape)))
        values.setflags(write=False)
        object.__setattr__(self, "offset", tuple(offset))
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls, carrier: GroupCarrier) -> "GFunc":
        if carrier.is_finite:
            return cls(carrier, carrier.identity, np.zeros((carrier.modulus,) * carrier.dim))
        return cls(carrier, carrier.identity, np.zeros((0,) * carrier.dim))

    @classmethod
    def from_dict(cls, carrier: GroupCarrier, mapping: Mapping) -> "GFunc":
        items = [(carrier.normalize(k), complex(v)) for k, v in mapping.items()]
        if not items:
            return cls.zero(carrier)
        window = Window.bounding(carrier, [k for k, _ in items])
        flat = np.zeros(window.size, dtype=complex)
        idx = window.index([k for k, _ in items])
        np.add.at(flat, idx, [v for _, v in items])
        return cls.from_window(window, flat)

    @classmethod
    def delta(cls, carrier: GroupCarrier, x: ElementLike = None, value: complex = 1.0) -> "GFunc":
        x = carrier.identity if x is None else x
        return cls.from_dict(carrier, {carrier.normalize(x): value})

    @classmethod
    def indicator(cls, carrier: GroupCarrier, elements: Iterable[ElementLike], value: complex = 1.0) -> "GFunc":
        return cls.from_dict(carrier, {carrier.normalize(e): value for e in elements})

    @classmethod
    def from_window(cls, window: Window, vector) -> "GFunc":
        arr = np.asarray(vector, dtype=complex).reshape(window.shape)
        return cls(window.carrier, window.offset, arr)

    @classmethod
    def from_triples(cls, carrier: GroupCarrier, triples: Sequence) -> "GFunc":
        return cls.from_dict(carrier, {tuple(e): complex(re, im) for e, re, im in triples})

    @property
    def window(self) -> Window:
        return Window(self.carrier, self.offset, self.values.shape)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def support(self) -> List[Element]:
        idx = np.argwhere(self.values != 0) + np.asarray(self.offset, dtype=np.int64)
        return [tuple(int(c) for c in row) for row in idx]

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.values))

    def items(self) -> List[Tuple[Element, complex]]:
        return [(x, self(x)) for x in self.support()]

    def __call__(self, x: ElementLike) -> complex:
        i = self.window.index([self.carrier.normalize(x)])[0]
        return complex(self.values.ravel()[i]) if i >= 0 else 0j

    def on(self, window: Window) -> np.ndarray:
        """Values at the window points (restriction to the window)"""
        out = np.zeros(window.size, dtype=complex)
        if self.values.size == 0 or window.size == 0:
            return out
        idx = window.index(self.window.points)
        keep = idx >= 0
        out[idx[keep]] = self.values.ravel()[keep]
        return out

    def _pointwise(self, other: "GFunc", op) -> "GFunc":
        if other.carrier != self.carrier:
            raise CarrierError(self.carrier.label, f"cannot combine with a function on {other.carrier.label}")
        window = self.window.union(other.window)
        return GFunc.from_window(window, op(self.on(window), other.on(window)))

    def __add__(self, other: "GFunc") -> "GFunc":
        return self._pointwise(other, np.add)

    def __sub__(self, other: "GFunc") -> "GFunc":
        return self._pointwise(other, np.subtract)

    def __neg__(self) -> "GFunc":
        return GFunc(self.carrier, self.offset, -self.values)

    def __mul__(self, other) -> "GFunc":
        if isinstance(other, GFunc):
            return self._pointwise(other, np.multiply)
        return GFunc(self.carrier, self.offset, self.values * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "GFunc":
        return GFunc(self.carrier, self.offset, self.values / complex(scalar))

    def abs(self) -> "GFunc":
        return GFunc(self.carrier, self.offset, np.abs(self.values))

    def conj(self) -> "GFunc":
        return GFunc(self.carrier, self.offset, np.conj(self.values))

    def maximum(self, other: "GFunc") -> "GFunc":
        """Pointwise max of the moduli"""
        return self._pointwise(other, lambda a, b: np.maximum(np.abs(a), np.abs(b)))

    def norm2(self) -> float:
        return float(np.linalg.norm(self.values.ravel()))

    def max_abs(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def inner(self, other: "GFunc") -> complex:
        """<f, g> = sum f(x) conj(g(x))"""
        window = self.window.union(other.window)
        return complex(np.vdot(other.on(window), self.on(window)))

    def allclose(self, other: "GFunc", atol: float = 1e-12) -> bool:
        window = self.window.union(other.window)
        return bool(np.allclose(self.on(window), other.on(window), rtol=0.0, atol=atol))

    def to_triples(self) -> List[list]:
        """Sparse (element, re, im) triples for JSON documents"""
        return [[list(x), v.real, v.imag] for x, v in self.items()]


def _check_same_carrier(f: GFunc, g: GFunc) -> None:
    if f.carrier != g.carrier:
        raise CarrierError(f.carrier.label, f"carrier mismatch with {g.carrier.label}")


def _axes(carrier: GroupCarrier) -> Tuple[int, ...]:
    return tuple(range(carrier.dim))


def translate(f: GFunc, x: ElementLike, side: Union[Side, str] = Side.LEFT) -> GFunc:
    """L_x f(y) = f(y - x) (left) or R_x f(y) = f(y + x) (right)"""
    carrier = f.carrier
    x = np.asarray(carrier.normalize(x), dtype=np.int64)
    shift = x if Side(side) is Side.LEFT else -x
    if carrier.is_finite:
        return GFunc(carrier, carrier.identity, np.roll(f.values, tuple(int(s) for s in shift), axis=_axes(carrier)))
    if f.is_zero():
        return f
    return GFunc(carrier, tuple(int(c) for c in np.asarray(f.offset) + shift), f.values)


def involute(f: GFunc) -> GFunc:
    """f^v(x) = f(-x)"""
    carrier = f.carrier
    flipped = np.flip(f.values, axis=_axes(carrier))
    if carrier.is_finite:
        return GFunc(carrier, carrier.identity, np.roll(flipped, 1, axis=_axes(carrier)))
    if f.is_zero():
        return f
    offset = tuple(-(o + s - 1) for o, s in zip(f.offset, f.values.shape))
    return GFunc(carrier, offset, flipped)


def convolve(f: GFunc, g: GFunc) -> GFunc:
    """(f*g)(x) = sum_y f(y) g(x - y), summed directly"""
    _check_same_carrier(f, g)
    carrier = f.carrier
    if f.is_zero() or g.is_zero():
        return GFunc.zero(carrier)
    if not carrier.is_finite:
        values = signal.convolve(f.values, g.values, mode="full", method="direct")
        return GFunc(carrier, tuple(a + b for a, b in zip(f.offset, g.offset)), values)
    out = np.zeros_like(g.values)
    for idx in np.argwhere(f.values != 0):
        out += f.values[tuple(idx)] * np.roll(g.values, tuple(int(i) for i in idx), axis=_axes(carrier))
    return GFunc(carrier, carrier.identity, out)


def convolve_fft(f: GFunc, g: GFunc) -> GFunc:
    """FFT-based convolution, independent of `convolve`"""
    _check_same_carrier(f, g)
    carrier = f.carrier
    if f.is_zero() or g.is_zero():
        return GFunc.zero(carrier)
    if carrier.is_finite:
        axes = _axes(carrier)
        values = np.fft.ifftn(np.fft.fftn(f.values, axes=axes) * np.fft.fftn(g.values, axes=axes), axes=axes)
        return GFunc(carrier, carrier.identity, values)
    values = signal.fftconvolve(f.values, g.values, mode="full")
    return GFunc(carrier, tuple(a + b for a, b in zip(f.offset, g.offset)), values)


@dataclass(frozen=True)
class Neighborhood:
    """Finite symmetric set V containing the identity"""
    carrier: GroupCarrier
    elements: FrozenSet[Element]

    def __post_init__(self):
        elements = frozenset(self.carrier.normalize(v) for v in self.elements)
        if self.carrier.identity not in elements:
            raise NeighborhoodError(f"neighborhood on {self.carrier.label} must contain the identity")
        for v in elements:
            if self.carrier.inverse(v) not in elements:
                raise NeighborhoodError(f"neighborhood is not symmetric: {v} present, inverse missing")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def box(cls, carrier: GroupCarrier, radius: int = DEFAULT_V_RADIUS) -> "Neighborhood":
        return cls(carrier, frozenset(carrier.box(radius)))

    @classmethod
    def trivial(cls, carrier: GroupCarrier) -> "Neighborhood":
        return cls(carrier, frozenset([carrier.identity]))

    def sorted(self) -> List[Element]:
        return sorted(self.elements)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.sorted(), dtype=np.int64).reshape(-1, self.carrier.dim)

    @property
    def radius(self) -> int:
        """Smallest r with V inside the centered box of radius r"""
        half = self.carrier.modulus // 2 if self.carrier.is_finite else None
        pts = self.array
        if half is not None:
            pts = np.mod(pts + half, self.carrier.modulus) - half
        return int(np.abs(pts).max())

    def product(self, other: "Neighborhood") -> "Neighborhood":
        return Neighborhood(
            self.carrier,
            frozenset(self.carrier.product(a, b) for a in self.elements for b in other.elements),
        )

    def indicator(self) -> GFunc:
        return GFunc.indicator(self.carrier, self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.sorted())

    def __contains__(self, x) -> bool:
        return self.carrier.normalize(x) in self.elements


class WeightFamily(str, Enum):
    CONSTANT = "constant"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"
    TABLE = "table"


@dataclass(frozen=True)
class Weight:
    """Positive weight: 1, (1+|x|)^alpha, beta^|x| or a lookup table with a default"""
    family: WeightFamily = WeightFamily.CONSTANT
    alpha: float = 0.0
    beta: float = 1.0
    table: Tuple[Tuple[Element, float], ...] = ()
    default: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", WeightFamily(self.family))
        except ValueError as e:
            raise WeightError(f"Unknown weight family: {self.family}") from e
        if self.family is WeightFamily.EXPONENTIAL and self.beta <= 0:
            raise WeightError(f"exponential base must be positive, got {self.beta}")
        if self.default <= 0 or any(v <= 0 for _, v in self.table):
            raise WeightError("table weights must be strictly positive")

    @classmethod
    def constant(cls) -> "Weight":
        return cls()

    @classmethod
    def polynomial(cls, alpha: float) -> "Weight":
        return cls(WeightFamily.POLYNOMIAL, alpha=alpha)

    @classmethod
    def exponential(cls, beta: float) -> "Weight":
        return cls(WeightFamily.EXPONENTIAL, beta=beta)

    @property
    def name(self) -> str:
        if self.family is WeightFamily.CONSTANT:
            return "1"
        if self.family is WeightFamily.POLYNOMIAL:
            return f"poly({self.alpha:g})"
        if self.family is WeightFamily.EXPONENTIAL:
            return f"exp({self.beta:g})"
        return "table"

    @cached_property
    def _lookup(self) -> Dict[Element, float]:
        return {tuple(int(c) for c in k): float(v) for k, v in self.table}

    def evaluate(self, carrier: GroupCarrier, points) -> np.ndarray:
        pts = carrier.normalize_points(points)
        if self.family is WeightFamily.CONSTANT:
            values = np.ones(len(pts))
        elif self.family is WeightFamily.POLYNOMIAL:
            values = (1.0 + carrier.norms(pts)) ** self.alpha
        elif self.family is WeightFamily.EXPONENTIAL:
            values = self.beta ** carrier.norms(pts)
        else:
            lookup = self._lookup
            values = np.array([lookup.get(tuple(int(c) for c in row), self.default) for row in pts], dtype=float)
        if values.size and (not np.all(np.isfinite(values)) or values.min() <= 0):
            raise WeightError(f"weight {self.name} is not strictly positive and finite on {carrier.label}")
        return values

    def value(self, carrier: GroupCarrier, x: ElementLike) -> float:
        return float(self.evaluate(carrier, [carrier.normalize(x)])[0])

    def as_function(self, window: Window) -> GFunc:
        return GFunc.from_window(window, self.evaluate(window.carrier, window.points))


def check_weight_admissible(w: Weight, carrier: GroupCarrier, sample_radius: int, space=None) -> WeightAdmissibilityReport:
    """Check submultiplicativity and symmetry on every pair of the sample box.

    When a solid space is given, also compute the largest C with
    w(x) >= C max{u(x), u(-x), v(x), v(-x)} over the box.
    """
    if not carrier.is_finite and sample_radius > LATTICE_BOUND // 2:
        raise PreconditionError(f"sample radius {sample_radius} outside the carrier range")
    pts = np.asarray(carrier.box(sample_radius), dtype=np.int64)
    wv = w.evaluate(carrier, pts)
    sums = (pts[:, None, :] + pts[None, :, :]).reshape(-1, carrier.dim)
    ratios = w.evaluate(carrier, sums).reshape(len(pts), len(pts)) / np.outer(wv, wv)
    worst = float(ratios.max())
    symmetric = bool(np.allclose(wv, w.evaluate(carrier, -pts), rtol=1e-12, atol=0.0))
    constant = None
    if space is not None:
        from .spaces import admissibility_constant
        constant = admissibility_constant(space, w, carrier, sample_radius)
    report = WeightAdmissibilityReport(
        weight=w.name,
        submultiplicative=worst <= 1.0 + 1e-12,
        symmetric=symmetric,
        worst_ratio=worst,
        checked_pairs=len(pts) ** 2,
        admissibility_constant=constant,
    )
    if not (report.submultiplicative and report.symmetric):
        logger.warning(f"Weight {w.name} fails admissibility on {carrier.label}: worst ratio {worst:.6g}")
    return report


def check_moderate(v: Weight, w: Weight, carrier: GroupCarrier, sample_radius: int) -> ModerateReport:
    """Smallest C' with v(x+y) <= C' w(x) v(y) on the sample box"""
    pts = np.asarray(carrier.box(sample_radius), dtype=np.int64)
    vv = v.evaluate(carrier, pts)
    wv = w.evaluate(carrier, pts)
    sums = (pts[:, None, :] + pts[None, :, :]).reshape(-1, carrier.dim)
    ratios = v.evaluate(carrier, sums).reshape(len(pts), len(pts)) / np.outer(wv, vv)
    return ModerateReport(weight=v.name, reference=w.name, constant=float(ratios.max()), checked_pairs=len(pts) ** 2)


def check_grs(
    w: Weight,
    carrier: GroupCarrier,
    generators: Sequence[ElementLike],
    n_max: int = GRS_N_MAX,
    tolerance: float = GRS_TOLERANCE,
) -> GRSReport:
    """Sequence w(n*g)^(1/n), n <= n_max, per generator with a tail verdict.

    Polynomial weights converge to 1 slowly: (1+|x|) has tail 65^(1/64) ~ 1.067 at the
    default n_max and fails the check. Pass n_max >= 256 (INVARIANT_N_MAX) for them,
    which keeps (1+|x|)^alpha below 1 + GRS_TOLERANCE up to alpha = 2.
    """
    if n_max < 2:
        raise PreconditionError(f"n_max must be at least 2, got {n_max}")
    rows = []
    n = np.arange(1, n_max + 1)
    for g in generators:
        g = carrier.normalize(g)
        pts = n[:, None] * np.asarray(g, dtype=np.int64)[None, :]
        values = w.evaluate(carrier, pts) ** (1.0 / n)
        rows.append(GRSGeneratorReport(
            generator=list(g),
            values=[float(x) for x in values],
            tail=float(values[-1]),
            passes=bool(values[-1] < 1.0 + tolerance),
        ))
    report = GRSReport(weight=w.name, n_max=n_max, tolerance=tolerance, generators=rows)
    if not report.passes:
        logger.warning(f"Weight {w.name} fails the GRS tail check at n={n_max}")
    return report


def check_fgl_shells(
    w: Weight,
    carrier: GroupCarrier,
    generators: Sequence[ElementLike],
    n_max: int = 16,
    tolerance: float = GRS_TOLERANCE,
) -> FGLShellReport:
    """Growth of w along the word-length shells of the subgroup generated by `generators`"""
    if n_max < 2:
        raise PreconditionError(f"n_max must be at least 2, got {n_max}")
    gens = {carrier.identity}
    for g in generators:
        gens.add(carrier.normalize(g))
        gens.add(carrier.inverse(g))
    step = np.asarray(sorted(gens), dtype=np.int64)
    ball = {carrier.identity}
    shell_ratios: List[float] = []
    roots: List[float] = []
    for n in range(1, n_max + 1):
        current = np.asarray(sorted(ball), dtype=np.int64)
        grown = carrier.normalize_points((current[:, None, :] + step[None, :, :]).reshape(-1, carrier.dim))
        new_ball = {tuple(int(c) for c in row) for row in grown}
        shell = new_ball - ball
        ball = new_ball
        roots.append(float(w.evaluate(carrier, sorted(ball)).max() ** (1.0 / n)))
        if shell:
            values = w.evaluate(carrier, sorted(shell))
            shell_ratios.append(float(values.max() / values.min()))
        else:
            shell_ratios.append(1.0)
    return FGLShellReport(
        weight=w.name,
        n_max=n_max,
        shell_ratios=shell_ratios,
        ball_roots=roots,
        shell_ratio_max=max(shell_ratios),
        passes=roots[-1] < 1.0 + tolerance,
    )


def spreadness(nodes: Iterable[ElementLike], V: Neighborhood) -> int:
    """max over x of #(nodes in x + V); x ranges over nodes - V"""
    carrier = V.carrier
    elements = {carrier.normalize(x) for x in nodes}
    if not elements:
        raise NodeSetError("spreadness of an empty node set")
    counts = Counter(
        carrier.product(lam, carrier.inverse(v)) for lam in elements for v in V.elements
    )
    return max(counts.values())


def is_v_dense(nodes: Iterable[ElementLike], V: Neighborhood, window: Window) -> bool:
    """True when nodes + V covers every point of the window"""
    pts = np.asarray([V.carrier.normalize(x) for x in nodes], dtype=np.int64).reshape(-1, V.carrier.dim)
    covered = np.zeros(window.size, dtype=bool)
    idx = window.index((pts[:, None, :] + V.array[None, :, :]).reshape(-1, V.carrier.dim))
    covered[idx[idx >= 0]] = True
    return bool(covered.all())


@dataclass(frozen=True)
class RelSepSet:
    """Ordered node set without duplicates, with its spreadness relative to a neighborhood"""
    carrier: GroupCarrier
    elements: Tuple[Element, ...]
    neighborhood: Optional[Neighborhood] = None
    rho: int = field(init=False)

    def __post_init__(self):
        elements = tuple(self.carrier.normalize(x) for x in self.elements)
        if not elements:
            raise NodeSetError("node set must be nonempty")
        if len(set(elements)) != len(elements):
            dup = next(x for x, c in Counter(elements).items() if c > 1)
            raise NodeSetError(f"duplicate node {dup}")
        V = self.neighborhood or Neighborhood.box(self.carrier)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "neighborhood", V)
        object.__setattr__(self, "rho", spreadness(elements, V))

    @classmethod
    def regular(
        cls,
        carrier: GroupCarrier,
        steps: Sequence[int],
        window: Optional[Window] = None,
        neighborhood: Optional[Neighborhood] = None,
    ) -> "RelSepSet":
        """Nodes step*Z per axis: the subgroup on Z_N^d, its points inside `window` on Z^d"""
        steps = [int(s) for s in steps]
        if len(steps) != carrier.dim or min(steps) < 1:
            raise CarrierError(carrier.label, f"invalid lattice steps {steps}")
        if carrier.is_finite:
            if any(carrier.modulus % s for s in steps):
                raise CarrierError(carrier.label, f"steps {steps} must divide {carrier.modulus}")
            axes = [range(0, carrier.modulus, s) for s in steps]
            return cls(carrier, tuple(itertools.product(*axes)), neighborhood)
        if window is None:
            raise PreconditionError("lattice node sets need a window")
        pts = window.points
        keep = np.all(np.mod(pts, np.asarray(steps)) == 0, axis=1)
        return cls(carrier, tuple(tuple(int(c) for c in row) for row in pts[keep]), neighborhood)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __getitem__(self, i: int) -> Element:
        return self.elements[i]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64).reshape(-1, self.carrier.dim)

    @cached_property
    def _positions(self) -> Dict[Element, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def index_of(self, x: ElementLike) -> int:
        return self._positions[self.carrier.normalize(x)]

    def __contains__(self, x) -> bool:
        return self.carrier.normalize(x) in self._positions

    def subgroup_witness(self) -> Optional[Element]:
        """An element of (nodes + nodes) or -nodes missing from the node set, inside the node window"""
        box = Window.bounding(self.carrier, self.array)
        member = np.zeros(box.size, dtype=bool)
        member[box.index(self.array)] = True
        candidates = np.concatenate([
            (self.array[:, None, :] + self.array[None, :, :]).reshape(-1, self.carrier.dim),
            -self.array,
        ])
        candidates = self.carrier.normalize_points(candidates)
        idx = box.index(candidates)
        missing = (idx >= 0) & ~member[np.maximum(idx, 0)]
        if missing.any():
            return tuple(int(c) for c in candidates[np.argmax(missing)])
        return None

    def check_subgroup(self) -> None:
        witness = self.subgroup_witness()
        if witness is not None:
            raise SubgroupError(witness)

"""
Discrete Gabor systems on Z_N: time-frequency shifts, the STFT and its adjoint,
canonical dual windows, localization operators and the molecule system the STFT
induces on the time-frequency plane Z_N x Z_N.

The time-frequency plane stores time on axis 0 and frequency on axis 1.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.atomic import MoleculeSystem, tight_envelope
from ..core.cover import PartitionOfUnity
from ..core.group import GFunc, GroupCarrier, RelSepSet, Weight
from ..core.spaces import SolidSpaceSpec, exponent_label, lp_norm, space_norm
from ..models.report_models import EquivalenceRow, FrameBounds
from ..utils.config import DEFAULT_SEED, DEFAULT_TRIALS, DEFAULT_WINDOW_SIGMA, FRAME_CUTOFF, MIN_REDUNDANCY
from ..utils.exceptions import (
    CarrierError,
    IndexRangeError,
    NotAFrameError,
    PartitionError,
    ZeroWindowError,
)
from ..utils.serialization import read_signal, write_signal

logger = logging.getLogger(__name__)

Signal = Union[np.ndarray, Sequence[complex]]


def _signal(f: Signal, N: Optional[int] = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex).ravel()
    if N is not None and f.size != N:
        raise CarrierError(f"Z_{N}", f"signal of length {f.size}")
    return f


def _window(h: Signal, N: Optional[int] = None) -> np.ndarray:
    h = _signal(h, N)
    if not np.any(h):
        raise ZeroWindowError("analysis window has zero norm")
    return h


def tf_plane(N: int) -> GroupCarrier:
    return GroupCarrier.cyclic(N, 2)


def gaussian_window(N: int, sigma: float = DEFAULT_WINDOW_SIGMA) -> np.ndarray:
    """Periodized Gaussian exp(-pi (n - N/2)^2 / (N sigma))"""
    n = np.arange(N)
    return np.exp(-np.pi * (n - N / 2) ** 2 / (N * sigma)).astype(complex)


def default_lattice(N: int) -> Tuple[int, int]:
    """Largest a = b dividing N with redundancy N/(a b) >= MIN_REDUNDANCY"""
    best = 1
    for d in range(1, math.isqrt(N) + 1):
        if N % d == 0 and N / (d * d) >= MIN_REDUNDANCY:
            best = d
    return best, best


def tf_shift(h: Signal, x: int, s: int, N: int) -> np.ndarray:
    """M_s T_x h, (M_s T_x h)(y) = exp(2 pi i s y / N) h(y - x).

    Indices range over [0, N]; N wraps to 0.
    """
    h = _signal(h, N)
    for name, value in (("x", x), ("s", s)):
        if not 0 <= value <= N:
            raise IndexRangeError(name, value, N)
    y = np.arange(N)
    return np.exp(2j * np.pi * s * y / N) * np.roll(h, x % N)


def tf_atoms(h: Signal, points: np.ndarray, N: int) -> np.ndarray:
    """Columns M_s T_x h for the rows (x, s) of `points`"""
    h = _signal(h, N)
    y = np.arange(N)
    xs, ss = points[:, 0], points[:, 1]
    shifted = h[np.mod(y[None, :] - xs[:, None], N)]
    phase = np.exp(2j * np.pi * np.outer(ss, y) / N)
    return (phase * shifted).T


def stft(f: Signal, h: Signal, N: Optional[int] = None) -> GFunc:
    """V_h f(x, s) = <f, M_s T_x h>"""
    h = _window(h, N)
    N = h.size
    f = _signal(f, N)
    y = np.arange(N)
    shifted = np.conj(h[np.mod(y[None, :] - y[:, None], N)])
    return GFunc(tf_plane(N), (0, 0), np.fft.fft(f[None, :] * shifted, axis=1))


def istft(F: Union[GFunc, np.ndarray], h: Signal, N: Optional[int] = None) -> np.ndarray:
    """Adjoint V_h^* F = sum_{x, s} F(x, s) M_s T_x h"""
    h = _window(h, N)
    N = h.size
    values = F.values if isinstance(F, GFunc) else np.asarray(F, dtype=complex).reshape(N, N)
    y = np.arange(N)
    synthesized = N * np.fft.ifft(values, axis=1)
    shifted = h[np.mod(y[None, :] - y[:, None], N)]
    return (shifted * synthesized).sum(axis=0)


def normalized_window(h: Signal) -> np.ndarray:
    """h / (sqrt(N) ||h||), which makes V_h an isometry"""
    h = _window(h)
    return h / (math.sqrt(h.size) * np.linalg.norm(h))


def isometric_stft(f: Signal, h: Signal) -> GFunc:
    return stft(f, normalized_window(h))


def isometric_istft(F: Union[GFunc, np.ndarray], h: Signal) -> np.ndarray:
    return istft(F, normalized_window(h))


def _mask_values(m: Union[GFunc, np.ndarray, float], N: int) -> np.ndarray:
    if isinstance(m, GFunc):
        if m.carrier != tf_plane(N):
            raise CarrierError(m.carrier.label, f"mask must live on {tf_plane(N).label}")
        return m.values
    return np.broadcast_to(np.asarray(m, dtype=complex), (N, N))


def localization_operator(h: Signal, m: Union[GFunc, np.ndarray, float], f: Signal) -> np.ndarray:
    """H_m f = V^*(m V f) with the isometric STFT"""
    g = normalized_window(h)
    N = g.size
    return istft(_mask_values(m, N) * stft(f, g).values, g)


def modulation_norm(f: Signal, h: Signal, p: float, q: Optional[float] = None, v: Optional[Weight] = None) -> float:
    """||V f||_{l^{p,q}_v} with the isometric STFT"""
    F = isometric_stft(f, h)
    return space_norm(F, SolidSpaceSpec(F.carrier, p, q if q is not None else p, v or Weight()))


def frame_operator(h: Signal, a: int, b: int, N: int) -> np.ndarray:
    """S = sum over the lattice aZ_N x bZ_N of pi(lambda) h (pi(lambda) h)^*"""
    if N % a or N % b:
        raise CarrierError(f"Z_{N}", f"lattice steps ({a}, {b}) must divide {N}")
    nodes = RelSepSet.regular(tf_plane(N), [a, b])
    A = tf_atoms(h, nodes.array, N)
    return A @ A.conj().T


def gabor_frame_bounds(h: Signal, a: int, b: int, N: int) -> FrameBounds:
    evals = np.linalg.eigvalsh(frame_operator(_window(h, N), a, b, N))
    return FrameBounds(lower=float(evals.min()), upper=float(evals.max()), rank=int((evals > 0).sum()))


def canonical_dual_window(h: Signal, a: int, b: int, N: int) -> np.ndarray:
    """h~ = S^{-1} h"""
    h = _window(h, N)
    S = frame_operator(h, a, b, N)
    evals = np.linalg.eigvalsh(S)
    if evals.min() < FRAME_CUTOFF * evals.max():
        raise NotAFrameError(float(evals.min()), float(evals.max()))
    return np.linalg.solve(S, h)


def reconstruction_error(h: Signal, h_dual: Signal, a: int, b: int, N: int) -> float:
    """max |sum_lambda <e_k, pi(lambda) h~> pi(lambda) h - e_k| over the standard basis"""
    nodes = RelSepSet.regular(tf_plane(N), [a, b])
    A = tf_atoms(h, nodes.array, N)
    D = tf_atoms(h_dual, nodes.array, N)
    return float(np.abs(A @ D.conj().T - np.eye(N)).max())


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """Window h on Z_N with lattice aZ_N x bZ_N"""
    N: int
    a: int
    b: int
    h: np.ndarray
    window_family: str = "custom"

    def __post_init__(self):
        if self.N % self.a or self.N % self.b:
            raise CarrierError(f"Z_{self.N}", f"lattice steps ({self.a}, {self.b}) must divide {self.N}")
        h = _window(self.h, self.N).copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def gaussian(
        cls,
        N: int,
        a: Optional[int] = None,
        b: Optional[int] = None,
        sigma: float = DEFAULT_WINDOW_SIGMA,
    ) -> "GaborSystem":
        da, db = default_lattice(N)
        return cls(N, a or da, b or db, gaussian_window(N, sigma), "gaussian")

    @property
    def carrier(self) -> GroupCarrier:
        return tf_plane(self.N)

    @cached_property
    def lattice(self) -> RelSepSet:
        return RelSepSet.regular(self.carrier, [self.a, self.b])

    @property
    def redundancy(self) -> float:
        return self.N / (self.a * self.b)

    @cached_property
    def unit_window(self) -> np.ndarray:
        """g = h / ||h||"""
        return self.h / np.linalg.norm(self.h)

    @cached_property
    def dual_window(self) -> np.ndarray:
        return canonical_dual_window(self.unit_window, self.a, self.b, self.N)

    def frame_bounds(self) -> FrameBounds:
        return gabor_frame_bounds(self.unit_window, self.a, self.b, self.N)

    def sidecar(self) -> Dict[str, Any]:
        return {"N": self.N, "a": self.a, "b": self.b, "window_family": self.window_family}

    def save(self, path: Path) -> None:
        write_signal(path, self.h, self.sidecar())

    @classmethod
    def load(cls, path: Path) -> "GaborSystem":
        h, sidecar = read_signal(path)
        if sidecar is None:
            raise FileNotFoundError(f"{path.with_suffix('.json')} sidecar is missing")
        return cls(int(sidecar["N"]), int(sidecar["a"]), int(sidecar["b"]), h, sidecar.get("window_family", "custom"))


def gabor_molecule_system(gs: GaborSystem) -> MoleculeSystem:
    """Atoms V(pi(lambda) g) and duals V(pi(lambda) g~) on the time-frequency plane.

    The envelope is the pointwise max of |V g| + |V g~| and the tight envelope.
    """
    nodes = gs.lattice
    g, g_dual = gs.unit_window, gs.dual_window
    atom_cols = tf_atoms(g, nodes.array, gs.N)
    dual_cols = tf_atoms(g_dual, nodes.array, gs.N)
    atoms = [isometric_stft(atom_cols[:, j], gs.h) for j in range(len(nodes))]
    duals = [isometric_stft(dual_cols[:, j], gs.h) for j in range(len(nodes))]
    envelope = isometric_stft(g, gs.h).abs() + isometric_stft(g_dual, gs.h).abs()
    envelope = tight_envelope(nodes, atoms, duals).maximum(envelope)
    sys = MoleculeSystem.build(nodes, atoms, duals, envelope=envelope, canonical=True)
    logger.debug(f"Gabor system N={gs.N}, a={gs.a}, b={gs.b}: {len(nodes)} atoms, redundancy {gs.redundancy:g}")
    return sys


def _product_grid(pu: PartitionOfUnity) -> Tuple[np.ndarray, np.ndarray]:
    """Row/column position of each center in the grid Gamma_1 x Gamma_2"""
    centers = pu.centers.array
    first, rows = np.unique(centers[:, 0], return_inverse=True)
    second, cols = np.unique(centers[:, 1], return_inverse=True)
    if len(first) * len(second) != len(centers):
        raise PartitionError("centers do not form a product set Gamma_1 x Gamma_2")
    return rows, cols


def modulation_norm_ratios(
    h: Signal,
    pu: PartitionOfUnity,
    signals: Sequence[Signal],
    p: float,
    q: float,
    s: float,
    t: float,
    v: Optional[Weight] = None,
) -> np.ndarray:
    """Per-signal ratio of the piecewise modulation norm to ||V f||_{l^{p,q}_v}, evaluated directly"""
    v = v or Weight()
    if pu.lower <= 0:
        raise PartitionError(f"partition sum has lower bound {pu.lower:g}")
    rows, cols = _product_grid(pu)
    shape = (rows.max() + 1, cols.max() + 1)
    weights = v.evaluate(pu.carrier, pu.centers.array)
    masks = [f.values for f in pu.functions]
    ratios = []
    for f in signals:
        f = _signal(f)
        if not np.any(f):
            continue
        lhs = modulation_norm(f, h, p, q, v)
        grid = np.zeros(shape)
        for k, theta in enumerate(masks):
            piece = localization_operator(h, theta, f)
            grid[rows[k], cols[k]] = modulation_norm(piece, h, s, t) * weights[k]
        rhs = float(lp_norm(lp_norm(grid, p, axis=0), q))
        ratios.append(rhs / lhs)
    return np.asarray(ratios)


def random_signals(N: int, trials: int, seed: int = DEFAULT_SEED) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    return list(rng.standard_normal((trials, N)) + 1j * rng.standard_normal((trials, N)))


def modulation_norm_harness(
    h: Signal,
    pu: PartitionOfUnity,
    combos: Sequence[Tuple[float, float, float, float]],
    v: Optional[Weight] = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> List[EquivalenceRow]:
    """Ratio spread per (p, q, s, t) combination over random signals"""
    v = v or Weight()
    signals = random_signals(_window(h).size, trials, seed)
    rows = []
    for p, q, s, t in combos:
        ratios = modulation_norm_ratios(h, pu, signals, p, q, s, t, v)
        c_min, c_max = float(ratios.min()), float(ratios.max())
        rows.append(EquivalenceRow(
            space=f"modulation[{exponent_label(s)},{exponent_label(t)}]",
            p=p,
            q=q,
            weight=v.name,
            trial_count=int(ratios.size),
            c_min=c_min,
            c_max=c_max,
            ratio=c_max / c_min,
        ))
    return rows

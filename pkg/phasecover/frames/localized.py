"""
Exponentially localized frames on Z and their frame multipliers
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from ..core.atomic import MoleculeSystem
from ..core.group import GFunc, GroupCarrier, RelSepSet, Weight, Window
from ..core.multiplier import cd_norm
from ..utils.config import LOCALIZED_DECAY, LOCALIZED_PERTURBATION
from ..utils.exceptions import NotAFrameError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LocalizedFrame:
    """Frame vectors f_k (columns) on Z restricted to [-R, R] and their canonical dual g_k"""
    radius: int
    decay: float
    perturbation: float
    vectors: np.ndarray
    duals: np.ndarray

    @property
    def carrier(self) -> GroupCarrier:
        return GroupCarrier.lattice(1)

    @cached_property
    def window(self) -> Window:
        return Window.box(self.carrier, self.radius)

    @cached_property
    def index(self) -> RelSepSet:
        return RelSepSet(self.carrier, tuple(self.window.elements()))

    @cached_property
    def gram(self) -> np.ndarray:
        """G[j, k] = <f_k, f_j>"""
        return self.vectors.conj().T @ self.vectors

    @cached_property
    def dual_gram(self) -> np.ndarray:
        return self.duals.conj().T @ self.duals

    def localization(self, w: Optional[Weight] = None) -> Tuple[float, GFunc]:
        """Smallest dominating sequence a with |<f_k, f_j>| <= a_{k-j}, and its l^1_w norm"""
        return cd_norm(self.gram, self.index, w)

    def reconstruction_error(self) -> float:
        return float(np.abs(self.duals @ self.vectors.conj().T - np.eye(len(self.index))).max())


def _perturbation(offsets: np.ndarray, decay: float) -> np.ndarray:
    """exp(-decay |j|) (-1)^j off the diagonal, 0 on it"""
    signs = np.where(np.mod(offsets, 2) == 0, 1.0, -1.0)
    return np.where(offsets == 0, 0.0, np.exp(-decay * np.abs(offsets)) * signs)


def localized_frame(
    radius: int = 32,
    decay: float = LOCALIZED_DECAY,
    perturbation: float = LOCALIZED_PERTURBATION,
) -> LocalizedFrame:
    """f_k = delta_k + eps exp(-decay |n - k|) s(n - k) on Z restricted to [-R, R]"""
    if radius < 1:
        raise PreconditionError(f"frame radius must be positive, got {radius}")
    n = np.arange(-radius, radius + 1)
    offsets = n[:, None] - n[None, :]
    F = np.eye(n.size) + perturbation * _perturbation(offsets, decay)
    S = F @ F.conj().T
    evals = np.linalg.eigvalsh(S)
    if evals.min() <= 0:
        raise NotAFrameError(float(evals.min()), float(evals.max()))
    duals = np.linalg.solve(S, F).astype(complex)
    logger.debug(f"Localized frame on [-{radius}, {radius}]: frame bounds [{evals.min():.4g}, {evals.max():.4g}]")
    return LocalizedFrame(radius, decay, perturbation, F.astype(complex), duals)


def frame_multiplier(
    frame: LocalizedFrame,
    m: Union[np.ndarray, GFunc, float],
    f: np.ndarray,
) -> np.ndarray:
    """M_m f = sum_k m_k <f, f_k> g_k"""
    if isinstance(m, GFunc):
        m = m.on(frame.window)
    m = np.broadcast_to(np.asarray(m, dtype=complex), (len(frame.index),))
    coefficients = frame.vectors.conj().T @ np.asarray(f, dtype=complex)
    return frame.duals @ (m * coefficients)


def localized_molecule_system(frame: LocalizedFrame) -> MoleculeSystem:
    """Coefficient-domain system on G = Lambda = Z: phi_j(k) = <f_j, f_k>, psi_j(k) = <g_j, g_k>"""
    window = frame.window
    atoms = [GFunc.from_window(window, frame.gram[:, j]) for j in range(len(frame.index))]
    duals = [GFunc.from_window(window, frame.dual_gram[:, j]) for j in range(len(frame.index))]
    return MoleculeSystem.build(frame.index, atoms, duals, window=window, canonical=True)

"""
Phase-space multipliers, convolution-dominated matrices, Gram inversion and the
norm-equivalence engine.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .atomic import MoleculeSystem, projector, random_functions
from .cover import (
    CoverWindow,
    PartitionOfUnity,
    _pieces,
    approx_projector,
    cover_masks,
)
from .group import GFunc, GroupCarrier, Neighborhood, RelSepSet, Side, Weight, Window, convolve, involute
from .spaces import DiscreteCoeffs, SolidSpaceSpec, ed_norm, space_norm
from ..models.report_models import ApproximationRow, EquivalenceRow, GramReport, SpectrumReport
from ..utils.config import DEFAULT_SEED, DEFAULT_TRIALS, SVD_CUTOFF
from ..utils.exceptions import (
    CarrierError,
    MaskRejectedError,
    PartitionError,
    PreconditionError,
    SubgroupError,
)

logger = logging.getLogger(__name__)


class MaskFamily(str, Enum):
    CONSTANT = "constant"
    HALF_PLANE = "half_plane"
    COSINE = "cosine"
    SIGN_SPLIT = "sign_split"
    DENSE = "dense"


@dataclass(frozen=True, eq=False)
class SymbolMask:
    """Symbol m on a working window"""
    m: GFunc
    window: Window

    @classmethod
    def from_values(cls, window: Window, values) -> "SymbolMask":
        return cls(GFunc.from_window(window, values), window)

    @classmethod
    def constant(cls, window: Window, value: complex = 1.0) -> "SymbolMask":
        return cls.from_values(window, np.full(window.size, value, dtype=complex))

    @cached_property
    def values(self) -> np.ndarray:
        return self.m.on(self.window)

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    @property
    def lower(self) -> float:
        return float(self.values.real.min())

    @property
    def upper(self) -> float:
        return float(self.values.real.max())

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    @property
    def positive_bounded(self) -> bool:
        return self.is_real and self.lower > 0

    def on(self, window: Window) -> np.ndarray:
        return self.m.on(window)


def named_mask(
    window: Window,
    family: Union[MaskFamily, str],
    value: float = 1.0,
    offset: float = 0.6,
    amplitude: float = 0.3,
    axis: int = 0,
    values: Optional[Sequence[float]] = None,
) -> SymbolMask:
    """Mask families: constant, half_plane (first half along `axis`), offset + amplitude cos(2 pi t/n),
    sign_split (+1 on even, -1 on odd coordinates along `axis`) or dense values"""
    family = MaskFamily(family)
    pts = window.points
    if family is MaskFamily.CONSTANT:
        return SymbolMask.constant(window, value)
    if family is MaskFamily.DENSE:
        if values is None or len(values) != window.size:
            raise MaskRejectedError(f"dense mask needs {window.size} values")
        return SymbolMask.from_values(window, np.asarray(values, dtype=complex))
    t = pts[:, axis] - window.offset[axis]
    n = window.shape[axis]
    if family is MaskFamily.HALF_PLANE:
        return SymbolMask.from_values(window, (t < n // 2).astype(float))
    if family is MaskFamily.COSINE:
        return SymbolMask.from_values(window, offset + amplitude * np.cos(2 * np.pi * t / n))
    return SymbolMask.from_values(window, np.where(np.mod(pts[:, axis], 2) == 0, 1.0, -1.0))


def _mask_vector(sys: MoleculeSystem, mask: SymbolMask) -> np.ndarray:
    if mask.m.carrier != sys.carrier:
        raise CarrierError(sys.carrier.label, f"mask lives on {mask.m.carrier.label}")
    return mask.on(sys.window)


def multiplier(sys: MoleculeSystem, mask: SymbolMask, f: GFunc) -> GFunc:
    """M_m f = P(m f); callers pass f from the range of P"""
    return projector(sys, sys.function(_mask_vector(sys, mask) * sys.vector(f)))


def approx_multiplier(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    mask: SymbolMask,
    U: CoverWindow,
    f: GFunc,
) -> GFunc:
    """M_{m,U} f = P P_U(m f)"""
    if not pu.exact_partition:
        raise PartitionError("approximate multiplier needs an exact partition of unity")
    mf = sys.function(_mask_vector(sys, mask) * sys.vector(f))
    return projector(sys, approx_projector(sys, pu, U, mf))


def atomic_basis(sys: MoleculeSystem) -> np.ndarray:
    """Orthonormal basis of the span of the atoms (columns)"""
    u, s, _ = np.linalg.svd(sys.phi, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, s > SVD_CUTOFF * s[0]]


def restricted_matrix(sys: MoleculeSystem, operator, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Q^* T Q for a vector operator T on the system window"""
    Q = atomic_basis(sys) if basis is None else basis
    columns = np.stack([operator(Q[:, j]) for j in range(Q.shape[1])], axis=1)
    return Q.conj().T @ columns


def spectrum_report(matrix: np.ndarray) -> SpectrumReport:
    sigma = np.linalg.svd(matrix, compute_uv=False)
    hermitian = (matrix + matrix.conj().T) / 2
    evals = np.linalg.eigvalsh(hermitian)
    return SpectrumReport(
        dimension=int(matrix.shape[0]),
        eigen_min=float(evals.min()),
        eigen_max=float(evals.max()),
        sigma_min=float(sigma.min()),
        sigma_max=float(sigma.max()),
        self_adjoint_error=float(np.abs(matrix - matrix.conj().T).max()),
    )


def multiplier_matrix(sys: MoleculeSystem, mask: SymbolMask) -> np.ndarray:
    """M_m on an orthonormal basis of the atomic span"""
    m = _mask_vector(sys, mask)
    P = sys.projector_matrix
    return restricted_matrix(sys, lambda v: P @ (m * v))


def approx_multiplier_errors(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    mask: SymbolMask,
    radii: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> List[ApproximationRow]:
    """Probe norm of M_{m,U} - M_m over P-projected random probes, per box radius"""
    if not pu.exact_partition:
        raise PartitionError("approximate multiplier needs an exact partition of unity")
    m = _mask_vector(sys, mask)
    P = sys.projector_matrix
    probes = [P @ sys.vector(f) for f in random_functions(sys.window, trials, seed)]
    probes = [v for v in probes if np.linalg.norm(v) > 0]
    pieces = [_pieces(sys, pu, m * v) for v in probes]
    rows = []
    for radius in radii:
        outside = 1.0 - cover_masks(sys, pu, CoverWindow.box(sys.carrier, radius))
        worst = 0.0
        for v, rows_f in zip(probes, pieces):
            # M_m f - M_{m,U} f = P(sum_gamma P(m f eta_gamma) chi_{gamma + (G minus U)})
            diff = P @ (rows_f * outside).sum(axis=0)
            worst = max(worst, float(np.linalg.norm(diff) / np.linalg.norm(v)))
        rows.append(ApproximationRow(U_radius=int(radius), error=worst, probe_count=len(probes)))
    return rows


def _differences(nodes: RelSepSet) -> Tuple[np.ndarray, Window, np.ndarray]:
    carrier = nodes.carrier
    diffs = carrier.normalize_points((nodes.array[:, None, :] - nodes.array[None, :, :]).reshape(-1, carrier.dim))
    window = Window.bounding(carrier, diffs)
    return diffs, window, window.index(diffs)


def cd_norm(
    T: np.ndarray,
    nodes: RelSepSet,
    w: Optional[Weight] = None,
    side: Union[Side, str] = Side.RIGHT,
) -> Tuple[float, GFunc]:
    """sum_mu a_mu w(mu), a_mu = max |T[l, l']| over pairs with l - l' = mu.

    Left and right domination coincide on abelian carriers.
    """
    Side(side)
    witness = nodes.subgroup_witness()
    if witness is not None:
        raise SubgroupError(witness)
    w = w or Weight()
    _, window, idx = _differences(nodes)
    a = np.zeros(window.size)
    np.maximum.at(a, idx, np.abs(np.asarray(T)).ravel())
    norm = float((a * w.evaluate(nodes.carrier, window.points)).sum())
    return norm, GFunc.from_window(window, a)


def cd_apply_bound(
    T: np.ndarray,
    c: DiscreteCoeffs,
    E: SolidSpaceSpec,
    V: Neighborhood,
    w: Optional[Weight] = None,
) -> Tuple[float, float]:
    """(||T c||_{E_d}, ||T||_CD ||c||_{E_d})"""
    norm, _ = cd_norm(T, c.nodes, w)
    lhs = ed_norm(DiscreteCoeffs(c.nodes, np.asarray(T) @ c.values), E, V)
    return lhs, norm * ed_norm(c, E, V)


def svd_pinv(matrix: np.ndarray, cutoff: float = SVD_CUTOFF) -> Tuple[np.ndarray, np.ndarray]:
    """Moore-Penrose pseudo-inverse with relative singular-value cutoff, and the retained singular values"""
    u, s, vh = np.linalg.svd(matrix)
    if s.size == 0 or s[0] == 0:
        return np.zeros_like(matrix.conj().T), s[:0]
    keep = s > cutoff * s[0]
    pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    return pinv, s[keep]


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """L[l, l'] = <m phi_l', phi_l> with its pseudo-inverse"""
    nodes: RelSepSet
    L: np.ndarray
    L_pinv: np.ndarray
    singular_values: np.ndarray
    cd_norm: float
    cd_bound: float
    dominating: GFunc

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values.max(initial=0.0))

    @property
    def spectral_gap(self) -> float:
        """Smallest retained singular value"""
        return float(self.singular_values.min()) if self.rank else 0.0

    @cached_property
    def penrose_error(self) -> float:
        L, Lp = self.L, self.L_pinv
        scale = max(1.0, np.linalg.norm(L, 2), np.linalg.norm(Lp, 2))
        return float(max(np.linalg.norm(L @ Lp @ L - L, 2), np.linalg.norm(Lp @ L @ Lp - Lp, 2)) / scale)

    @cached_property
    def cd_norm_pinv(self) -> float:
        return cd_norm(self.L_pinv, self.nodes)[0]

    def report(self) -> GramReport:
        return GramReport(
            rank=self.rank,
            sigma_max=self.sigma_max,
            spectral_gap=self.spectral_gap,
            cd_norm=self.cd_norm,
            cd_norm_bound=self.cd_bound,
            cd_norm_pinv=self.cd_norm_pinv,
            penrose_error=self.penrose_error,
        )


def envelope_correlation_bound(sys: MoleculeSystem, w: Weight, sup_m: float) -> float:
    """||m||_inf sum over node differences mu of (h * h^v)(mu) w(mu)"""
    corr = convolve(sys.envelope, involute(sys.envelope))
    _, window, idx = _differences(sys.nodes)
    mus = window.points[np.unique(idx)]
    values = np.array([corr(mu).real for mu in mus])
    return float(sup_m * (values * w.evaluate(sys.carrier, mus)).sum())


def gram_matrix(sys: MoleculeSystem, mask: SymbolMask, w: Optional[Weight] = None) -> GramMatrix:
    """Gram matrix of the masked atoms, its CD norm and pseudo-inverse"""
    if not mask.is_real:
        raise MaskRejectedError("Gram inversion requires a real mask")
    w = w or Weight()
    m = _mask_vector(sys, mask)
    L = sys.phi.conj().T @ (m[:, None] * sys.phi)
    pinv, sigma = svd_pinv(L)
    norm, a = cd_norm(L, sys.nodes, w)
    return GramMatrix(
        nodes=sys.nodes,
        L=L,
        L_pinv=pinv,
        singular_values=sigma,
        cd_norm=norm,
        cd_bound=envelope_correlation_bound(sys, w, mask.sup_norm),
        dominating=a,
    )


def _check_positive(mask: SymbolMask) -> None:
    if not mask.is_real:
        raise MaskRejectedError("mask must be real-valued")
    if mask.lower <= 0:
        raise MaskRejectedError(
            f"mask is not bounded below by a positive constant (min {mask.lower:g}); "
            "without a positive lower bound the multiplier can be singular, as the sign-mask block system shows"
        )


def inverse_multiplier(
    sys: MoleculeSystem,
    mask: SymbolMask,
    f: GFunc,
    gram: Optional[GramMatrix] = None,
) -> GFunc:
    """N_m f = S L^+ S' f, inverting M_m on the atomic span"""
    _check_positive(mask)
    gram = gram or gram_matrix(sys, mask)
    return sys.function(sys.phi @ (gram.L_pinv @ (sys.phi.conj().T @ sys.vector(f))))


def left_invertibility_witness(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    U: CoverWindow,
) -> float:
    """Smallest singular value of P R^B_U C^B restricted to the atomic span"""
    operator = lambda v: sys.vector(projector(sys, approx_projector(sys, pu, U, sys.function(v))))
    return float(np.linalg.svd(restricted_matrix(sys, operator), compute_uv=False).min())


def counterexample_block_system(N: int = 8) -> Tuple[MoleculeSystem, SymbolMask]:
    """Atoms chi_[2k, 2k+2) on Z_N with duals phi/2 and the alternating sign mask"""
    if N % 2:
        raise PreconditionError(f"block system needs an even length, got {N}")
    carrier = GroupCarrier.cyclic(N)
    nodes = RelSepSet.regular(carrier, [2])
    block = GFunc.indicator(carrier, [0, 1])
    sys = MoleculeSystem.from_translates(nodes, block, block / 2)
    mask = named_mask(sys.window, MaskFamily.SIGN_SPLIT)
    return sys, mask


def _trial_signals(sys: MoleculeSystem, trials: int, seed: int) -> List[np.ndarray]:
    P = sys.projector_matrix
    return [P @ sys.vector(f) for f in random_functions(sys.window, trials, seed)]


def _check_theta(sys: MoleculeSystem, pu: PartitionOfUnity) -> None:
    if pu.lower <= 0:
        raise MaskRejectedError(f"theta family sum has lower bound {pu.lower:g}")
    if any(np.any(f.values.imag) for f in pu.functions):
        raise MaskRejectedError("complex theta families are not supported")
    sys.nodes.check_subgroup()
    if not sys.canonical_dual:
        raise PreconditionError("theta variant needs the canonical dual system")


def equivalence_ratios(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    spaces: Sequence[SolidSpaceSpec],
    B: SolidSpaceSpec,
    signals: Sequence[np.ndarray],
    V: Optional[Neighborhood] = None,
) -> np.ndarray:
    """r(f) = ||(||P(f eta_gamma)||_B)_gamma||_{E_d} / ||f||_E, one row per nonzero signal, one column per space.

    A non-exact family runs the theta variant, which needs a real positive sum,
    a subgroup node set and a canonical dual system.
    """
    V = V or pu.centers.neighborhood
    if not pu.exact_partition:
        _check_theta(sys, pu)
    ratios = []
    for vec in signals:
        if not np.any(vec):
            continue
        f = sys.function(vec)
        coeffs = DiscreteCoeffs(pu.centers, [space_norm(sys.function(row), B) for row in _pieces(sys, pu, vec)])
        ratios.append([ed_norm(coeffs, E, V) / space_norm(f, E) for E in spaces])
    return np.asarray(ratios, dtype=float).reshape(-1, len(spaces))


def norm_equivalence_rows(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    spaces: Sequence[SolidSpaceSpec],
    B: SolidSpaceSpec,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    V: Optional[Neighborhood] = None,
    label: str = "",
) -> List[EquivalenceRow]:
    """Ratio spread (c_min, c_max, c_max/c_min) per space over P-projected random signals"""
    ratios = equivalence_ratios(sys, pu, spaces, B, _trial_signals(sys, trials, seed), V)
    rows = []
    for i, E in enumerate(spaces):
        c_min, c_max = float(ratios[:, i].min()), float(ratios[:, i].max())
        rows.append(EquivalenceRow(
            space=E.name + label,
            p=E.p,
            q=E.q_value,
            weight=E.v.name,
            trial_count=int(ratios.shape[0]),
            c_min=c_min,
            c_max=c_max,
            ratio=c_max / c_min,
        ))
        logger.debug(f"{E.name}{label}: c in [{c_min:.4g}, {c_max:.4g}]")
    return rows


def norm_equivalence_report(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    spaces: Sequence[SolidSpaceSpec],
    B: SolidSpaceSpec,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    V: Optional[Neighborhood] = None,
) -> pd.DataFrame:
    """Equivalence table, one row per space"""
    rows = norm_equivalence_rows(sys, pu, spaces, B, trials, seed, V)
    return pd.DataFrame([r.model_dump() for r in rows])

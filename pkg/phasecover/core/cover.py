"""
Partitions of unity, vector-valued analysis/synthesis, the approximate projector P_U
and its error certificate.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .atomic import MoleculeSystem, kernel_envelope, random_functions, tight_envelope, KernelEnvelope
from .group import GFunc, GroupCarrier, Neighborhood, RelSepSet, Side, Weight, Window, convolve, translate
from .spaces import AmalgamKind, SolidSpaceSpec, VectorCoeffs, amalgam_norm, local_max, space_norm
from ..models.report_models import CertificateRow
from ..utils.config import DEFAULT_SEED, DEFAULT_TRIALS, PARTITION_TOL
from ..utils.exceptions import CarrierError, CoverageGapError, MaskRejectedError, PartitionError
from ..utils.serialization import carrier_from_dict, carrier_to_dict

logger = logging.getLogger(__name__)


class Profile(str, Enum):
    TRIANGULAR = "triangular"
    RAISED_COSINE = "raised_cosine"
    GAUSSIAN = "gaussian_normalized"


def _profile_1d(profile: Profile, t: np.ndarray, width: float) -> np.ndarray:
    half = width / 2.0
    a = np.abs(t.astype(float))
    if profile is Profile.TRIANGULAR:
        return np.where(a < half, 1.0 - a / half, 0.0)
    if profile is Profile.RAISED_COSINE:
        return np.where(a < half, np.cos(np.pi * t / width) ** 2, 0.0)
    # truncated where exp(-pi (2t/W)^2) drops below 1e-21
    return np.where(a <= 2 * width, np.exp(-np.pi * (2.0 * t / width) ** 2), 0.0)


def profile_function(carrier: GroupCarrier, profile: Union[Profile, str], width: float) -> GFunc:
    """Tensor-product profile centered at the identity"""
    profile = Profile(profile)
    if width <= 0:
        raise PartitionError(f"profile width must be positive, got {width}")
    if carrier.is_finite:
        window = Window.full(carrier)
        pts = window.points
        half = carrier.modulus // 2
        t = np.mod(pts + half, carrier.modulus) - half
    else:
        reach = int(math.ceil(2 * width)) if profile is Profile.GAUSSIAN else int(math.ceil(width / 2.0))
        window = Window.box(carrier, reach)
        t = window.points
    values = np.prod(_profile_1d(profile, t, width), axis=1)
    return GFunc.from_window(window, values)


@dataclass(frozen=True)
class CoverWindow(Neighborhood):
    """Symmetric set U containing the identity; grows along a box exhaustion"""

    def covers(self, carrier: GroupCarrier) -> bool:
        return carrier.is_finite and len(self.elements) == carrier.order


@dataclass(frozen=True, eq=False)
class PartitionOfUnity:
    """Functions eta_gamma on a working window, enveloped by translates of g, with A <= sum <= B"""
    centers: RelSepSet
    functions: Tuple[GFunc, ...]
    envelope: GFunc
    lower: float
    upper: float
    exact_partition: bool
    window: Window

    @property
    def carrier(self) -> GroupCarrier:
        return self.centers.carrier

    def __len__(self) -> int:
        return len(self.functions)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Functions as rows over the working window"""
        return np.stack([f.on(self.window) for f in self.functions])

    def on(self, window: Window) -> np.ndarray:
        return np.stack([f.on(window) for f in self.functions])

    def total(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def verify_envelope(self) -> float:
        """max over gamma, x of |eta_gamma(x)| - g(x - gamma)"""
        worst = -np.inf
        for gamma, f in zip(self.centers, self.functions):
            shifted = translate(self.envelope, gamma, Side.LEFT)
            grid = self.window.union(shifted.window)
            worst = max(worst, float((np.abs(f.on(grid)) - shifted.on(grid).real).max()))
        return worst

    def to_document(self) -> Dict[str, Any]:
        return {
            "carrier": carrier_to_dict(self.carrier),
            "window": {"offset": list(self.window.offset), "shape": list(self.window.shape)},
            "centers": [list(x) for x in self.centers],
            "functions": [f.to_triples() for f in self.functions],
            "envelope": self.envelope.to_triples(),
            "lower": self.lower,
            "upper": self.upper,
            "exact_partition": self.exact_partition,
        }

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "PartitionOfUnity":
        carrier = carrier_from_dict(doc["carrier"])
        return cls(
            centers=RelSepSet(carrier, tuple(tuple(x) for x in doc["centers"])),
            functions=tuple(GFunc.from_triples(carrier, t) for t in doc["functions"]),
            envelope=GFunc.from_triples(carrier, doc["envelope"]),
            lower=float(doc["lower"]),
            upper=float(doc["upper"]),
            exact_partition=bool(doc["exact_partition"]),
            window=Window(carrier, tuple(doc["window"]["offset"]), tuple(doc["window"]["shape"])),
        )


def _from_functions(centers: RelSepSet, functions: Sequence[GFunc], window: Window, exact: bool) -> PartitionOfUnity:
    functions = tuple(functions)
    total = np.stack([f.on(window) for f in functions]).sum(axis=0).real
    return PartitionOfUnity(
        centers=centers,
        functions=functions,
        envelope=tight_envelope(centers, functions),
        lower=float(total.min()),
        upper=float(total.max()),
        exact_partition=exact,
        window=window,
    )


def build_bupu(
    centers: RelSepSet,
    profile: Union[Profile, str],
    width: float,
    window: Optional[Window] = None,
) -> PartitionOfUnity:
    """eta_gamma = L_gamma p / sum_gamma' L_gamma' p on the working window"""
    carrier = centers.carrier
    if window is None:
        window = Window.full(carrier) if carrier.is_finite else Window.bounding(carrier, centers.array)
    p = profile_function(carrier, profile, width)
    shifted = np.stack([translate(p, gamma).on(window).real for gamma in centers])
    total = shifted.sum(axis=0)
    gaps = np.flatnonzero(total <= 0)
    if gaps.size:
        raise CoverageGapError(tuple(int(c) for c in window.points[gaps[0]]))
    functions = [GFunc.from_window(window, row / total) for row in shifted]
    pu = _from_functions(centers, functions, window, exact=True)
    if max(abs(pu.lower - 1.0), abs(pu.upper - 1.0)) > PARTITION_TOL:
        raise PartitionError(f"normalized profiles sum to [{pu.lower}, {pu.upper}]")
    logger.debug(f"Built {Profile(profile).value} partition with {len(centers)} centers on {carrier.label}")
    return pu


def _real_mask(mask: GFunc, window: Window) -> np.ndarray:
    values = mask.on(window)
    if np.abs(values.imag).max(initial=0.0) > 0:
        raise MaskRejectedError("complex masks are not accepted for theta partitions")
    return values.real


def modulate(pu: PartitionOfUnity, mask: GFunc) -> PartitionOfUnity:
    """theta_gamma = m eta_gamma, a non-exact family with sum m"""
    m = GFunc.from_window(pu.window, _real_mask(mask, pu.window))
    return _from_functions(pu.centers, [m * f for f in pu.functions], pu.window, exact=False)


def factor_theta(theta: PartitionOfUnity) -> Tuple[GFunc, PartitionOfUnity]:
    """Split theta_gamma = m eta_gamma with m = sum theta_gamma and sum eta_gamma = 1"""
    total = theta.total()
    if np.abs(total).min() <= 0:
        raise PartitionError("theta family sum vanishes on the working window")
    if np.abs(total.imag).max() > 0 or total.real.min() <= 0:
        raise MaskRejectedError("theta family sum must be real and positive")
    m = GFunc.from_window(theta.window, total.real)
    eta = [GFunc.from_window(theta.window, f.on(theta.window) / total.real) for f in theta.functions]
    return m, _from_functions(theta.centers, eta, theta.window, exact=True)


def _check_pair(sys: MoleculeSystem, pu: PartitionOfUnity) -> None:
    if sys.carrier != pu.carrier:
        raise CarrierError(sys.carrier.label, f"partition lives on {pu.carrier.label}")


def _require_exact(pu: PartitionOfUnity) -> None:
    if not pu.exact_partition:
        raise PartitionError("approximate projector needs an exact partition of unity")


def _pieces(sys: MoleculeSystem, pu: PartitionOfUnity, vec: np.ndarray) -> np.ndarray:
    """Rows P(f eta_gamma) on the system window"""
    eta = pu.on(sys.window)
    pieces = eta * vec[None, :]
    return (sys.phi @ (sys.psi.conj().T @ pieces.T)).T


def cover_masks(sys: MoleculeSystem, pu: PartitionOfUnity, U: CoverWindow) -> np.ndarray:
    """Rows chi_{gamma+U} on the system window"""
    window = sys.window
    masks = np.zeros((len(pu.centers), window.size))
    for i, gamma in enumerate(pu.centers):
        idx = window.index(U.array + np.asarray(gamma))
        masks[i, idx[idx >= 0]] = 1.0
    return masks


def vector_analysis(sys: MoleculeSystem, pu: PartitionOfUnity, f: GFunc) -> VectorCoeffs:
    """C^B f = (P(f eta_gamma))_gamma"""
    _check_pair(sys, pu)
    rows = _pieces(sys, pu, sys.vector(f))
    return VectorCoeffs(pu.centers, tuple(sys.function(row) for row in rows))


def vector_synthesis(sys: MoleculeSystem, pu: PartitionOfUnity, F: VectorCoeffs, U: CoverWindow) -> GFunc:
    """R^B_U F = sum_gamma P(F_gamma) chi_{gamma+U}"""
    _check_pair(sys, pu)
    rows = np.stack([sys.vector(e) for e in F.entries])
    projected = (sys.phi @ (sys.psi.conj().T @ rows.T)).T
    return sys.function((projected * cover_masks(sys, pu, U)).sum(axis=0))


def approx_projector(sys: MoleculeSystem, pu: PartitionOfUnity, U: CoverWindow, f: GFunc) -> GFunc:
    """P_U f = R^B_U C^B f"""
    _require_exact(pu)
    return vector_synthesis(sys, pu, vector_analysis(sys, pu, f), U)


def approx_residual(sys: MoleculeSystem, pu: PartitionOfUnity, U: CoverWindow, f: GFunc) -> GFunc:
    """P f - P_U f computed as sum_gamma P(f eta_gamma) chi_{gamma + (G minus U)}"""
    _require_exact(pu)
    _check_pair(sys, pu)
    pieces = _pieces(sys, pu, sys.vector(f))
    return sys.function((pieces * (1.0 - cover_masks(sys, pu, U))).sum(axis=0))


def _g_u_values(
    pu: PartitionOfUnity,
    U: CoverWindow,
    V: Neighborhood,
    xs: Window,
) -> np.ndarray:
    carrier = pu.carrier
    k = convolve(pu.envelope, V.indicator())
    gammas = pu.centers.array
    if carrier.is_finite:
        ys = Window.full(carrier)
    else:
        lo = gammas.min(axis=0) + np.asarray(k.offset)
        hi = gammas.max(axis=0) + np.asarray(k.offset) + np.asarray(k.values.shape) - 1
        ys = Window.bounding(carrier, np.stack([lo, hi]))
    diffs = (ys.points[:, None, :] - gammas[None, :, :]).reshape(-1, carrier.dim)
    k_window = k.window
    k_padded = np.append(k.on(k_window).real, 0.0)
    weights = k_padded[k_window.index(diffs)].reshape(ys.size, len(gammas))
    active = weights.any(axis=1)
    weights, diffs = weights[active], diffs.reshape(ys.size, len(gammas), carrier.dim)[active]
    u_window = Window.bounding(carrier, U.array)
    member = np.zeros(u_window.size + 1, dtype=bool)
    member[u_window.index(U.array)] = True
    out = np.zeros(xs.size)
    for j, x in enumerate(xs.points):
        idx = u_window.index((diffs + x).reshape(-1, carrier.dim)).reshape(weights.shape)
        outside = ~member[idx]
        out[j] = (weights * outside).sum(axis=1).max(initial=0.0)
    return out


def auxiliary_g_u(
    pu: PartitionOfUnity,
    U: CoverWindow,
    V: Neighborhood,
    window: Optional[Window] = None,
) -> GFunc:
    """G_U(x) = max_y sum_gamma (g * chi_V)(y - gamma) [y + x - gamma not in U]

    Evaluated on `window` (the whole group on cyclic carriers).
    """
    xs = window or (Window.full(pu.carrier) if pu.carrier.is_finite else pu.window)
    return GFunc.from_window(xs, _g_u_values(pu, U, V, xs))


def localized_g_u_bound(
    pu: PartitionOfUnity,
    U: CoverWindow,
    K: Neighborhood,
    V: Neighborhood,
    w: Weight,
) -> Tuple[float, float]:
    """(max over K of G_{U+K}, sum of (g*chi_V)_# w over V + (G minus U))"""
    carrier = pu.carrier
    grown = CoverWindow(carrier, U.product(K).elements)
    lhs_window = Window.bounding(carrier, K.array)
    g_uk = _g_u_values(pu, grown, V, lhs_window)
    inside_k = np.zeros(lhs_window.size, dtype=bool)
    inside_k[lhs_window.index(K.array)] = True
    lhs = float(g_uk[inside_k].max())
    k_sharp = local_max(convolve(pu.envelope, V.indicator()), V, Side.RIGHT)
    window = k_sharp.window
    pts = window.points
    # x lies in V + (G minus U) unless x - v is in U for every v in V
    u_members = set(U.elements)
    eroded = np.array([
        all(carrier.normalize(tuple(p - v)) in u_members for v in V.array) for p in pts
    ])
    values = np.abs(k_sharp.values).ravel() * w.evaluate(carrier, pts)
    return lhs, float(values[~eroded].sum())


@dataclass(frozen=True)
class CertificateContext:
    """Quantities shared by every step of an exhaustion"""
    kernel: KernelEnvelope
    h_sharp: GFunc
    space: SolidSpaceSpec
    V: Neighborhood
    w: Weight


def certificate_context(
    sys: MoleculeSystem,
    E: Optional[SolidSpaceSpec] = None,
    V: Optional[Neighborhood] = None,
    w: Optional[Weight] = None,
) -> CertificateContext:
    V = V or sys.nodes.neighborhood
    E = E or SolidSpaceSpec(sys.carrier, 2.0)
    w = w or E.w
    kernel = kernel_envelope(sys, w, V)
    return CertificateContext(kernel, local_max(kernel.H, V, Side.RIGHT), E, V, w)


def theory_bound(ctx: CertificateContext, pu: PartitionOfUnity, U: CoverWindow) -> Tuple[float, float]:
    """(sum of H_# G_U w, sup G_U) with G_U evaluated on the support box of H_#"""
    window = ctx.h_sharp.window
    g_u = _g_u_values(pu, U, ctx.V, window)
    weights = ctx.w.evaluate(window.carrier, window.points)
    return float((np.abs(ctx.h_sharp.values).ravel() * g_u * weights).sum()), float(g_u.max(initial=0.0))


def certificate_sweep(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    radii: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    E: Optional[SolidSpaceSpec] = None,
    V: Optional[Neighborhood] = None,
    w: Optional[Weight] = None,
) -> List[CertificateRow]:
    """Error certificate for each box radius of the exhaustion.

    The empirical operator norm is the max over random probes and all atoms of
    ||P f - P_U f||_E / ||f||_{W(L^inf, E)}; the theory bound is ||H_# G_U||_{l^1_w}.
    """
    _require_exact(pu)
    _check_pair(sys, pu)
    ctx = certificate_context(sys, E, V, w)
    probes = random_functions(sys.window, trials, seed) + list(sys.atoms)
    denominators = [amalgam_norm(f, AmalgamKind.LEFT, ctx.space, ctx.V) for f in probes]
    pieces = [_pieces(sys, pu, sys.vector(f)) for f in probes]
    rows = []
    for radius in radii:
        U = CoverWindow.box(sys.carrier, radius)
        outside = 1.0 - cover_masks(sys, pu, U)
        worst = 0.0
        for rows_f, denom in zip(pieces, denominators):
            if denom == 0:
                continue
            residual = sys.function((rows_f * outside).sum(axis=0))
            worst = max(worst, space_norm(residual, ctx.space) / denom)
        bound, g_sup = theory_bound(ctx, pu, U)
        rows.append(CertificateRow(
            U_radius=int(radius),
            empirical_opnorm=worst,
            theory_bound=bound,
            probe_count=len(probes),
            g_u_sup=g_sup,
        ))
        logger.debug(f"U radius {radius}: empirical {worst:.3e}, bound {bound:.3e}")
    return rows


def approx_error_certificate(
    sys: MoleculeSystem,
    pu: PartitionOfUnity,
    U: Union[CoverWindow, int],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    E: Optional[SolidSpaceSpec] = None,
) -> CertificateRow:
    """Single-U certificate; U given as a box radius or an explicit window"""
    if isinstance(U, int):
        return certificate_sweep(sys, pu, [U], trials, seed, E)[0]
    _require_exact(pu)
    ctx = certificate_context(sys, E)
    probes = random_functions(sys.window, trials, seed) + list(sys.atoms)
    worst = 0.0
    for f in probes:
        denom = amalgam_norm(f, AmalgamKind.LEFT, ctx.space, ctx.V)
        if denom > 0:
            worst = max(worst, space_norm(approx_residual(sys, pu, U, f), ctx.space) / denom)
    bound, g_sup = theory_bound(ctx, pu, U)
    return CertificateRow(
        U_radius=U.radius,
        empirical_opnorm=worst,
        theory_bound=bound,
        probe_count=len(probes),
        g_u_sup=g_sup,
    )


def exhaustion_radii(initial_radius: int, doublings: int) -> List[int]:
    """r, 2r, 4r, ... with `doublings` doublings"""
    return [initial_radius * 2 ** k for k in range(doublings + 1)]


def smallest_certified_radius(rows: Sequence[CertificateRow], eps: float) -> Optional[int]:
    """First radius of the exhaustion from which the empirical error stays at or below eps"""
    radius = None
    for row in reversed(rows):
        if row.empirical_opnorm > eps:
            break
        radius = row.U_radius
    return radius

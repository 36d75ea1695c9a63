"""
Molecule systems: atoms, dual atoms, a common envelope, and the operators they induce.

All operators act on the system's working window, which contains the supports of
every atom and dual atom, so the dense matrices below compute exact finite sums.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .group import GFunc, GroupCarrier, Neighborhood, RelSepSet, Side, Weight, Window, convolve, translate
from .spaces import AmalgamKind, DiscreteCoeffs, amalgam_norm
from ..models.report_models import DominationReport, EnvelopeReport, FrameBounds, OperatorNormRow
from ..utils.config import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DOMINATION_TOL,
    EIGEN_CUTOFF,
    REPRODUCTION_TOL,
)
from ..utils.exceptions import CarrierError, NodeSetError, NotAFrameError, PreconditionError
from ..utils.serialization import carrier_from_dict, carrier_to_dict

logger = logging.getLogger(__name__)


def _window_for(carrier: GroupCarrier, functions: Sequence[GFunc]) -> Window:
    if carrier.is_finite:
        return Window.full(carrier)
    window = Window.empty(carrier)
    for f in functions:
        window = window.union(f.window)
    return window


def _columns(functions: Sequence[GFunc], window: Window) -> np.ndarray:
    return np.stack([f.on(window) for f in functions], axis=1)


def gram_pinv(gram: np.ndarray, cutoff: float = EIGEN_CUTOFF) -> Tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse of a self-adjoint positive semidefinite matrix and its retained eigenvalues"""
    evals, evecs = np.linalg.eigh((gram + gram.conj().T) / 2)
    top = evals.max() if evals.size else 0.0
    if top <= 0:
        raise NotAFrameError(0.0, float(top))
    keep = evals > cutoff * top
    inv = (evecs[:, keep] / evals[keep]) @ evecs[:, keep].conj().T
    return inv, evals[keep]


def canonical_dual(atoms: Sequence[GFunc], window: Optional[Window] = None) -> Tuple[GFunc, ...]:
    """Canonical dual family S^+ phi_lambda, S the frame operator restricted to the span"""
    carrier = atoms[0].carrier
    window = window or _window_for(carrier, atoms)
    phi = _columns(atoms, window)
    inv, _ = gram_pinv(phi.conj().T @ phi)
    # (Phi Phi^*)^+ Phi = Phi (Phi^* Phi)^+
    psi = phi @ inv
    return tuple(GFunc.from_window(window, psi[:, j]) for j in range(psi.shape[1]))


def tight_envelope(nodes: RelSepSet, *families: Sequence[GFunc]) -> GFunc:
    """h(x) = max over lambda and families of |f_lambda(lambda + x)|"""
    h = GFunc.zero(nodes.carrier)
    for family in families:
        for lam, f in zip(nodes, family):
            h = h.maximum(translate(f, lam, Side.RIGHT))
    return h.abs()


@dataclass(frozen=True, eq=False)
class MoleculeSystem:
    """Atoms phi_lambda and dual atoms psi_lambda enveloped by translates of h"""
    nodes: RelSepSet
    atoms: Tuple[GFunc, ...]
    duals: Tuple[GFunc, ...]
    envelope: GFunc
    window: Window
    canonical_dual: bool = False
    envelope_verified: bool = field(init=False)

    def __post_init__(self):
        atoms, duals = tuple(self.atoms), tuple(self.duals)
        if not (len(atoms) == len(duals) == len(self.nodes)):
            raise NodeSetError(f"{len(atoms)} atoms and {len(duals)} duals for {len(self.nodes)} nodes")
        carriers = {f.carrier for f in atoms + duals} | {self.nodes.carrier, self.envelope.carrier}
        if len(carriers) != 1:
            raise CarrierError(self.nodes.carrier.label, "atoms, duals, envelope and nodes must share a carrier")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "duals", duals)
        object.__setattr__(self, "envelope_verified", verify_envelope(self).ok)

    @classmethod
    def build(
        cls,
        nodes: RelSepSet,
        atoms: Sequence[GFunc],
        duals: Optional[Sequence[GFunc]] = None,
        envelope: Optional[GFunc] = None,
        window: Optional[Window] = None,
        canonical: Optional[bool] = None,
    ) -> "MoleculeSystem":
        """Assemble a system; missing duals become the canonical dual, a missing envelope the tight one"""
        atoms = tuple(atoms)
        window = window or _window_for(nodes.carrier, atoms + tuple(duals or ()))
        if duals is None:
            duals = canonical_dual(atoms, window)
            canonical = True
        elif canonical:
            expected = canonical_dual(atoms, window)
            gap = max(np.abs(d.on(window) - e.on(window)).max() for d, e in zip(duals, expected))
            if gap > REPRODUCTION_TOL:
                raise PreconditionError(f"duals differ from the canonical dual by {gap:.3e}")
        if envelope is None:
            envelope = tight_envelope(nodes, atoms, duals)
        return cls(nodes, atoms, duals, envelope, window, bool(canonical))

    @classmethod
    def from_translates(
        cls,
        nodes: RelSepSet,
        atom: GFunc,
        dual: Optional[GFunc] = None,
        window: Optional[Window] = None,
    ) -> "MoleculeSystem":
        """Atoms L_lambda g and duals L_lambda g~ (canonical dual when g~ is omitted)"""
        atoms = tuple(translate(atom, lam) for lam in nodes)
        duals = None if dual is None else tuple(translate(dual, lam) for lam in nodes)
        return cls.build(nodes, atoms, duals, window=window)

    @property
    def carrier(self) -> GroupCarrier:
        return self.nodes.carrier

    @cached_property
    def phi(self) -> np.ndarray:
        """Atoms as window-by-node columns"""
        return _columns(self.atoms, self.window)

    @cached_property
    def psi(self) -> np.ndarray:
        return _columns(self.duals, self.window)

    @cached_property
    def projector_matrix(self) -> np.ndarray:
        """Dense matrix of P = S C on the working window"""
        return self.phi @ self.psi.conj().T

    def vector(self, f: GFunc) -> np.ndarray:
        if f.carrier != self.carrier:
            raise CarrierError(f.carrier.label, f"system lives on {self.carrier.label}")
        return f.on(self.window)

    def function(self, vector: np.ndarray) -> GFunc:
        return GFunc.from_window(self.window, vector)

    def to_document(self) -> Dict[str, Any]:
        """JSON document: carrier, window, nodes and sparse (element, re, im) triples"""
        return {
            "carrier": carrier_to_dict(self.carrier),
            "window": {"offset": list(self.window.offset), "shape": list(self.window.shape)},
            "nodes": [list(x) for x in self.nodes],
            "atoms": [f.to_triples() for f in self.atoms],
            "duals": [f.to_triples() for f in self.duals],
            "envelope": self.envelope.to_triples(),
            "canonical_dual": self.canonical_dual,
        }

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "MoleculeSystem":
        carrier = carrier_from_dict(doc["carrier"])
        window = Window(carrier, tuple(doc["window"]["offset"]), tuple(doc["window"]["shape"]))
        nodes = RelSepSet(carrier, tuple(tuple(x) for x in doc["nodes"]))
        atoms = tuple(GFunc.from_triples(carrier, t) for t in doc["atoms"])
        duals = tuple(GFunc.from_triples(carrier, t) for t in doc["duals"])
        envelope = GFunc.from_triples(carrier, doc["envelope"])
        return cls(nodes, atoms, duals, envelope, window, bool(doc.get("canonical_dual", False)))


def verify_envelope(sys: MoleculeSystem, tolerance: float = 0.0) -> EnvelopeReport:
    """max over lambda, x of |phi_lambda(x)| - h(x - lambda), and the same for the duals"""
    window = sys.window
    excess = []
    for family in (sys.atoms, sys.duals):
        worst = -np.inf
        for lam, f in zip(sys.nodes, family):
            shifted = translate(sys.envelope, lam, Side.LEFT)
            grid = window.union(shifted.window)
            worst = max(worst, float((np.abs(f.on(grid)) - shifted.on(grid).real).max()))
        excess.append(worst)
    worst = max(excess)
    return EnvelopeReport(
        ok=worst <= tolerance,
        worst_excess=worst,
        atoms_excess=excess[0],
        duals_excess=excess[1],
    )


def analysis(sys: MoleculeSystem, f: GFunc) -> DiscreteCoeffs:
    """C f = (<f, psi_lambda>)_lambda"""
    return DiscreteCoeffs(sys.nodes, sys.psi.conj().T @ sys.vector(f))


def synthesis(sys: MoleculeSystem, c: DiscreteCoeffs) -> GFunc:
    """S c = sum_lambda c_lambda phi_lambda"""
    return sys.function(sys.phi @ c.values)


def adjoint_analysis(sys: MoleculeSystem, c: DiscreteCoeffs) -> GFunc:
    """C' c = sum_lambda c_lambda psi_lambda"""
    return sys.function(sys.psi @ c.values)


def adjoint_synthesis(sys: MoleculeSystem, f: GFunc) -> DiscreteCoeffs:
    """S' f = (<f, phi_lambda>)_lambda"""
    return DiscreteCoeffs(sys.nodes, sys.phi.conj().T @ sys.vector(f))


def projector(sys: MoleculeSystem, f: GFunc) -> GFunc:
    """P f = sum_lambda <f, psi_lambda> phi_lambda"""
    return sys.function(sys.phi @ (sys.psi.conj().T @ sys.vector(f)))


def frame_bounds(sys: MoleculeSystem) -> FrameBounds:
    """Extreme nonzero eigenvalues of the frame operator of the atoms"""
    _, evals = gram_pinv(sys.phi.conj().T @ sys.phi)
    return FrameBounds(lower=float(evals.min()), upper=float(evals.max()), rank=int(evals.size))


def operator_norms(sys: MoleculeSystem, exponents: Sequence[float] = (1.0, 2.0, np.inf)) -> List[OperatorNormRow]:
    """Induced l^p norms of C (window to nodes) and S (nodes to window)"""
    rows = []
    c_mat = sys.psi.conj().T
    for p in exponents:
        rows.append(OperatorNormRow(
            p=float(p),
            analysis=float(np.linalg.norm(c_mat, ord=p)),
            synthesis=float(np.linalg.norm(sys.phi, ord=p)),
        ))
    return rows


@dataclass(frozen=True, eq=False)
class KernelEnvelope:
    """Dominating kernel H with its left and right amalgam norms"""
    H: GFunc
    left_norm: float
    right_norm: float


def _difference_window(h: GFunc) -> Window:
    if h.carrier.is_finite:
        return Window.full(h.carrier)
    shape = h.values.shape
    return Window(h.carrier, tuple(1 - s for s in shape), tuple(2 * s - 1 for s in shape))


def _translate_table(sys: MoleculeSystem) -> Tuple[Window, np.ndarray]:
    """Window of y with some h(y - lambda) != 0 and the matrix A[y, lambda] = h(y - lambda)"""
    h, carrier = sys.envelope, sys.carrier
    if carrier.is_finite:
        ys = Window.full(carrier)
    else:
        lo = sys.nodes.array.min(axis=0) + np.asarray(h.offset)
        hi = sys.nodes.array.max(axis=0) + np.asarray(h.offset) + np.asarray(h.values.shape) - 1
        ys = Window.bounding(carrier, np.stack([lo, hi]))
    h_window = h.window
    padded = np.append(h.on(h_window).real, 0.0)
    idx = h_window.index((ys.points[:, None, :] - sys.nodes.array[None, :, :]).reshape(-1, carrier.dim))
    return ys, padded[idx].reshape(ys.size, len(sys.nodes))


def kernel_envelope(
    sys: MoleculeSystem,
    w: Optional[Weight] = None,
    V: Optional[Neighborhood] = None,
) -> KernelEnvelope:
    """H(x) = max_y sum_lambda h(y - lambda) h(y + x - lambda)"""
    if sys.envelope.is_zero():
        zero = GFunc.zero(sys.carrier)
        return KernelEnvelope(zero, 0.0, 0.0)
    V = V or sys.nodes.neighborhood
    w = w or Weight()
    ys, table = _translate_table(sys)
    xs = _difference_window(sys.envelope)
    padded = np.vstack([table, np.zeros((1, table.shape[1]))])
    shift = ys.shift_table(xs.points)
    values = np.empty(xs.size)
    for k in range(xs.size):
        values[k] = np.einsum("ij,ij->i", table, padded[shift[:, k]]).max()
    H = GFunc.from_window(xs, values)
    return KernelEnvelope(
        H=H,
        left_norm=amalgam_norm(H, AmalgamKind.LEFT, w, V),
        right_norm=amalgam_norm(H, AmalgamKind.RIGHT, w, V),
    )


def random_functions(window: Window, trials: int, seed: int = DEFAULT_SEED) -> List[GFunc]:
    """Complex Gaussian functions on the window"""
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((trials, window.size)) + 1j * rng.standard_normal((trials, window.size))
    return [GFunc.from_window(window, row) for row in draws]


def check_domination(
    sys: MoleculeSystem,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    kernel: Optional[KernelEnvelope] = None,
    probes: Optional[Sequence[GFunc]] = None,
) -> DominationReport:
    """|P f(x)| <= (|f| * H)(x) pointwise over random (or given) inputs"""
    kernel = kernel or kernel_envelope(sys)
    probes = list(probes) if probes is not None else random_functions(sys.window, trials, seed)
    worst = -np.inf
    for f in probes:
        pf = projector(sys, f)
        bound = convolve(f.abs(), kernel.H)
        grid = pf.window.union(bound.window)
        worst = max(worst, float((np.abs(pf.on(grid)) - bound.on(grid).real).max(initial=0.0)))
    report = DominationReport(ok=worst <= DOMINATION_TOL, worst_excess=worst, trials=len(probes))
    if not report.ok:
        logger.warning(f"Domination by |f| * H fails by {worst:.3e}")
    return report

"""
Invariant Suite - Property checks per module family, reported as pass/fail with the measured value
"""

import logging
from typing import List, Sequence

import numpy as np

from ..core.atomic import check_domination, frame_bounds, projector, random_functions, verify_envelope
from ..core.base_suite import BaseSuite
from ..core.cover import CoverWindow, factor_theta, smallest_certified_radius
from ..core.group import (
    GFunc,
    GroupCarrier,
    Neighborhood,
    RelSepSet,
    Window,
    check_fgl_shells,
    check_grs,
    check_weight_admissible,
    convolve,
    convolve_fft,
    involute,
    spreadness,
)
from ..core.multiplier import (
    atomic_basis,
    cd_norm,
    counterexample_block_system,
    equivalence_ratios,
    gram_matrix,
    inverse_multiplier,
    left_invertibility_witness,
    multiplier,
    multiplier_matrix,
    spectrum_report,
)
from ..core.spaces import (
    AmalgamKind,
    SolidSpaceSpec,
    amalgam_norm,
    amalgam_ratios,
    product_embedding_constant,
    sampling_constant,
    solidity_excess,
)
from ..frames.gabor import (
    isometric_stft,
    localization_operator,
    modulation_norm_ratios,
    random_signals,
    reconstruction_error,
    stft,
    tf_shift,
)
from ..frames.localized import frame_multiplier
from ..models.report_models import EquivalenceRow, InvariantGroup
from ..utils.config import (
    ALGEBRA_PAIRS,
    CERTIFICATE_FINAL_TOL,
    CERTIFICATE_SLACK,
    CERTIFIED_EPSILONS,
    ENVELOPE_RTOL,
    EQUIVALENCE_SPREAD_MAX,
    EQUIVALENCE_UNIFORMITY,
    INVARIANT_N_MAX,
    INVERSE_TOL,
    MOYAL_TOL,
    MULTIPLIER_FINAL_TOL,
    MULTIPLIER_UNIFORMITY,
    ORACLE_TOL,
    ORACLE_TRIALS,
    PARTITION_TOL,
    PROJECTOR_TOL,
    REPRODUCTION_TOL,
    SINGULAR_TOL,
    SPACE_TRIALS,
    SPECTRAL_GAP_FACTOR,
)
from ..utils.exceptions import MaskRejectedError
from .certificate import CertificateResult
from .context_builder import ExperimentContext
from .equivalence import THETA_LABEL

ROUND_TRIP_PROBES = 5


def _unit_vectors(carrier: GroupCarrier) -> List[tuple]:
    return [tuple(int(i == k) for i in range(carrier.dim)) for k in range(carrier.dim)]


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def _non_increasing(values: Sequence[float]) -> bool:
    return all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(values, values[1:]))


class InvariantSuite(BaseSuite):
    """Runs the property checks of every module family on the experiment context"""

    def __init__(self, certificate: CertificateResult, equivalence: Sequence[EquivalenceRow]):
        super().__init__("Invariants")
        self.certificate = certificate
        self.equivalence = list(equivalence)

    def process(self, ctx: ExperimentContext) -> List[InvariantGroup]:
        self.log(f"Checking invariants for {ctx.config.name}")
        groups = [
            self._group(ctx),
            self._spaces(ctx),
            self._atomic(ctx),
            self._cover(ctx),
            self._multiplier(ctx),
        ]
        if ctx.gabor is not None:
            groups.append(self._gabor(ctx))
        if ctx.frame is not None:
            groups.append(self._localized(ctx))
        for group in groups:
            for check in group.checks:
                if not check.passed:
                    self.log(f"{group.group}.{check.name} failed (value {check.value})", logging.WARNING)
        passed = sum(g.passed for g in groups)
        self.log(f"{passed}/{len(groups)} groups passed")
        return groups

    def _group(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="group")
        carrier, w, seed = ctx.carrier, ctx.weight, ctx.config.seed
        group.add("axioms", carrier.check_group_axioms(seed=seed))

        report = check_weight_admissible(w, carrier, 4 if carrier.dim > 1 else 8)
        group.add("weight_admissible", report.submultiplicative and report.symmetric, report.worst_ratio, w.name)

        generators = _unit_vectors(carrier)
        grs = check_grs(w, carrier, generators, n_max=INVARIANT_N_MAX)
        group.add("grs", grs.passes, max(g.tail for g in grs.generators))
        fgl = check_fgl_shells(w, carrier, generators, n_max=INVARIANT_N_MAX)
        group.add("fgl", fgl.passes, fgl.ball_roots[-1], f"shell ratio max {fgl.shell_ratio_max:.6g}")

        window = Window.full(carrier) if carrier.is_finite else Window.box(carrier, 4)
        f, g = random_functions(window, 2, seed)
        gap = (convolve(f, g) - convolve_fft(f, g)).max_abs()
        group.add("convolution_fft", gap <= 1e-9 * max(1.0, f.norm2() * g.norm2()), gap)

        rho = spreadness(ctx.system.nodes, ctx.V)
        group.add("spreadness", rho <= len(ctx.V), float(rho))
        return group

    def _spaces(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="spaces")
        window, V, seed = ctx.system.window, ctx.V, ctx.config.seed
        functions = random_functions(window, SPACE_TRIALS, seed)
        rng = np.random.default_rng(seed)
        shrunk = [f * GFunc.from_window(window, rng.uniform(size=window.size)) for f in functions]

        excess = max(solidity_excess(f, g, E, V) for f, g in zip(functions, shrunk) for E in ctx.spaces)
        group.add("solidity", excess <= 1e-12, excess)

        mismatch = max(
            abs(amalgam_norm(f, AmalgamKind.RIGHT, E, V) - amalgam_norm(involute(f), AmalgamKind.LEFT, E, V))
            / max(amalgam_norm(f, AmalgamKind.RIGHT, E, V), 1e-300)
            for f in functions for E in ctx.spaces
        )
        group.add("right_is_involuted_left", mismatch <= 1e-12, mismatch)

        ratios = amalgam_ratios(functions, ctx.weight, V)
        group.add("weak_vs_l1", ratios.weak_min >= 1 - 1e-12 and np.isfinite(ratios.weak_max), ratios.weak_max,
                  f"[{ratios.weak_min:.6g}, {ratios.weak_max:.6g}] over {ratios.trials} functions")
        group.add("strong_vs_left", ratios.strong_min >= 1 - 1e-12 and np.isfinite(ratios.strong_max),
                  ratios.strong_max, f"right/left in [{ratios.right_min:.6g}, {ratios.right_max:.6g}]")

        product = product_embedding_constant(list(zip(functions, shrunk)), V)
        group.add("product_embedding", product <= (1 + 1e-12) / len(V), product, f"bound 1/|V| = {1 / len(V):.6g}")

        rho = spreadness(ctx.system.nodes, V)
        sampling = max(sampling_constant(functions, ctx.system.nodes, E, V) for E in ctx.spaces)
        group.add("sampling", sampling <= rho * (1 + 1e-12), sampling, f"spreadness {rho}")
        return group

    def _atomic(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="atomic")
        sys, cfg = ctx.system, ctx.config
        P, phi = sys.projector_matrix, sys.phi
        reproduction = float(np.abs(P @ phi - phi).max())
        idempotent = float(np.linalg.norm(P @ P - P, 2))
        adjoint = float(np.linalg.norm(P - P.conj().T, 2))
        group.add("reproduction", reproduction <= REPRODUCTION_TOL, reproduction)
        group.add("idempotent", idempotent <= PROJECTOR_TOL, idempotent)
        group.add("self_adjoint", adjoint <= PROJECTOR_TOL, adjoint)

        envelope = verify_envelope(sys, ENVELOPE_RTOL * sys.envelope.max_abs())
        group.add("envelope", envelope.ok, envelope.worst_excess)
        domination = check_domination(sys, cfg.trials, cfg.seed)
        group.add("domination", domination.ok, domination.worst_excess, f"{domination.trials} probes")

        bounds = frame_bounds(sys)
        group.add("frame_bounds", bounds.lower > 0, bounds.ratio, f"A={bounds.lower:.6g}, B={bounds.upper:.6g}")
        return group

    def _cover(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="cover")
        pu, carrier = ctx.partition, ctx.carrier
        if pu.exact_partition:
            err = float(np.abs(pu.total() - 1.0).max())
            group.add("partition_exact", err <= PARTITION_TOL, err)
        excess = pu.verify_envelope()
        group.add("partition_envelope", excess <= PARTITION_TOL, excess)

        rows = self.certificate.rows
        bounds = [r.theory_bound for r in rows]
        covers = CoverWindow.box(carrier, rows[-1].U_radius).covers(carrier)
        group.add("certificate_monotone", _non_increasing(bounds), bounds[-1])
        if covers:
            group.add("certificate_final", bounds[-1] <= CERTIFICATE_FINAL_TOL, bounds[-1])
        else:
            group.add("certificate_final", bounds[-1] <= bounds[0], bounds[-1], "U does not exhaust the carrier")
        slack = max(r.empirical_opnorm - CERTIFICATE_SLACK * r.theory_bound for r in rows)
        group.add("certificate_empirical", slack <= 1e-12, max(r.empirical_opnorm for r in rows))
        for eps in CERTIFIED_EPSILONS:
            radius = smallest_certified_radius(rows, eps)
            detail = f"eps {eps:g}" if radius is not None else f"eps {eps:g} not reached"
            group.add(f"certified_U_{eps:g}", radius is not None or not covers,
                      None if radius is None else float(radius), detail)

        errors = [r.error for r in self.certificate.multiplier_errors]
        identity = [r.error for r in self.certificate.identity_errors]
        if covers:
            group.add("multiplier_approx_final", errors[-1] <= MULTIPLIER_FINAL_TOL, errors[-1])
            if ctx.mask.sup_norm <= 1.0:
                group.add(
                    "multiplier_approx_uniform",
                    errors[-1] <= MULTIPLIER_UNIFORMITY * identity[-1] + 1e-12,
                    errors[-1],
                    f"identity error {identity[-1]:.6g}",
                )
        else:
            group.add("multiplier_approx_final", errors[-1] <= errors[0], errors[-1], "U does not exhaust the carrier")

        if ctx.theta is not None:
            _, eta = factor_theta(ctx.theta)
            err = float(np.abs(eta.matrix - pu.on(eta.window)).max())
            group.add("theta_factorization", err <= REPRODUCTION_TOL, err)

        self._equivalence(group)
        return group

    def _equivalence(self, group: InvariantGroup) -> None:
        spread = [r for r in self.equivalence if not r.space.startswith("modulation")]
        if spread:
            ok = all(0 < r.c_min <= r.c_max < np.inf and r.ratio <= EQUIVALENCE_SPREAD_MAX for r in spread)
            group.add("equivalence_spread", ok, max(r.ratio for r in spread))
        generic = [r.ratio for r in spread if not r.space.endswith(THETA_LABEL)]
        if len(generic) > 1:
            agreement = max(generic) / min(generic)
            group.add("equivalence_uniformity", agreement <= EQUIVALENCE_UNIFORMITY, agreement)
        harness = [r for r in self.equivalence if r.space.startswith("modulation")]
        if harness:
            group.add("modulation_finite", all(0 < r.c_min <= r.c_max < np.inf for r in harness),
                      max(r.ratio for r in harness))

    def _multiplier(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="multiplier")
        sys, mask, cfg = ctx.system, ctx.mask, ctx.config
        if mask.is_real:
            spectrum = spectrum_report(multiplier_matrix(sys, mask))
            group.add("self_adjoint", spectrum.self_adjoint_error <= PROJECTOR_TOL, spectrum.self_adjoint_error)
            in_range = spectrum.eigen_min >= mask.lower - 1e-10 and spectrum.eigen_max <= mask.upper + 1e-10
            group.add("spectrum_in_mask_range", in_range, spectrum.eigen_max,
                      f"[{spectrum.eigen_min:.6g}, {spectrum.eigen_max:.6g}] in [{mask.lower:.6g}, {mask.upper:.6g}]")
            gram = gram_matrix(sys, mask, ctx.weight)
            group.add("cd_bound", gram.cd_norm <= gram.cd_bound * (1 + 1e-9), gram.cd_norm,
                      f"bound {gram.cd_bound:.6g}")
        if mask.positive_bounded:
            self._gram(group, ctx, gram)
        else:
            f = projector(sys, random_functions(sys.window, 1, cfg.seed)[0])
            try:
                inverse_multiplier(sys, mask, f)
                refused = False
            except MaskRejectedError:
                refused = True
            group.add("inverse_refused", refused)

        block, sign = counterexample_block_system(8)
        sigma = spectrum_report(multiplier_matrix(block, sign)).sigma_min
        group.add("sign_mask_singular", sigma <= SINGULAR_TOL, sigma)

        self._cd_algebra(group, ctx)

        if ctx.partition.exact_partition:
            U = CoverWindow.box(ctx.carrier, self.certificate.rows[-1].U_radius)
            witness = left_invertibility_witness(sys, ctx.partition, U)
            group.add("left_invertibility", witness > 0, witness)
        return group

    def _gram(self, group: InvariantGroup, ctx: ExperimentContext, gram) -> None:
        sys, mask = ctx.system, ctx.mask
        group.add("penrose", gram.penrose_error <= REPRODUCTION_TOL, gram.penrose_error)
        dim = atomic_basis(sys).shape[1]
        group.add("rank", gram.rank == dim, float(gram.rank), f"dim S = {dim}")
        bounds = frame_bounds(sys)
        floor = SPECTRAL_GAP_FACTOR * gram.sigma_max * (mask.lower / mask.upper) * (bounds.lower / bounds.upper)
        group.add("spectral_gap", gram.spectral_gap >= floor, gram.spectral_gap, f"floor {floor:.6g}")

        worst = 0.0
        for probe in random_functions(sys.window, ROUND_TRIP_PROBES, ctx.config.seed):
            f = projector(sys, probe)
            back = inverse_multiplier(sys, mask, multiplier(sys, mask, f), gram)
            worst = max(worst, (back - f).norm2() / f.norm2())
        group.add("inverse_round_trip", worst <= INVERSE_TOL, worst)

    def _cd_algebra(self, group: InvariantGroup, ctx: ExperimentContext) -> None:
        nodes = ctx.system.nodes
        if nodes.subgroup_witness() is not None:
            carrier = GroupCarrier.cyclic(16)
            nodes = RelSepSet(carrier, tuple(carrier.elements()))
        rng = np.random.default_rng(ctx.config.seed)
        n = len(nodes)
        submultiplicative, dominates_opnorm = True, True
        worst = 0.0
        for _ in range(ALGEBRA_PAIRS):
            A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a, _ = cd_norm(A, nodes, ctx.weight)
            b, _ = cd_norm(B, nodes, ctx.weight)
            ab, _ = cd_norm(A @ B, nodes, ctx.weight)
            submultiplicative &= ab <= a * b * (1 + 1e-12)
            dominates_opnorm &= a >= np.linalg.norm(A, 2) * (1 - 1e-12)
            worst = max(worst, ab / (a * b))
        group.add("cd_submultiplicative", submultiplicative, worst, f"{ALGEBRA_PAIRS} random pairs")
        group.add("cd_dominates_opnorm", dominates_opnorm)

    def _gabor(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="gabor")
        gs, cfg = ctx.gabor, ctx.config
        N, h = gs.N, gs.h
        rng = np.random.default_rng(cfg.seed)

        def draw(*shape):
            return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

        worst = 0.0
        for _ in range(ALGEBRA_PAIRS):
            f, g = draw(N), draw(N)
            energy = float(np.sum(np.abs(stft(f, g).values) ** 2))
            expected = N * np.linalg.norm(f) ** 2 * np.linalg.norm(g) ** 2
            worst = max(worst, abs(energy - expected) / expected)
        group.add("moyal", worst <= MOYAL_TOL, worst, f"{ALGEBRA_PAIRS} random pairs")

        err = reconstruction_error(gs.unit_window, gs.dual_window, gs.a, gs.b, N)
        group.add("dual_reconstruction", err <= REPRODUCTION_TOL, err)

        f = draw(N)
        err = _relative(localization_operator(h, 1.0, f), f)
        group.add("localization_identity", err <= REPRODUCTION_TOL, err)

        m = ctx.mask.m
        if ctx.mask.is_real:
            H = np.stack([localization_operator(h, m, e) for e in np.eye(N)], axis=1)
            err = float(np.abs(H - H.conj().T).max())
            group.add("localization_self_adjoint", err <= PROJECTOR_TOL, err)
            evals = np.linalg.eigvalsh((H + H.conj().T) / 2)
            inside = evals.min() >= ctx.mask.lower - 1e-10 and evals.max() <= ctx.mask.upper + 1e-10
            group.add("localization_eigen_range", inside, float(evals.max()))

        x, s = (int(c) for c in rng.integers(0, N, size=2))
        shifted = np.abs(stft(tf_shift(f, x, s, N), h).values)
        expected = np.roll(np.abs(stft(f, h).values), (x, s), axis=(0, 1))
        err = _relative(shifted, expected)
        group.add("covariance", err <= REPRODUCTION_TOL, err, f"z = ({x}, {s})")

        moved = np.roll(m.values, (x, s), axis=(0, 1))
        lhs = localization_operator(h, moved, tf_shift(f, x, s, N))
        rhs = tf_shift(localization_operator(h, m, f), x, s, N)
        err = _relative(lhs, rhs)
        group.add("commutation", err <= REPRODUCTION_TOL, err, f"z = ({x}, {s})")

        if cfg.modulation is not None:
            self._modulation_oracle(group, ctx)
        return group

    def _modulation_oracle(self, group: InvariantGroup, ctx: ExperimentContext) -> None:
        """Brute-force piecewise modulation norms against the generic equivalence pathway, per trial"""
        gs, sys, carrier = ctx.gabor, ctx.system, ctx.carrier
        pu = ctx.theta or ctx.partition
        signals = random_signals(gs.N, ORACLE_TRIALS, ctx.config.seed)
        vectors = [sys.vector(isometric_stft(f, gs.h)) for f in signals]
        worst = 0.0
        for p, q, s, t in ctx.config.modulation.combos:
            brute = modulation_norm_ratios(gs.h, pu, signals, p, q, s, t, ctx.weight)
            E = SolidSpaceSpec(carrier, p, q, ctx.weight)
            B = SolidSpaceSpec(carrier, s, t)
            generic = equivalence_ratios(sys, pu, [E], B, vectors, Neighborhood.trivial(carrier))[:, 0]
            worst = max(worst, float(np.max(np.abs(brute - generic) / generic)))
        group.add("modulation_oracle", worst <= ORACLE_TOL, worst, f"{ORACLE_TRIALS} trials per combination")

    def _localized(self, ctx: ExperimentContext) -> InvariantGroup:
        group = InvariantGroup(group="localized")
        frame = ctx.frame
        err = frame.reconstruction_error()
        group.add("reconstruction", err <= REPRODUCTION_TOL, err)
        norm, _ = frame.localization(ctx.weight)
        opnorm = float(np.linalg.norm(frame.gram, 2))
        group.add("gram_localization", np.isfinite(norm) and norm >= opnorm * (1 - 1e-12), norm,
                  f"operator norm {opnorm:.6g}")
        rng = np.random.default_rng(ctx.config.seed)
        f = rng.standard_normal(len(frame.index)) + 1j * rng.standard_normal(len(frame.index))
        err = _relative(frame_multiplier(frame, 1.0, f), f)
        group.add("frame_multiplier_identity", err <= REPRODUCTION_TOL, err)
        return group

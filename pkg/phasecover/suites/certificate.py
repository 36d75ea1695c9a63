"""
Certificate Suite - Error certificate of P_U and multiplier approximation along the U-exhaustion
"""

from dataclasses import dataclass, field
from typing import List

from ..core.base_suite import BaseSuite
from ..core.cover import certificate_sweep, exhaustion_radii, smallest_certified_radius
from ..core.multiplier import SymbolMask, approx_multiplier_errors
from ..models.report_models import ApproximationRow, CertificateRow
from ..utils.config import CERTIFIED_EPSILONS
from .context_builder import ExperimentContext


@dataclass
class CertificateResult:
    rows: List[CertificateRow]
    multiplier_errors: List[ApproximationRow] = field(default_factory=list)
    identity_errors: List[ApproximationRow] = field(default_factory=list)


class CertificateSuite(BaseSuite):
    """Empirical ||P - P_U|| against ||H_# G_U||_{l^1_w} for each U, and ||M_{m,U} - M_m|| on S"""

    def __init__(self):
        super().__init__("Certificate")

    def process(self, ctx: ExperimentContext) -> CertificateResult:
        cfg = ctx.config
        radii = exhaustion_radii(cfg.exhaustion.initial_radius, cfg.exhaustion.doublings)
        self.log(f"Sweeping U radii {radii} with {cfg.trials} probes")
        sys, pu = ctx.system, ctx.partition
        rows = certificate_sweep(sys, pu, radii, cfg.trials, cfg.seed, ctx.spaces[0], ctx.V, ctx.weight)
        errors = approx_multiplier_errors(sys, pu, ctx.mask, radii, cfg.trials, cfg.seed)
        identity = approx_multiplier_errors(sys, pu, SymbolMask.constant(sys.window), radii, cfg.trials, cfg.seed)
        final = rows[-1]
        self.log(
            f"Final U radius {final.U_radius}: empirical {final.empirical_opnorm:.3e}, "
            f"bound {final.theory_bound:.3e}, multiplier error {errors[-1].error:.3e}"
        )
        for eps in CERTIFIED_EPSILONS:
            radius = smallest_certified_radius(rows, eps)
            self.log(f"eps {eps:g}: " + (f"certified from U radius {radius}" if radius is not None else "not reached"))
        return CertificateResult(rows, errors, identity)

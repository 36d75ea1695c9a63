"""
Equivalence Suite - Norm-equivalence ratio spreads for eta, theta and modulation-norm pathways
"""

from typing import List

from ..core.base_suite import BaseSuite
from ..core.multiplier import norm_equivalence_rows
from ..frames.gabor import modulation_norm_harness
from ..models.report_models import EquivalenceRow
from .context_builder import ExperimentContext

THETA_LABEL = "[theta]"


class EquivalenceSuite(BaseSuite):
    """||f||_E against ||(||P(f eta_gamma)||_B)_gamma||_{E_d} over random f in the atomic span"""

    def __init__(self):
        super().__init__("Equivalence")

    def process(self, ctx: ExperimentContext) -> List[EquivalenceRow]:
        cfg = ctx.config
        self.log(f"Comparing {len(ctx.spaces)} space(s) against B = {ctx.block_space.name}, {cfg.trials} trials")
        rows = norm_equivalence_rows(
            ctx.system, ctx.partition, ctx.spaces, ctx.block_space, cfg.trials, cfg.seed, ctx.V
        )
        if ctx.theta is not None:
            rows += norm_equivalence_rows(
                ctx.system, ctx.theta, ctx.spaces, ctx.block_space, cfg.trials, cfg.seed, ctx.V, label=THETA_LABEL
            )
        if cfg.modulation is not None and ctx.gabor is not None:
            pu = ctx.theta or ctx.partition
            rows += modulation_norm_harness(
                ctx.gabor.h, pu, cfg.modulation.combos, ctx.weight, cfg.trials, cfg.seed
            )
        worst = max(row.ratio for row in rows)
        self.log(f"{len(rows)} rows, worst spread {worst:.4g}")
        return rows

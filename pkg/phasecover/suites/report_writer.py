"""
Report Writer - Emits the artifact directory: CSV tables, invariants JSON and plot data
"""

from pathlib import Path
from typing import List, Sequence

import pandas as pd

from ..core.base_suite import BaseSuite
from ..models.report_models import EquivalenceRow, InvariantGroup
from ..utils.config import (
    CERTIFICATE_COLUMNS,
    CERTIFICATE_FILE,
    EQUIVALENCE_COLUMNS,
    EQUIVALENCE_FILE,
    INVARIANTS_FILE,
    PLOTDATA_DIR,
)
from ..utils.serialization import write_json, write_table
from .certificate import CertificateResult

ERROR_CURVE_FILE = "error_vs_U.csv"
ERROR_CURVE_COLUMNS = [
    "U_radius", "empirical_opnorm", "theory_bound", "multiplier_error", "identity_error", "config_hash"
]


def certificate_table(result: CertificateResult, config_hash: str) -> pd.DataFrame:
    rows = [
        {
            "U_radius": r.U_radius,
            "empirical_opnorm": r.empirical_opnorm,
            "theory_bound": r.theory_bound,
            "config_hash": config_hash,
        }
        for r in result.rows
    ]
    return pd.DataFrame(rows, columns=CERTIFICATE_COLUMNS)


def equivalence_table(rows: Sequence[EquivalenceRow], config_hash: str) -> pd.DataFrame:
    data = [{**row.model_dump(), "config_hash": config_hash} for row in rows]
    return pd.DataFrame(data, columns=EQUIVALENCE_COLUMNS)


def error_curve_table(result: CertificateResult, config_hash: str) -> pd.DataFrame:
    """Certificate and multiplier errors per exhaustion step"""
    data = []
    for cert, mult, ident in zip(result.rows, result.multiplier_errors, result.identity_errors):
        data.append({
            "U_radius": cert.U_radius,
            "empirical_opnorm": cert.empirical_opnorm,
            "theory_bound": cert.theory_bound,
            "multiplier_error": mult.error,
            "identity_error": ident.error,
            "config_hash": config_hash,
        })
    return pd.DataFrame(data, columns=ERROR_CURVE_COLUMNS)


def invariants_document(groups: Sequence[InvariantGroup], config_hash: str) -> dict:
    return {
        "config_hash": config_hash,
        "passed": all(g.passed for g in groups),
        "groups": {
            g.group: {"passed": g.passed, "checks": [c.model_dump() for c in g.checks]}
            for g in groups
        },
    }


class ReportWriterSuite(BaseSuite):
    """Writes every artifact of one run into the output directory"""

    def __init__(self, out_dir: Path):
        super().__init__("ReportWriter")
        self.out_dir = Path(out_dir)

    def process(self, ctx) -> List[str]:
        """`ctx` is (config hash, certificate result, equivalence rows, invariant groups)"""
        config_hash, certificate, equivalence, groups = ctx
        files = {
            CERTIFICATE_FILE: certificate_table(certificate, config_hash),
            EQUIVALENCE_FILE: equivalence_table(equivalence, config_hash),
            f"{PLOTDATA_DIR}/{ERROR_CURVE_FILE}": error_curve_table(certificate, config_hash),
        }
        for name, df in files.items():
            write_table(df, self.out_dir / name)
        write_json(self.out_dir / INVARIANTS_FILE, invariants_document(groups, config_hash))
        written = sorted([*files, INVARIANTS_FILE])
        self.log(f"Wrote {len(written)} files to {self.out_dir}")
        return written

"""
Experiment Orchestrator - Coordinates the suites of one experiment run and baseline verification
"""

import logging
import math
import tempfile
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from ..models.experiment_models import ExperimentConfig
from ..models.report_models import RunSummary
from ..suites.certificate import CertificateSuite
from ..suites.context_builder import ContextBuilderSuite, load_config
from ..suites.equivalence import EquivalenceSuite
from ..suites.invariants import InvariantSuite
from ..suites.report_writer import ReportWriterSuite
from ..utils.config import CERTIFICATE_FILE, EQUIVALENCE_FILE, PLOTDATA_DIR, VERIFY_CELL_TOL
from ..utils.exceptions import MissingBaselineError, VerificationMismatchError
from ..utils.parallel import ordered_map, resolve_threads

logger = logging.getLogger(__name__)

ConfigSource = Union[str, Path, ExperimentConfig]


def _cells_match(expected: str, actual: str, tol: float = VERIFY_CELL_TOL) -> bool:
    """Numeric cells agree to tol * max(1, |a|, |b|); anything else must match exactly"""
    try:
        a, b = float(expected), float(actual)
    except ValueError:
        return expected == actual
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def compare_tables(expected_path: Path, actual_path: Path, name: str, tol: float = VERIFY_CELL_TOL) -> int:
    """Cell-by-cell comparison of two CSV files; returns the number of compared cells"""
    expected = pd.read_csv(expected_path, dtype=str, keep_default_na=False)
    actual = pd.read_csv(actual_path, dtype=str, keep_default_na=False)
    if list(expected.columns) != list(actual.columns):
        raise VerificationMismatchError(name, -1, "<header>", list(expected.columns), list(actual.columns))
    if len(expected) != len(actual):
        raise VerificationMismatchError(name, min(len(expected), len(actual)), "<rows>", len(expected), len(actual))
    for row in range(len(expected)):
        for column in expected.columns:
            a, b = expected.at[row, column], actual.at[row, column]
            if not _cells_match(a, b, tol):
                raise VerificationMismatchError(name, row, column, a, b)
    return expected.size


class ExperimentOrchestrator:
    """Runs context building, the analysis suites, the invariant checks and the report writer"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = resolve_threads(threads)

    def run(self, config: ConfigSource, out_dir: Union[str, Path]) -> RunSummary:
        """Run one experiment and write its artifacts into out_dir"""
        if not isinstance(config, ExperimentConfig):
            config = load_config(config)
        logger.info(f"=== Running experiment {config.name} (seed {config.seed}, {self.threads} thread(s)) ===")

        builder = ContextBuilderSuite(self.threads)
        ctx = builder.run(config)

        analysis = [EquivalenceSuite(), CertificateSuite()]
        equivalence, certificate = ordered_map(lambda suite: suite.run(ctx), analysis, self.threads)

        invariants = InvariantSuite(certificate, equivalence)
        groups = invariants.run(ctx)

        writer = ReportWriterSuite(Path(out_dir))
        files = writer.run((ctx.config_hash, certificate, equivalence, groups))

        for suite in [builder, *analysis, invariants, writer]:
            suite.cleanup()

        summary = RunSummary(
            config_hash=ctx.config_hash,
            out_dir=str(out_dir),
            files=files,
            invariants_passed=all(g.passed for g in groups),
            groups={g.group: g.passed for g in groups},
        )
        if not summary.invariants_passed:
            failed = [name for name, ok in summary.groups.items() if not ok]
            logger.warning(f"Invariant groups failed: {', '.join(failed)}")
        logger.info(f"=== Experiment {config.name} complete: {len(files)} files in {out_dir} ===")
        return summary

    def verify(self, config: ConfigSource, baseline: Union[str, Path]) -> List[str]:
        """Recompute the experiment and diff every CSV against the baseline directory"""
        baseline = Path(baseline)
        tables = self.baseline_tables(baseline)
        with tempfile.TemporaryDirectory(prefix="phasecover-verify-") as tmp:
            summary = self.run(config, tmp)
            for name in tables:
                actual = Path(tmp) / name
                if not actual.exists():
                    raise VerificationMismatchError(name, -1, "<file>", "present", "missing")
                cells = compare_tables(baseline / name, actual, name)
                logger.info(f"{name}: {cells} cells match")
        logger.info(f"Baseline {baseline} verified against config hash {summary.config_hash}")
        return tables

    @staticmethod
    def baseline_tables(baseline: Path) -> List[str]:
        """CSV files of a baseline directory, relative paths; required tables must exist"""
        if not baseline.is_dir():
            raise MissingBaselineError(str(baseline))
        for required in (CERTIFICATE_FILE, EQUIVALENCE_FILE):
            if not (baseline / required).exists():
                raise MissingBaselineError(str(baseline / required))
        tables = [CERTIFICATE_FILE, EQUIVALENCE_FILE]
        tables += sorted(p.relative_to(baseline).as_posix() for p in (baseline / PLOTDATA_DIR).glob("*.csv"))
        return tables

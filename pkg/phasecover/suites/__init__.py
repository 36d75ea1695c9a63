"""
Pipeline stages of an experiment run
"""

from .context_builder import ContextBuilderSuite, ExperimentContext
from .equivalence import EquivalenceSuite
from .certificate import CertificateSuite, CertificateResult
from .invariants import InvariantSuite
from .report_writer import ReportWriterSuite

__all__ = [
    'ContextBuilderSuite',
    'ExperimentContext',
    'EquivalenceSuite',
    'CertificateSuite',
    'CertificateResult',
    'InvariantSuite',
    'ReportWriterSuite'
]

"""
Pydantic models for check reports and artifact rows
"""

from typing import Dict, List, Optional
from pydantic import BaseModel, Field


class WeightAdmissibilityReport(BaseModel):
    """Submultiplicativity and symmetry of a weight on a sample box"""
    weight: str = Field(description="Weight name, e.g. poly(2)")
    submultiplicative: bool
    symmetric: bool
    worst_ratio: float = Field(description="max w(x+y)/(w(x)w(y)) over the checked pairs")
    checked_pairs: int
    admissibility_constant: Optional[float] = Field(None, description="Largest C with w >= C max(u, v) over the box")


class ModerateReport(BaseModel):
    """Moderateness constant of v with respect to w"""
    weight: str
    reference: str
    constant: float = Field(description="Smallest C' with v(x+y) <= C' w(x) v(y)")
    checked_pairs: int


class GRSGeneratorReport(BaseModel):
    """w(n*g)^(1/n) sequence for one generator"""
    generator: List[int]
    values: List[float]
    tail: float
    passes: bool


class GRSReport(BaseModel):
    weight: str
    n_max: int
    tolerance: float = Field(description="Tail verdict threshold: last value < 1 + tolerance")
    generators: List[GRSGeneratorReport]

    @property
    def passes(self) -> bool:
        return all(g.passes for g in self.generators)


class FGLShellReport(BaseModel):
    """Weight growth along word-length shells of a generated subgroup"""
    weight: str
    n_max: int
    shell_ratios: List[float] = Field(description="sup/inf of w on each shell U^n minus U^(n-1)")
    ball_roots: List[float] = Field(description="sup of w(x)^(1/n) over U^n")
    shell_ratio_max: float
    passes: bool


class EnvelopeReport(BaseModel):
    """Domination of atoms and dual atoms by translates of the envelope"""
    ok: bool
    worst_excess: float
    atoms_excess: float
    duals_excess: float


class DominationReport(BaseModel):
    """Pointwise domination |P f| <= |f| * H over random inputs"""
    ok: bool
    worst_excess: float
    trials: int


class FrameBounds(BaseModel):
    """Frame bounds on the span: extreme nonzero eigenvalues of the frame operator"""
    lower: float
    upper: float
    rank: int

    @property
    def ratio(self) -> float:
        return self.upper / self.lower


class AmalgamRatioReport(BaseModel):
    """Empirical constants between amalgam norms of the same functions"""
    trials: int
    weak_min: float = Field(description="min of weak amalgam over ||f||_{l^1_w}")
    weak_max: float
    strong_min: float = Field(description="min of strong over left amalgam")
    strong_max: float
    right_min: float = Field(description="min of right over left amalgam")
    right_max: float


class OperatorNormRow(BaseModel):
    """Induced l^p norms of analysis and synthesis"""
    p: float
    analysis: float
    synthesis: float


class CertificateRow(BaseModel):
    """One step of the U-exhaustion error certificate"""
    U_radius: int
    empirical_opnorm: float
    theory_bound: float
    probe_count: int = 0
    g_u_sup: float = Field(0.0, description="sup norm of the auxiliary function G_U")


class EquivalenceRow(BaseModel):
    """Norm-equivalence ratio spread for one space"""
    space: str
    p: float
    q: float
    weight: str
    trial_count: int
    c_min: float
    c_max: float
    ratio: float


class ApproximationRow(BaseModel):
    """Probe-norm error of an approximate operator at one exhaustion step"""
    U_radius: int
    error: float
    probe_count: int


class SpectrumReport(BaseModel):
    """Spectrum of a restricted operator on the atomic subspace"""
    dimension: int
    eigen_min: float
    eigen_max: float
    sigma_min: float
    sigma_max: float
    self_adjoint_error: float


class GramReport(BaseModel):
    """Gram matrix diagnostics"""
    rank: int
    sigma_max: float
    spectral_gap: float
    cd_norm: float
    cd_norm_bound: float
    cd_norm_pinv: float
    penrose_error: float


class InvariantCheck(BaseModel):
    """Outcome of one property check"""
    name: str
    passed: bool
    value: Optional[float] = None
    detail: Optional[str] = None


class InvariantGroup(BaseModel):
    """Property checks of one suite"""
    group: str
    checks: List[InvariantCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value: Optional[float] = None, detail: Optional[str] = None) -> None:
        self.checks.append(InvariantCheck(name=name, passed=bool(passed), value=value, detail=detail))


class RunSummary(BaseModel):
    """What a run produced"""
    config_hash: str
    out_dir: str
    files: List[str]
    invariants_passed: bool
    groups: Dict[str, bool] = Field(default_factory=dict)

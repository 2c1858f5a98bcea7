from pydantic import BaseModel

from src.schemas.joint import JointRowModel
from src.schemas.lottery import LotteryModel
from src.services.axioms import AxiomReport


class AxiomReportModel(BaseModel):
    axiom: str
    passed: bool
    checks: int
    skipped: int
    violations: list[dict]

    @classmethod
    def from_domain(cls, report: AxiomReport) -> 'AxiomReportModel':
        return cls(axiom=report.axiom, passed=report.passed, checks=report.checks, skipped=report.skipped,
                   violations=report.violations)


class AxiomsReportModel(BaseModel):
    passed: bool
    axioms: list[AxiomReportModel]


class MomentRowModel(BaseModel):
    i: int
    j: int
    recovered: float
    direct: float
    abs_err: float


class MomentReportModel(BaseModel):
    mode: str
    order: int
    grid: int
    tol: float
    residuals: dict[str, float]
    rows: list[MomentRowModel]
    passed: bool


class Example1Report(BaseModel):
    seed: int
    menus: int
    marginals_equal: bool
    mismatched_menus: int
    joint_mu: list[JointRowModel]
    joint_mu_prime: list[JointRowModel]
    divergence_mu: str
    divergence_mu_prime: str
    passed: bool


class EstimateModel(BaseModel):
    law: str
    value: float
    stderr: float
    z: float


class TripleModel(BaseModel):
    p: LotteryModel
    q: LotteryModel
    r: LotteryModel
    angle: float
    formula: float
    estimates: list[EstimateModel]
    passed: bool


class InvarianceModel(BaseModel):
    radii: tuple[float, float]
    max_z: float
    passed: bool


class Example2Report(BaseModel):
    seed: int
    n: int
    radii: list[float]
    triples: list[TripleModel]
    invariance: list[InvarianceModel]
    footnote: list[EstimateModel]
    footnote_eu_exact_zero: bool
    footnote_wu_positive: bool
    footnote_identity_failures: int
    passed: bool

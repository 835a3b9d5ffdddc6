# models/__init__.py
from .errors import *
from .scenario import (
    Behavior,
    CriticalMap,
    MatchingKind,
    MatchingModel,
    PlanKind,
    QualitySource,
    RegimeKind,
    ReviewPlan,
    RunParams,
    ScenarioConfig,
    SelectivityRegime,
    SigmaKind,
    SigmaPolicy,
    TieBreakRule,
    VotingKind,
    VotingRule,
)
from .score import AggregateScore, ReviewerProfile, ReviewSet, ScorePmf
from .exact import AvgScorePmf, ExactInstance
from .report import (
    REPORT_COLUMNS,
    AccuracyReport,
    BoundKind,
    GuaranteeSpec,
    ImprovementReport,
    ReportCsv,
    ReportRow,
)

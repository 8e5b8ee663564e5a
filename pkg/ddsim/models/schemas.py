"""
Pydantic models for DDSim.
Experiment configuration, run-log entries, sweep tasks and run reports.
"""
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional
import uuid

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ddsim.constants import (
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED,
    FL_CELLS_PER_WINDOW,
    FL_TOTAL_TIME,
    PROBE_STATE_COUNT,
    SPIN_BOSON_COUPLING,
    SPIN_BOSON_FOCK_DIM,
    SPIN_BOSON_OMEGA_A,
    SPIN_BOSON_OMEGA_C,
)


class ExperimentName(str, Enum):
    """Named experiments the runner knows."""
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"
    QP_ERROR = "qp_error"
    Q2P2_LIMIT = "q2p2_limit"
    SPIN_BOSON_CONVERGENCE = "spin_boson_convergence"
    FL_VERDICT = "fl_verdict"
    CUSTOM = "custom"


class TaskStatus(str, Enum):
    """Status of a sweep task in the queue."""
    PENDING = "PENDING"
    IN_PROGRESS = "IN_PROGRESS"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


# ===========================================
# Configuration sections
# ===========================================

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExperimentSection(_Section):
    """[experiment]"""
    name: ExperimentName
    seed: int = DEFAULT_SEED
    tolerance: Optional[float] = Field(default=None, gt=0)
    description: Optional[str] = None


class GridSection(_Section):
    """[grid]: spatial grid [-L, L) with N points."""
    L: float = Field(default=64.0, gt=0)
    N: int = Field(default=16384, ge=2)

    @field_validator("N")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"N must be a power of two, got {value}")
        return value


class ModelSection(_Section):
    """[model]"""
    kind: Optional[str] = None
    gamma: Optional[float] = Field(default=None, gt=0)
    cutoff: Optional[float] = Field(default=None, gt=0)
    omega_c: float = SPIN_BOSON_OMEGA_C
    omega_a: float = SPIN_BOSON_OMEGA_A
    coupling: float = SPIN_BOSON_COUPLING
    fock_dim: int = Field(default=SPIN_BOSON_FOCK_DIM, ge=2)
    max_fock_dim: int = Field(default=1024, ge=2)
    env: str = "cauchy_momentum"
    qubit: str = "plus"
    center: float = 0.0
    width: float = Field(default=1.0, gt=0)
    probe_states: int = Field(default=PROBE_STATE_COUNT, ge=1)


class ScheduleSection(_Section):
    """[schedule]"""
    t_values: List[float] = Field(default_factory=lambda: [1.0])
    n_values: List[int] = Field(default_factory=lambda: [1])
    cycle: str = "1,X"
    dt: Optional[float] = Field(default=None, gt=0)
    t_max: Optional[float] = Field(default=None, gt=0)
    samples_per_pulse: int = Field(default=5, ge=1)
    derivative_step: float = Field(default=1e-5, gt=0)

    @field_validator("t_values")
    @classmethod
    def _non_negative_times(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("t_values must not be empty")
        if any(t < 0 for t in value):
            raise ValueError("t_values must be non-negative")
        return value

    @field_validator("n_values")
    @classmethod
    def _increasing_counts(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("n_values must not be empty")
        if any(n < 1 for n in value):
            raise ValueError("n_values must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_values must be strictly increasing")
        return value


class FriedrichsLeeSection(_Section):
    """[friedrichs_lee]"""
    t: float = Field(default=FL_TOTAL_TIME, gt=0)
    n_values: List[int] = Field(default_factory=lambda: [5, 10, 20, 40])
    ds: Optional[float] = Field(default=None, gt=0)
    cells_per_window: int = Field(default=FL_CELLS_PER_WINDOW, ge=1)
    probe_center: float = -1.5
    probe_width: float = Field(default=0.5, gt=0)

    @field_validator("n_values")
    @classmethod
    def _positive_counts(cls, value: List[int]) -> List[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("n_values must be a non-empty list of positive integers")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_values must be strictly increasing")
        return value


class OutputSection(_Section):
    """[output]"""
    dir: str = DEFAULT_OUTPUT_DIR
    filename: Optional[str] = None


class ExperimentConfig(_Section):
    """A complete, validated experiment configuration."""
    experiment: ExperimentSection
    grid: GridSection = Field(default_factory=GridSection)
    model: ModelSection = Field(default_factory=ModelSection)
    schedule: ScheduleSection = Field(default_factory=ScheduleSection)
    friedrichs_lee: FriedrichsLeeSection = Field(default_factory=FriedrichsLeeSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _custom_needs_model(self) -> "ExperimentConfig":
        if self.experiment.name == ExperimentName.CUSTOM and not self.model.kind:
            raise ValueError("custom experiments need model.kind")
        return self

    @property
    def name(self) -> ExperimentName:
        return self.experiment.name


# ===========================================
# Run records
# ===========================================

class RunLogEntry(BaseModel):
    """Single entry in a run log."""
    timestamp: datetime = Field(default_factory=datetime.utcnow)
    step: str
    action: str
    experiment: Optional[str] = None
    input_data: Optional[Dict[str, Any]] = None
    output_data: Optional[Dict[str, Any]] = None
    success: bool = True
    error_message: Optional[str] = None


class SweepTask(BaseModel):
    """One point of a parameter sweep."""
    id: str = Field(default_factory=lambda: str(uuid.uuid4()))
    index: int
    experiment: str
    params: Dict[str, Any] = Field(default_factory=dict)
    status: TaskStatus = TaskStatus.PENDING
    created_at: datetime = Field(default_factory=datetime.utcnow)
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error_message: Optional[str] = None


class CheckResult(BaseModel):
    """Outcome of one acceptance or precondition check."""
    name: str
    passed: bool
    detail: str = ""
    severity: Severity = Severity.ERROR


class ValidationReport(BaseModel):
    """Dry-run precondition report for a configuration."""
    experiment: Optional[str] = None
    config_path: Optional[str] = None
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def violations(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and c.severity == Severity.ERROR]

    @property
    def warnings(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and c.severity == Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.violations


class RunReport(BaseModel):
    """Summary of one experiment run with its checks and run log."""
    id: str = Field(default_factory=lambda: str(uuid.uuid4()))
    run_id: str
    created_at: datetime = Field(default_factory=datetime.utcnow)
    experiment: str
    config: Dict[str, Any] = Field(default_factory=dict)

    csv_path: Optional[str] = None
    columns: List[str] = Field(default_factory=list)
    row_count: int = 0

    tolerance: Optional[float] = None
    max_abs_dev: Optional[float] = None
    checks: List[CheckResult] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    passed: bool = True

    run_log: List[RunLogEntry] = Field(default_factory=list)
    processing_time_seconds: Optional[float] = None
    jobs: int = 1
    version: str = "1.0.0"


class ExperimentInfo(BaseModel):
    """Registry entry shown by list-experiments."""
    name: ExperimentName
    description: str
    columns: List[str]
    preset: Optional[str] = None

"""
Experiment Runner
Validates a configuration, runs its experiment on the sweep queue and
writes the CSV, the run report and the run log.
"""
import time
import uuid
from pathlib import Path
from typing import List, Optional, Tuple

from ddsim.exceptions import ConfigError, DDSimError, ToleranceExceededError
from ddsim.experiments import handlers
from ddsim.experiments.catalog import ExperimentEntry, get_experiment
from ddsim.models.schemas import CheckResult, ExperimentConfig, RunReport, Severity, ValidationReport
from ddsim.services.csv_writer import write_csv
from ddsim.services.reporting import ReportService
from ddsim.services.run_logger import RunLogger
from ddsim.services.task_queue import SweepQueue


def validate_config(config: ExperimentConfig, config_path: Optional[str] = None) -> ValidationReport:
    """Check every precondition of config without computing or writing anything."""
    checks = handlers.precheck(config)
    return ValidationReport(experiment=config.name.value, config_path=config_path, checks=checks)


class ExperimentRunner:
    """
    Runs one configured experiment end to end.

    Workflow:
    1. Dry-run precondition checks (violations abort the run)
    2. Sweep points on the worker pool, gathered in config order
    3. CSV table under <out>/<filename>.csv
    4. Run report with acceptance checks, plus the run log
    """

    def __init__(self, data_dir: str = "./data", jobs: Optional[int] = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

        self.run_logger = RunLogger(str(self.data_dir))
        self.report_service = ReportService(str(self.data_dir))
        self.queue = SweepQueue(jobs)

    def validate(self, config: ExperimentConfig, config_path: Optional[str] = None) -> ValidationReport:
        return validate_config(config, config_path)

    def _tolerance(self, config: ExperimentConfig, entry: ExperimentEntry) -> Optional[float]:
        return config.experiment.tolerance if config.experiment.tolerance is not None else entry.tolerance

    def _deviation_checks(
        self,
        result: handlers.ExperimentResult,
        tolerance: Optional[float]
    ) -> Tuple[Optional[float], List[CheckResult]]:
        if not result.deviation_columns or not result.rows:
            return None, []
        checks = []
        worst = 0.0
        for column in result.deviation_columns:
            deviation = max(float(row[column]) for row in result.rows)
            worst = max(worst, deviation)
            if tolerance is not None:
                checks.append(CheckResult(
                    name=f"max_{column}",
                    passed=deviation <= tolerance,
                    detail=f"max {column} = {deviation:.3e}, tolerance {tolerance:.1e}",
                ))
        return worst, checks

    def run(self, config: ExperimentConfig) -> RunReport:
        """
        Run the configured experiment.

        Args:
            config: Validated configuration; output goes to the runner's data_dir

        Returns:
            The saved RunReport

        Raises:
            ConfigError: A precondition is violated
            NumericalGuardError: Norm drift or Fock leakage beyond its guard
            ToleranceExceededError: An acceptance check failed; CSV and report are still written
        """
        start_time = time.time()
        run_id = str(uuid.uuid4())
        entry = get_experiment(config.name)
        self.run_logger.start_session(run_id, entry.name.value)

        try:
            validation = self.validate(config)
            self.run_logger.log_step(
                step="validate_config",
                action="Checked experiment preconditions",
                input_data=config.model_dump(mode="json"),
                output_data={
                    "violations": [c.detail for c in validation.violations],
                    "warnings": [c.detail for c in validation.warnings],
                },
                success=validation.ok,
            )
            if not validation.ok:
                problems = "; ".join(f"{c.name}: {c.detail}" for c in validation.violations)
                raise ConfigError(f"Configuration violates preconditions: {problems}")

            self.run_logger.log_step(
                step="run_sweep",
                action=f"Running {entry.name.value} on {self.queue.jobs} worker(s)",
            )
            result = entry.handler(config, self.queue)

            tolerance = self._tolerance(config, entry)
            max_abs_dev, deviation_checks = self._deviation_checks(result, tolerance)
            checks = list(result.checks) + deviation_checks
            checks.extend(validation.warnings)

            csv_path = self.data_dir / f"{config.output.filename or entry.name.value}.csv"
            write_csv(csv_path, entry.columns, result.rows)
            self.run_logger.log_step(
                step="write_csv",
                action=f"Wrote {len(result.rows)} rows",
                output_data={"path": str(csv_path), "columns": entry.columns},
            )

            failed = [c for c in checks if not c.passed and c.severity == Severity.ERROR]
            run_log = self.run_logger.end_session(
                success=not failed,
                final_result={
                    "csv_path": str(csv_path),
                    "max_abs_dev": max_abs_dev,
                    "failed_checks": [c.name for c in failed],
                },
            )

            report = self.report_service.create_report(
                run_id=run_id,
                experiment=entry.name.value,
                config=config.model_dump(mode="json"),
                columns=entry.columns,
                row_count=len(result.rows),
                checks=checks,
                run_log=run_log,
                csv_path=str(csv_path),
                tolerance=tolerance,
                max_abs_dev=max_abs_dev,
                summary=result.summary,
                processing_time=time.time() - start_time,
                jobs=self.queue.jobs,
            )

        except DDSimError as e:
            self.run_logger.log_step(
                step="run_error",
                action=f"Run failed: {e}",
                success=False,
                error_message=f"{type(e).__name__}: {e}",
            )
            self.run_logger.end_session(success=False, final_result={"error": str(e)})
            raise

        if not report.passed:
            names = ", ".join(c.name for c in failed)
            raise ToleranceExceededError(f"{entry.name.value}: failed checks: {names} (report {report.id})")
        return report

    def export_report_text(self, report: RunReport) -> str:
        return self.report_service.export_report_text(report)


def create_runner(data_dir: str = "./data", jobs: Optional[int] = None) -> ExperimentRunner:
    """Factory function to create a runner."""
    return ExperimentRunner(data_dir=data_dir, jobs=jobs)

"""
Reporting Service
Builds, stores and renders run reports.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from ddsim.models.schemas import CheckResult, RunLogEntry, RunReport, Severity
from ddsim.utils.template_loader import TemplateLoader, get_template_loader


REPORT_TEMPLATE = "run_report"


class ReportService:
    """Service for run reports under <out>/reports."""

    def __init__(self, data_dir: str = "./data", templates: Optional[TemplateLoader] = None):
        self.data_dir = Path(data_dir)
        self.reports_dir = self.data_dir / "reports"
        self.reports_dir.mkdir(parents=True, exist_ok=True)
        self.templates = templates or get_template_loader()

    def create_report(
        self,
        run_id: str,
        experiment: str,
        config: Dict[str, Any],
        columns: List[str],
        row_count: int,
        checks: List[CheckResult],
        run_log: List[RunLogEntry],
        csv_path: Optional[str] = None,
        tolerance: Optional[float] = None,
        max_abs_dev: Optional[float] = None,
        summary: Optional[Dict[str, Any]] = None,
        processing_time: Optional[float] = None,
        jobs: int = 1
    ) -> RunReport:
        """
        Assemble and save the report of a finished run.

        A run passes when no ERROR-severity check failed.
        """
        passed = all(c.passed for c in checks if c.severity == Severity.ERROR)
        report = RunReport(
            run_id=run_id,
            experiment=experiment,
            config=config,
            csv_path=csv_path,
            columns=columns,
            row_count=row_count,
            tolerance=tolerance,
            max_abs_dev=max_abs_dev,
            checks=checks,
            summary=summary or {},
            passed=passed,
            run_log=run_log,
            processing_time_seconds=processing_time,
            jobs=jobs,
        )
        self._save_report(report)
        return report

    def _save_report(self, report: RunReport) -> None:
        filepath = self.reports_dir / f"{report.id}.json"
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(report.model_dump(mode='json'), f, indent=2, default=str)

    def get_report(self, report_id: str) -> Optional[RunReport]:
        """Load a report by ID."""
        filepath = self.reports_dir / f"{report_id}.json"
        if not filepath.exists():
            return None
        with open(filepath, 'r', encoding='utf-8') as f:
            return RunReport(**json.load(f))

    def list_reports(self, limit: int = 50) -> List[dict]:
        """List recent run reports."""
        reports = []
        for filepath in sorted(
            self.reports_dir.glob("*.json"),
            key=lambda x: x.stat().st_mtime,
            reverse=True
        )[:limit]:
            with open(filepath, 'r', encoding='utf-8') as f:
                data = json.load(f)
                reports.append({
                    "id": data.get("id"),
                    "created_at": data.get("created_at"),
                    "experiment": data.get("experiment"),
                    "passed": data.get("passed"),
                    "csv_path": data.get("csv_path"),
                })
        return reports

    def export_report_text(self, report: RunReport) -> str:
        """Render the report through the Jinja2 template, or the built-in layout."""
        if self.templates.has_template(REPORT_TEMPLATE):
            return self.templates.render(REPORT_TEMPLATE, report=report)
        return self._fallback_text(report)

    def _fallback_text(self, report: RunReport) -> str:
        lines = [
            "=" * 70,
            "DDSIM RUN REPORT",
            "=" * 70,
            "",
            f"Report ID: {report.id}",
            f"Run ID: {report.run_id}",
            f"Experiment: {report.experiment}",
            f"Generated: {report.created_at}",
            f"Processing Time: {report.processing_time_seconds:.2f}s" if report.processing_time_seconds else "",
            f"Result: {'PASSED' if report.passed else 'FAILED'}",
            "",
            "-" * 70,
            "OUTPUT",
            "-" * 70,
            f"CSV: {report.csv_path}",
            f"Columns: {', '.join(report.columns)}",
            f"Rows: {report.row_count}",
        ]
        if report.max_abs_dev is not None and report.tolerance is not None:
            lines.append(f"Max abs deviation: {report.max_abs_dev:.3e} (tolerance {report.tolerance:.1e})")

        lines.extend(["", "-" * 70, "CHECKS", "-" * 70])
        for check in report.checks:
            mark = "PASS" if check.passed else check.severity.value
            lines.append(f"[{mark}] {check.name}: {check.detail}")

        if report.summary:
            lines.extend(["", "-" * 70, "SUMMARY", "-" * 70])
            for key, value in report.summary.items():
                lines.append(f"{key}: {value}")

        lines.extend(["", "-" * 70, "RUN LOG", "-" * 70])
        for entry in report.run_log:
            status = "ok" if entry.success else "FAILED"
            lines.append(f"{status} [{entry.timestamp}] {entry.step}: {entry.action}")

        lines.extend(["", "=" * 70, "END OF REPORT", "=" * 70])
        return "\n".join(lines)

"""
Run Logger Service
Records every step of an experiment run as JSON lines for traceability.
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ddsim.models.schemas import RunLogEntry


MAX_STRING_LENGTH = 1000
MAX_LIST_LENGTH = 50


class RunLogger:
    """Service for logging the steps of a run to <out>/run_logs."""

    def __init__(self, data_dir: str = "./data"):
        self.data_dir = Path(data_dir)
        self.logs_dir = self.data_dir / "run_logs"
        self.logs_dir.mkdir(parents=True, exist_ok=True)

        self._current_run_id: Optional[str] = None
        self._experiment: Optional[str] = None
        self._session_logs: List[RunLogEntry] = []
        self._step_counter: int = 0

    @property
    def run_id(self) -> Optional[str]:
        return self._current_run_id

    def start_session(self, run_id: str, experiment: Optional[str] = None) -> None:
        """Start logging a new run."""
        self._current_run_id = run_id
        self._experiment = experiment
        self._session_logs = []
        self._step_counter = 0

        self.log_step(
            step="session_start",
            action="Started experiment run",
            input_data={"run_id": run_id, "experiment": experiment}
        )

    def log_step(
        self,
        step: str,
        action: str,
        input_data: Optional[Dict[str, Any]] = None,
        output_data: Optional[Dict[str, Any]] = None,
        success: bool = True,
        error_message: Optional[str] = None
    ) -> RunLogEntry:
        """
        Log a single step of the run.

        Args:
            step: Step identifier (e.g., "validate_config", "write_csv")
            action: Human-readable description
            input_data: Parameters of the step
            output_data: Results of the step
            success: Whether the step succeeded
            error_message: Error message if failed

        Returns:
            The created RunLogEntry
        """
        self._step_counter += 1

        entry = RunLogEntry(
            timestamp=datetime.utcnow(),
            step=f"{self._step_counter:03d}_{step}",
            action=action,
            experiment=self._experiment,
            input_data=self._sanitize_data(input_data),
            output_data=self._sanitize_data(output_data),
            success=success,
            error_message=error_message
        )

        self._session_logs.append(entry)

        # Written immediately so a crashed run still leaves its trail
        if self._current_run_id:
            self._append_to_file(entry)

        return entry

    def _sanitize_value(self, value: Any) -> Any:
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, np.ndarray):
            value = value.tolist()
        if isinstance(value, complex):
            return {"re": value.real, "im": value.imag}
        if isinstance(value, str) and len(value) > MAX_STRING_LENGTH:
            return value[:MAX_STRING_LENGTH] + "... [truncated]"
        if isinstance(value, (list, tuple)):
            items = [self._sanitize_value(v) for v in value[:MAX_LIST_LENGTH]]
            if len(value) > MAX_LIST_LENGTH:
                items.append(f"... [{len(value) - MAX_LIST_LENGTH} more]")
            return items
        if isinstance(value, dict):
            return {str(k): self._sanitize_value(v) for k, v in value.items()}
        return value

    def _sanitize_data(self, data: Optional[Dict[str, Any]]) -> Optional[Dict[str, Any]]:
        """Convert numpy values to plain JSON types and truncate large values."""
        if data is None:
            return None
        return {key: self._sanitize_value(value) for key, value in data.items()}

    def _append_to_file(self, entry: RunLogEntry) -> None:
        filepath = self.logs_dir / f"{self._current_run_id}.jsonl"
        with open(filepath, 'a', encoding='utf-8') as f:
            f.write(json.dumps(entry.model_dump(mode='json'), default=str) + "\n")

    def end_session(
        self,
        success: bool = True,
        final_result: Optional[Dict[str, Any]] = None
    ) -> List[RunLogEntry]:
        """
        End the current run and write its summary.

        Returns:
            List of all log entries of the run
        """
        self.log_step(
            step="session_end",
            action="Completed experiment run" if success else "Experiment run failed",
            output_data=final_result,
            success=success
        )

        logs = self._session_logs.copy()
        if self._current_run_id:
            self._save_session_summary(success, final_result)
        return logs

    def _save_session_summary(self, success: bool, final_result: Optional[Dict[str, Any]]) -> None:
        summary = {
            "run_id": self._current_run_id,
            "experiment": self._experiment,
            "started_at": self._session_logs[0].timestamp.isoformat() if self._session_logs else None,
            "ended_at": datetime.utcnow().isoformat(),
            "total_steps": len(self._session_logs),
            "success": success,
            "final_result": self._sanitize_data(final_result),
            "steps_summary": [
                {"step": log.step, "action": log.action, "success": log.success}
                for log in self._session_logs
            ]
        }

        filepath = self.logs_dir / f"{self._current_run_id}_summary.json"
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(summary, f, indent=2, default=str)

    def load_session_logs(self, run_id: str) -> List[RunLogEntry]:
        """Load the log entries of a previous run."""
        filepath = self.logs_dir / f"{run_id}.jsonl"
        if not filepath.exists():
            return []

        logs = []
        with open(filepath, 'r', encoding='utf-8') as f:
            for line in f:
                if line.strip():
                    logs.append(RunLogEntry(**json.loads(line)))
        return logs

    def list_sessions(self) -> List[dict]:
        """Summaries of all logged runs, newest first."""
        sessions = []
        for filepath in self.logs_dir.glob("*_summary.json"):
            with open(filepath, 'r', encoding='utf-8') as f:
                sessions.append(json.load(f))
        return sorted(sessions, key=lambda x: x.get('ended_at', ''), reverse=True)

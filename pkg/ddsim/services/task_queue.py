"""
Sweep Queue Service
Runs the points of a parameter sweep on a thread pool and returns
their results in task order.
"""
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

from ddsim.models.schemas import SweepTask, TaskStatus


class SweepQueue:
    """
    In-memory queue of sweep tasks.

    Tasks run concurrently on `jobs` worker threads; numpy releases the
    GIL inside FFTs and dense linear algebra.
    """

    def __init__(self, jobs: Optional[int] = None):
        self.jobs = max(1, jobs or os.cpu_count() or 1)

        self._tasks: Dict[str, SweepTask] = {}
        self._order: List[str] = []
        self._results: Dict[str, Any] = {}
        self._errors: Dict[str, BaseException] = {}
        self._handlers: Dict[str, Callable] = {}
        self._lock = threading.Lock()

    def register_handler(self, handler: Callable[[SweepTask], Any]) -> None:
        """Register the function that computes one sweep point."""
        self._handlers['default'] = handler

    def enqueue(self, experiment: str, params: Dict[str, Any]) -> SweepTask:
        """
        Add a sweep point.

        Args:
            experiment: Experiment the point belongs to
            params: Parameters handed to the handler

        Returns:
            The created task
        """
        task = SweepTask(index=len(self._order), experiment=experiment, params=params)
        self._tasks[task.id] = task
        self._order.append(task.id)
        return task

    def update_task(
        self,
        task_id: str,
        status: Optional[TaskStatus] = None,
        error_message: Optional[str] = None
    ) -> Optional[SweepTask]:
        """Update task status and timestamps."""
        with self._lock:
            task = self._tasks.get(task_id)
            if not task:
                return None

            if status:
                task.status = status
                if status == TaskStatus.IN_PROGRESS and not task.started_at:
                    task.started_at = datetime.utcnow()
                elif status in [TaskStatus.COMPLETED, TaskStatus.FAILED]:
                    task.completed_at = datetime.utcnow()

            if error_message:
                task.error_message = error_message
            return task

    def _process(self, task_id: str) -> None:
        task = self._tasks[task_id]
        self.update_task(task_id, status=TaskStatus.IN_PROGRESS)
        handler = self._handlers.get('default')
        if handler is None:
            self.update_task(task_id, status=TaskStatus.FAILED, error_message="No handler registered")
            self._errors[task_id] = RuntimeError("No handler registered")
            return
        try:
            result = handler(task)
        except Exception as e:
            self._errors[task_id] = e
            self.update_task(task_id, status=TaskStatus.FAILED, error_message=f"{type(e).__name__}: {e}")
            return
        self._results[task_id] = result
        self.update_task(task_id, status=TaskStatus.COMPLETED)

    def run_all(self) -> List[Any]:
        """
        Process every pending task.

        Returns:
            Handler results in enqueue order

        Raises:
            The first failure in task order, after all tasks have finished
        """
        pending = [tid for tid in self._order if self._tasks[tid].status == TaskStatus.PENDING]
        if self.jobs == 1 or len(pending) <= 1:
            for task_id in pending:
                self._process(task_id)
        else:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                list(pool.map(self._process, pending))

        for task_id in self._order:
            if task_id in self._errors:
                raise self._errors[task_id]
        return [self._results[task_id] for task_id in self._order]

    def map(self, experiment: str, handler: Callable[[Dict[str, Any]], Any], params_list: List[Dict[str, Any]]) -> List[Any]:
        """Enqueue one task per params dict, run them and return ordered results."""
        self.clear()
        self.register_handler(lambda task: handler(task.params))
        for params in params_list:
            self.enqueue(experiment, params)
        return self.run_all()

    def list_tasks(self, status: Optional[TaskStatus] = None) -> List[SweepTask]:
        tasks = [self._tasks[tid] for tid in self._order]
        if status:
            tasks = [t for t in tasks if t.status == status]
        return tasks

    def queue_size(self) -> int:
        return len([t for t in self._tasks.values() if t.status == TaskStatus.PENDING])

    def clear(self) -> None:
        """Forget all tasks and results."""
        self._tasks.clear()
        self._order.clear()
        self._results.clear()
        self._errors.clear()

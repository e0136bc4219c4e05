"""Domain values: agents, tasks, submissions, the IT structure and the knowledge base."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class ValidationError(ValueError):
    """Raised when a value falls outside its legal domain.

    ``errors`` holds one message per violation; ``field`` names the first.
    """

    def __init__(self, errors, field=None):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        self.field = field
        super().__init__("; ".join(self.errors))


class Form(str, Enum):
    EPISODIC = "episodic"
    COLLABORATIVE = "collaborative"


class FilterKind(str, Enum):
    PASS_THROUGH = "pass_through"
    THRESHOLD = "threshold"
    BEST_PER_TASK = "best_per_task"


@dataclass(frozen=True)
class FilterPolicy:
    """How the IT structure screens buffered submissions at each update."""

    kind: FilterKind = FilterKind.PASS_THROUGH
    threshold: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FilterKind(self.kind))
        if self.kind is FilterKind.THRESHOLD:
            if self.threshold is None:
                raise ValidationError("filter.threshold is required for the threshold policy", "threshold")
            if not 0.0 <= self.threshold <= 1.0:
                raise ValidationError("filter.threshold must be in [0,1]", "threshold")
        elif self.threshold is not None:
            raise ValidationError(
                f"filter.threshold is only allowed for the threshold policy, not {self.kind.value}",
                "threshold",
            )

    @classmethod
    def pass_through(cls) -> "FilterPolicy":
        return cls(FilterKind.PASS_THROUGH)

    @classmethod
    def threshold_at(cls, value: float) -> "FilterPolicy":
        return cls(FilterKind.THRESHOLD, float(value))

    @classmethod
    def best_per_task(cls) -> "FilterPolicy":
        return cls(FilterKind.BEST_PER_TASK)


@dataclass
class Agent:
    id: int
    motivation: float
    success_rate: float
    attempts_made: int = 0


@dataclass
class Task:
    signifier: int
    difficulty: float
    cost: float
    completion: float = 0.0
    attempts: int = 0


@dataclass(frozen=True)
class Submission:
    task_signifier: int
    agent_id: int
    tick: int
    completion_level: float


def _in_unit(x) -> bool:
    return 0.0 <= x <= 1.0


def make_agent(id: int, motivation: float, success_rate: float) -> Agent:
    errors = []
    bad = None
    if not isinstance(id, int) or isinstance(id, bool) or id < 0:
        errors.append(f"id must be a non-negative integer, got {id!r}")
        bad = bad or "id"
    if not _in_unit(motivation):
        errors.append(f"motivation out of range [0,1]: {motivation!r}")
        bad = bad or "motivation"
    if not _in_unit(success_rate):
        errors.append(f"success_rate out of range [0,1]: {success_rate!r}")
        bad = bad or "success_rate"
    if errors:
        raise ValidationError(errors, bad)
    return Agent(id, float(motivation), float(success_rate))


def make_task(signifier: int, difficulty: float, cost: float) -> Task:
    errors = []
    bad = None
    if not isinstance(signifier, int) or isinstance(signifier, bool) or signifier < 0:
        errors.append(f"signifier must be a non-negative integer, got {signifier!r}")
        bad = bad or "signifier"
    if not 0.0 <= difficulty < 1.0:
        errors.append(f"difficulty out of range [0,1): {difficulty!r}")
        bad = bad or "difficulty"
    # written as a negated comparison so NaN is rejected too
    if not cost >= 0.0 or cost == float("inf"):
        errors.append(f"cost must be a finite non-negative number: {cost!r}")
        bad = bad or "cost"
    if errors:
        raise ValidationError(errors, bad)
    return Task(signifier, float(difficulty), float(cost))


def is_complete(task: Task, threshold: float) -> bool:
    return task.completion >= threshold


class ITStructure:
    """The mediating artifact: task pool, submission buffer and update settings.

    Tasks must carry signifiers ``0..n-1`` in list order. Completion levels are
    expected to change only through the engine, which calls :meth:`touch` after
    every piece of work so the assignment index stays current.
    """

    def __init__(
        self,
        form: Form,
        tasks: list[Task],
        update_period: int = 1,
        filter_policy: FilterPolicy | None = None,
        completion_threshold: float = 1.0,
    ):
        form = Form(form)
        if not isinstance(update_period, int) or update_period < 1:
            raise ValidationError("update_period must be a positive integer", "update_period")
        if not 0.0 < completion_threshold <= 1.0:
            raise ValidationError("completion_threshold must be in (0,1]", "completion_threshold")
        for i, t in enumerate(tasks):
            if t.signifier != i:
                raise ValidationError(
                    f"task signifiers must be 0..n-1 in order; position {i} holds {t.signifier}",
                    "signifier",
                )
        self._form = form
        self.task_pool = tasks
        self.submission_buffer: list[Submission] = []
        self.update_period = update_period
        self.filter_policy = filter_policy or FilterPolicy.pass_through()
        self.completion_threshold = float(completion_threshold)
        self.open_tasks = sum(1 for t in tasks if t.completion < self.completion_threshold)
        self._first_open = 0
        self._heap: list[tuple[float, int]] | None = None

    @property
    def form(self) -> Form:
        return self._form

    def all_complete(self) -> bool:
        return self.open_tasks == 0

    def touch(self, task: Task, prior: float) -> None:
        """Record that ``task`` moved from completion ``prior`` to its current level."""
        theta = self.completion_threshold
        now = task.completion
        if prior < theta <= now:
            self.open_tasks -= 1
        if self._heap is not None and now != prior and now < theta:
            heapq.heappush(self._heap, (now, task.signifier))

    # assignment index helpers; used by policies.assign_task

    def _next_episodic(self, exclude) -> Optional[Task]:
        theta = self.completion_threshold
        pool = self.task_pool
        n = len(pool)
        i = self._first_open
        while i < n and pool[i].completion >= theta:
            i += 1
        self._first_open = i
        while i < n:
            t = pool[i]
            if t.completion < theta and t.signifier not in exclude:
                return t
            i += 1
        return None

    def _next_collaborative(self) -> Optional[Task]:
        theta = self.completion_threshold
        pool = self.task_pool
        heap = self._heap
        if heap is None:
            heap = [(t.completion, t.signifier) for t in pool if t.completion < theta]
            heapq.heapify(heap)
            self._heap = heap
        while heap:
            c, sig = heap[0]
            if pool[sig].completion == c and c < theta:
                return pool[sig]
            heapq.heappop(heap)
        return None


@dataclass
class KnowledgeBase:
    total_submissions: int = 0
    accepted_submissions: int = 0
    completed_submissions: int = 0
    tasks_completed: int = 0
    total_cost: float = 0.0
    completed_task_ids: set = field(default_factory=set)

"""Behavioral rules: participation, task assignment, the work model and filtering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import (
    Agent,
    FilterKind,
    FilterPolicy,
    Form,
    ITStructure,
    Submission,
    Task,
    ValidationError,
)


@dataclass(frozen=True)
class WorkParams:
    noise_epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.noise_epsilon < 1.0:
            raise ValidationError("noise_epsilon must be in [0,1)", "noise_epsilon")


def participates(agent: Agent, rng) -> bool:
    """One draw; true with probability ``agent.motivation``."""
    return rng.random() < agent.motivation


def assign_task(it: ITStructure, agent: Agent, checked_out_this_tick: set) -> Optional[Task]:
    """Hand a task to a participating agent, or None when nothing is available.

    Episodic: lowest-signifier incomplete task nobody has checked out this tick;
    its signifier is added to ``checked_out_this_tick``. Collaborative: the
    least-completed incomplete task, ties to the lowest signifier, shareable
    within a tick.
    """
    if it.form is Form.EPISODIC:
        task = it._next_episodic(checked_out_this_tick)
        if task is not None:
            checked_out_this_tick.add(task.signifier)
        return task
    return it._next_collaborative()


def work_gain(success_rate: float, difficulty: float, noise: float = 1.0) -> float:
    return success_rate * (1.0 - difficulty) * noise


def apply_work(agent: Agent, task: Task, form: Form, params: WorkParams, rng) -> tuple[float, float]:
    """Apply one attempt by ``agent`` to ``task`` in place.

    Returns ``(new_completion, submission_level)``; both are the task's
    completion after the attempt. Draws one noise value iff epsilon > 0.
    """
    eps = params.noise_epsilon
    if eps > 0.0:
        noise = (1.0 - eps) + (2.0 * eps) * rng.random()
    else:
        noise = 1.0
    gain = work_gain(agent.success_rate, task.difficulty, noise)
    if Form(form) is Form.EPISODIC:
        level = min(1.0, max(0.0, gain))
        new = task.completion if task.completion >= level else level
    else:
        new = min(1.0, max(0.0, task.completion + gain))
    task.completion = new
    task.attempts += 1
    agent.attempts_made += 1
    return new, new


def filter_submissions(policy: FilterPolicy, batch: Iterable[Submission], theta: float = 1.0) -> list[Submission]:
    # theta is accepted for interface symmetry; no built-in policy reads it
    batch = list(batch)
    if policy.kind is FilterKind.PASS_THROUGH:
        return batch
    if policy.kind is FilterKind.THRESHOLD:
        return [s for s in batch if s.completion_level >= policy.threshold]
    best: dict[int, int] = {}
    for i, s in enumerate(batch):
        j = best.get(s.task_signifier)
        if j is None or s.completion_level > batch[j].completion_level:
            best[s.task_signifier] = i
    keep = set(best.values())
    return [s for i, s in enumerate(batch) if i in keep]

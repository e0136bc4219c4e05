"""Discrete-tick simulation loop.

Each tick every agent, in ascending id order, draws once for participation;
a participating agent that receives a task works on it immediately, so later
agents in the same tick see earlier collaborative gains. The IT structure
flushes its buffer into the knowledge base every ``update_period`` ticks and
once more at the end of a run.

Draw order per tick and agent: one participation draw, then one noise draw
iff the agent was assigned a task and epsilon > 0. Nothing else touches the
stream once tick 1 starts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple, Optional

from . import _backend
from .model import Agent, Form, ITStructure, KnowledgeBase, Submission
from .policies import WorkParams, apply_work, assign_task, filter_submissions, participates
from .rng import RandomStream

log = logging.getLogger(__name__)


class EventKind(str, Enum):
    PARTICIPATE = "Participate"
    ASSIGN = "Assign"
    SUBMIT = "Submit"
    FLUSH = "Flush"
    COMPLETE = "Complete"


# kernel event codes, index into this tuple
EVENT_KINDS = (
    EventKind.PARTICIPATE,
    EventKind.ASSIGN,
    EventKind.SUBMIT,
    EventKind.FLUSH,
    EventKind.COMPLETE,
)


class TraceEvent(NamedTuple):
    tick: int
    kind: EventKind
    agent_id: Optional[int] = None
    task_signifier: Optional[int] = None
    completion_level: Optional[float] = None


@dataclass
class SimState:
    agents: list[Agent]
    it: ITStructure
    rng: RandomStream
    kb: KnowledgeBase = field(default_factory=KnowledgeBase)
    params: WorkParams = field(default_factory=WorkParams)
    tick: int = 1
    trace: Optional[list[TraceEvent]] = None
    seed: Optional[int] = None

    @property
    def ticks_elapsed(self) -> int:
        return self.tick - 1


def tick(state: SimState) -> SimState:
    """Advance one tick: steps 1 and 2 of the interaction loop for every agent."""
    t = state.tick
    it = state.it
    kb = state.kb
    rng = state.rng
    form = it.form
    theta = it.completion_threshold
    params = state.params
    trace = state.trace
    buffer = it.submission_buffer
    checked_out: set[int] = set()

    for agent in state.agents:
        if not participates(agent, rng):
            continue
        if trace is not None:
            trace.append(TraceEvent(t, EventKind.PARTICIPATE, agent.id))
        task = assign_task(it, agent, checked_out)
        if task is None:
            continue
        prior = task.completion
        if trace is not None:
            trace.append(TraceEvent(t, EventKind.ASSIGN, agent.id, task.signifier, prior))
        _, level = apply_work(agent, task, form, params, rng)
        it.touch(task, prior)
        buffer.append(Submission(task.signifier, agent.id, t, level))
        kb.total_submissions += 1
        if level >= theta:
            kb.completed_submissions += 1
        if trace is not None:
            trace.append(TraceEvent(t, EventKind.SUBMIT, agent.id, task.signifier, level))

    state.tick = t + 1
    return state


def flush(state: SimState) -> SimState:
    """Step 3: move the filtered buffer into the knowledge base.

    Processing cost is charged for every buffered submission, accepted or not.
    """
    it = state.it
    kb = state.kb
    theta = it.completion_threshold
    buffer = it.submission_buffer
    accepted = filter_submissions(it.filter_policy, buffer, theta)
    kb.accepted_submissions += len(accepted)
    pool = it.task_pool
    for s in buffer:
        kb.total_cost += pool[s.task_signifier].cost
    it.submission_buffer = []

    t = state.tick - 1
    newly = []
    done = kb.completed_task_ids
    for task in pool:
        if task.completion >= theta and task.signifier not in done:
            done.add(task.signifier)
            newly.append(task)
    kb.tasks_completed = len(done)

    if state.trace is not None:
        state.trace.append(TraceEvent(t, EventKind.FLUSH))
        for task in newly:
            state.trace.append(TraceEvent(t, EventKind.COMPLETE, None, task.signifier, task.completion))
    return state


def steps(state: SimState, budget: int, early_stop: bool = True) -> Iterator[SimState]:
    """Run ticks up to ``budget``, yielding the state after each tick and its flush.

    The closing flush runs after the last yield, once the generator is exhausted.
    """
    period = state.it.update_period
    while state.tick <= budget:
        t = state.tick
        tick(state)
        if t % period == 0:
            flush(state)
        yield state
        if early_stop and state.it.all_complete():
            break
    if state.it.submission_buffer:
        flush(state)


def _run_python(state: SimState, budget: int, early_stop: bool) -> None:
    for _ in steps(state, budget, early_stop):
        pass


def _run_compiled(state: SimState, budget: int, early_stop: bool) -> None:
    # the kernel starts from a fresh state; materialize() guarantees one
    import numpy as np

    it = state.it
    agents = state.agents
    pool = it.task_pool
    motivation = np.array([a.motivation for a in agents], dtype=np.float64)
    success = np.array([a.success_rate for a in agents], dtype=np.float64)
    agent_attempts = np.array([a.attempts_made for a in agents], dtype=np.int64)
    difficulty = np.array([t.difficulty for t in pool], dtype=np.float64)
    cost = np.array([t.cost for t in pool], dtype=np.float64)
    completion = np.array([t.completion for t in pool], dtype=np.float64)
    task_attempts = np.array([t.attempts for t in pool], dtype=np.int64)
    policy = it.filter_policy
    out = _backend.kernel.run_loop(
        state.rng.bit_generator,
        motivation,
        success,
        agent_attempts,
        difficulty,
        cost,
        completion,
        task_attempts,
        it.form is Form.COLLABORATIVE,
        it.completion_threshold,
        state.params.noise_epsilon,
        it.update_period,
        _backend.FILTER_CODES[policy.kind],
        policy.threshold if policy.threshold is not None else 0.0,
        state.tick,
        budget,
        early_stop,
        state.trace is not None,
    )
    for a, n in zip(agents, agent_attempts.tolist()):
        a.attempts_made = n
    open_tasks = 0
    theta = it.completion_threshold
    for t, c, n in zip(pool, completion.tolist(), task_attempts.tolist()):
        t.completion = c
        t.attempts = n
        if c < theta:
            open_tasks += 1
    it.open_tasks = open_tasks
    it._heap = None
    it._first_open = 0
    kb = state.kb
    kb.total_submissions = out["total_submissions"]
    kb.completed_submissions = out["completed_submissions"]
    kb.accepted_submissions = out["accepted_submissions"]
    kb.total_cost = out["total_cost"]
    kb.completed_task_ids = {t.signifier for t in pool if t.completion >= theta}
    kb.tasks_completed = out["tasks_completed"]
    state.rng.draws += out["draws"]
    state.tick = out["tick"]
    if state.trace is not None:
        kinds, ticks, agent_ids, sigs, levels = out["trace"]
        state.trace.extend(
            TraceEvent(
                t,
                EVENT_KINDS[k],
                None if a < 0 else a,
                None if s < 0 else s,
                None if lv != lv else lv,
            )
            for k, t, a, s, lv in zip(
                kinds.tolist(), ticks.tolist(), agent_ids.tolist(), sigs.tolist(), levels.tolist()
            )
        )


def simulate(scenario, seed: int, *, trace: bool = False, backend: str | None = None, ticks: int | None = None) -> SimState:
    """Run one experiment and return its final state (after the closing flush).

    ``ticks`` overrides the scenario's budget (0 gives an empty run).
    ``backend`` is ``"python"``, ``"compiled"`` or None for the import-time default.
    """
    from .scenario import materialize, validate

    validate(scenario)
    budget = scenario.ticks if ticks is None else ticks
    if budget < 0:
        raise ValueError("tick budget must be non-negative")
    state = materialize(scenario, seed, trace=trace)
    name = _backend.resolve(backend)
    log.debug("run seed=%s budget=%s backend=%s", seed, budget, name)
    if name == "compiled":
        _run_compiled(state, budget, scenario.early_stop)
    else:
        _run_python(state, budget, scenario.early_stop)
    return state


def run(scenario, seed: int, *, trace: bool = False, backend: str | None = None, ticks: int | None = None):
    """Run one experiment; returns ``(report, trace_or_None)``."""
    from .reporting import tally

    state = simulate(scenario, seed, trace=trace, backend=backend, ticks=ticks)
    return tally(state), state.trace

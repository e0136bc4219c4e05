"""Seed-reproducible agent-based simulation of organizational knowledge
generation by IT-mediated crowds."""

from ._backend import DEFAULT as BACKEND, HAVE_COMPILED
from .engine import SimState, TraceEvent, EventKind, flush, run, simulate, steps, tick
from .model import (
    Agent,
    FilterKind,
    FilterPolicy,
    Form,
    ITStructure,
    KnowledgeBase,
    Submission,
    Task,
    ValidationError,
    is_complete,
    make_agent,
    make_task,
)
from .policies import WorkParams, apply_work, assign_task, filter_submissions, participates
from .reporting import Report, emit_report, emit_trace, tally
from .rng import RandomStream
from .scenario import Scenario, ScenarioError, materialize, parse_scenario, validate

__version__ = "0.1.0"

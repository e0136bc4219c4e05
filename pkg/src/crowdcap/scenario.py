"""Scenario files: parsing, validation, canonical emission and materialization.

A scenario is a strict JSON document::

    {
      "form": "collaborative",
      "ticks": 100,
      "update_period": 5,
      "completion_threshold": 0.9,
      "noise_epsilon": 0.1,                       # optional, default 0
      "filter": {"policy": "threshold", "threshold": 0.5},   # optional
      "early_stop": true,                         # optional, default true
      "agents": {"count": 20,
                 "motivation": {"uniform": [0.1, 0.9]},
                 "success_rate": {"constant": 0.3}},
      "tasks": [{"difficulty": 0.2, "cost": 1.0}]
    }

Unknown keys are rejected. Parsing collects every structural problem before
raising; :func:`validate` does the same for value ranges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Union

from .model import (
    FilterKind,
    FilterPolicy,
    Form,
    ITStructure,
    ValidationError,
    make_agent,
    make_task,
)
from .policies import WorkParams
from .rng import RandomStream


class ScenarioError(ValidationError):
    """One or more problems with a scenario document."""


@dataclass(frozen=True)
class Dist:
    kind: str  # "constant" | "uniform"
    value: float | None = None
    lo: float | None = None
    hi: float | None = None

    @classmethod
    def constant(cls, v: float) -> "Dist":
        return cls("constant", value=float(v))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Dist":
        return cls("uniform", lo=float(lo), hi=float(hi))

    def bounds(self) -> tuple[float, float]:
        if self.kind == "constant":
            return self.value, self.value
        return self.lo, self.hi

    def sample(self, rng: RandomStream) -> float:
        if self.kind == "constant":
            return self.value
        return rng.uniform(self.lo, self.hi)


@dataclass(frozen=True)
class AgentSpec:
    motivation: float
    success_rate: float


@dataclass(frozen=True)
class TaskSpec:
    difficulty: float
    cost: float


@dataclass(frozen=True)
class AgentGenerator:
    count: int
    motivation: Dist
    success_rate: Dist


@dataclass(frozen=True)
class TaskGenerator:
    count: int
    difficulty: Dist
    cost: Dist


AgentsDef = Union[tuple[AgentSpec, ...], AgentGenerator]
TasksDef = Union[tuple[TaskSpec, ...], TaskGenerator]


@dataclass(frozen=True)
class Scenario:
    form: Form
    ticks: int
    update_period: int
    completion_threshold: float
    agents: AgentsDef
    tasks: TasksDef
    noise_epsilon: float = 0.0
    filter: FilterPolicy = field(default_factory=FilterPolicy.pass_through)
    early_stop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "form", Form(self.form))
        if isinstance(self.agents, list):
            object.__setattr__(self, "agents", tuple(self.agents))
        if isinstance(self.tasks, list):
            object.__setattr__(self, "tasks", tuple(self.tasks))


TOP_KEYS = (
    "form",
    "ticks",
    "update_period",
    "completion_threshold",
    "noise_epsilon",
    "filter",
    "early_stop",
    "agents",
    "tasks",
)
REQUIRED = ("form", "ticks", "update_period", "completion_threshold", "agents", "tasks")
ENTITY_FIELDS = {"agents": ("motivation", "success_rate"), "tasks": ("difficulty", "cost")}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


class _Parser:
    def __init__(self):
        self.errors: list[str] = []

    def err(self, msg: str) -> None:
        self.errors.append(msg)

    def number(self, obj, key, path, default=None, required=True):
        if key not in obj:
            if required:
                self.err(f"{path}: missing required key")
            return default
        v = obj[key]
        if not _is_number(v):
            self.err(f"{path}: expected a number, got {type(v).__name__}")
            return default
        return float(v)

    def integer(self, obj, key, path):
        if key not in obj:
            self.err(f"{path}: missing required key")
            return None
        v = obj[key]
        if not _is_int(v):
            self.err(f"{path}: expected an integer, got {v!r}")
            return None
        return v

    def unknown(self, obj: dict, allowed, path):
        for k in obj:
            if k not in allowed:
                where = f"{path}.{k}" if path else k
                self.err(f"{where}: unknown key")

    def dist(self, raw, path):
        if not isinstance(raw, dict) or len(raw) != 1:
            self.err(f'{path}: expected {{"constant": v}} or {{"uniform": [lo, hi]}}')
            return None
        (kind, v), = raw.items()
        if kind == "constant":
            if not _is_number(v):
                self.err(f"{path}.constant: expected a number")
                return None
            return Dist.constant(v)
        if kind == "uniform":
            if not (isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)):
                self.err(f"{path}.uniform: expected [lo, hi]")
                return None
            return Dist.uniform(v[0], v[1])
        self.err(f"{path}: unknown distribution {kind!r} (expected constant or uniform)")
        return None

    def entities(self, raw, name):
        fields = ENTITY_FIELDS[name]
        spec_cls = AgentSpec if name == "agents" else TaskSpec
        gen_cls = AgentGenerator if name == "agents" else TaskGenerator
        if isinstance(raw, dict) and "list" in raw:
            if set(raw) & ({"count"} | set(fields)):
                self.err(f"{name}: exactly one of list or generator")
                return None
            self.unknown(raw, ("list",), name)
            raw = raw["list"]
        if isinstance(raw, list):
            out = []
            for i, item in enumerate(raw):
                path = f"{name}[{i}]"
                if not isinstance(item, dict):
                    self.err(f"{path}: expected an object")
                    continue
                self.unknown(item, fields, path)
                vals = [self.number(item, f, f"{path}.{f}") for f in fields]
                if None not in vals:
                    out.append(spec_cls(*vals))
            return tuple(out)
        if isinstance(raw, dict):
            self.unknown(raw, ("count",) + fields, name)
            count = self.integer(raw, "count", f"{name}.count")
            dists = []
            for f in fields:
                if f not in raw:
                    self.err(f"{name}.{f}: missing required key")
                    dists.append(None)
                else:
                    dists.append(self.dist(raw[f], f"{name}.{f}"))
            if count is None or None in dists:
                return None
            return gen_cls(count, *dists)
        self.err(f"{name}: expected an array or a generator object")
        return None

    def filter(self, raw):
        if not isinstance(raw, dict):
            self.err("filter: expected an object")
            return None
        self.unknown(raw, ("policy", "threshold"), "filter")
        policy = raw.get("policy")
        if policy is None:
            self.err("filter.policy: missing required key")
            return None
        try:
            kind = FilterKind(policy)
        except ValueError:
            names = ", ".join(k.value for k in FilterKind)
            self.err(f"filter.policy: invalid value {policy!r} (expected one of {names})")
            return None
        thr = raw.get("threshold")
        if thr is not None and not _is_number(thr):
            self.err("filter.threshold: expected a number")
            return None
        try:
            return FilterPolicy(kind, None if thr is None else float(thr))
        except ValidationError as e:
            self.errors.extend(e.errors)
            return None


def parse_scenario(text: str | bytes) -> Scenario:
    """Parse a scenario document; raises :class:`ScenarioError` listing every problem."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ScenarioError(f"scenario is not valid UTF-8: {e}") from None
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"JSON syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    except ValueError as e:
        raise ScenarioError(str(e)) from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be a JSON object")

    p = _Parser()
    p.unknown(doc, TOP_KEYS, "")
    for k in REQUIRED:
        if k not in doc:
            p.err(f"{k}: missing required key")

    form = None
    if "form" in doc:
        try:
            form = Form(doc["form"])
        except ValueError:
            p.err(f"form: invalid value {doc['form']!r} (expected 'episodic' or 'collaborative')")
    ticks = p.integer(doc, "ticks", "ticks") if "ticks" in doc else None
    period = p.integer(doc, "update_period", "update_period") if "update_period" in doc else None
    theta = p.number(doc, "completion_threshold", "completion_threshold", required=False)
    eps = p.number(doc, "noise_epsilon", "noise_epsilon", default=0.0, required=False)
    policy = p.filter(doc["filter"]) if "filter" in doc else FilterPolicy.pass_through()
    early = doc.get("early_stop", True)
    if not isinstance(early, bool):
        p.err("early_stop: expected true or false")
    agents = p.entities(doc["agents"], "agents") if "agents" in doc else None
    tasks = p.entities(doc["tasks"], "tasks") if "tasks" in doc else None

    if p.errors:
        raise ScenarioError(p.errors)
    return Scenario(
        form=form,
        ticks=ticks,
        update_period=period,
        completion_threshold=theta,
        agents=agents,
        tasks=tasks,
        noise_epsilon=eps,
        filter=policy,
        early_stop=early,
    )


# legal ranges per entity field: (lo, hi, hi_inclusive)
FIELD_RANGES = {
    "motivation": (0.0, 1.0, True),
    "success_rate": (0.0, 1.0, True),
    "difficulty": (0.0, 1.0, False),
    "cost": (0.0, math.inf, False),
}


def _range_text(name):
    lo, hi, inc = FIELD_RANGES[name]
    if hi == math.inf:
        return "a finite number >= 0"
    return f"in [{lo:g},{hi:g}{']' if inc else ')'}"


def _in_range(name, x) -> bool:
    lo, hi, inc = FIELD_RANGES[name]
    if not math.isfinite(x) or x < lo:
        return False
    return x <= hi if inc else x < hi


def _check_entities(defn, name, errors):
    fields = ENTITY_FIELDS[name]
    if isinstance(defn, (AgentGenerator, TaskGenerator)):
        if not _is_int(defn.count) or defn.count < 1:
            errors.append(f"{name}.count must be a positive integer")
        for f in fields:
            d = getattr(defn, f)
            lo, hi = d.bounds()
            if d.kind == "uniform" and lo > hi:
                errors.append(f"{name}.{f}: uniform bounds need lo <= hi, got [{lo}, {hi}]")
            if not (_in_range(f, lo) and _in_range(f, hi)):
                errors.append(f"{name}.{f} must be {_range_text(f)}, got bounds [{lo}, {hi}]")
        return
    if len(defn) == 0:
        errors.append(f"{name}: at least one entry is required")
    for i, item in enumerate(defn):
        for f in fields:
            v = getattr(item, f)
            if not _in_range(f, v):
                errors.append(f"{name}[{i}].{f} must be {_range_text(f)}, got {v}")


def validate(s: Scenario) -> None:
    """Raise :class:`ScenarioError` naming every range violation in ``s``."""
    errors: list[str] = []
    if not _is_int(s.ticks) or s.ticks < 1:
        errors.append(f"ticks must be a positive integer, got {s.ticks!r}")
    if not _is_int(s.update_period) or s.update_period < 1:
        errors.append(f"update_period must be a positive integer, got {s.update_period!r}")
    theta = s.completion_threshold
    if not (_is_number(theta) and 0.0 < theta <= 1.0):
        errors.append(f"completion_threshold must be in (0,1], got {theta!r}")
    eps = s.noise_epsilon
    if not (_is_number(eps) and 0.0 <= eps < 1.0):
        errors.append(f"noise_epsilon must be in [0,1), got {eps!r}")
    if not isinstance(s.early_stop, bool):
        errors.append("early_stop must be a boolean")
    _check_entities(s.agents, "agents", errors)
    _check_entities(s.tasks, "tasks", errors)
    if errors:
        raise ScenarioError(errors, errors[0].split()[0].rstrip(":"))


def emit_scenario(s: Scenario) -> str:
    """Canonical JSON for ``s``; ``parse_scenario(emit_scenario(s)) == s``."""

    def dist(d: Dist):
        if d.kind == "constant":
            return {"constant": d.value}
        return {"uniform": [d.lo, d.hi]}

    def entities(defn, name):
        fields = ENTITY_FIELDS[name]
        if isinstance(defn, (AgentGenerator, TaskGenerator)):
            out: dict[str, Any] = {"count": defn.count}
            for f in fields:
                out[f] = dist(getattr(defn, f))
            return out
        return [{f: getattr(item, f) for f in fields} for item in defn]

    flt: dict[str, Any] = {"policy": s.filter.kind.value}
    if s.filter.threshold is not None:
        flt["threshold"] = s.filter.threshold
    doc = {
        "form": s.form.value,
        "ticks": s.ticks,
        "update_period": s.update_period,
        "completion_threshold": s.completion_threshold,
        "noise_epsilon": s.noise_epsilon,
        "filter": flt,
        "early_stop": s.early_stop,
        "agents": entities(s.agents, "agents"),
        "tasks": entities(s.tasks, "tasks"),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def materialize(s: Scenario, seed: int, trace: bool = False):
    """Build the tick-1 state. Generators draw agents first, then tasks, field by field."""
    from .engine import SimState

    rng = RandomStream(seed)
    if isinstance(s.agents, AgentGenerator):
        g = s.agents
        agents = []
        for i in range(g.count):
            m = g.motivation.sample(rng)
            r = g.success_rate.sample(rng)
            agents.append(make_agent(i, m, r))
    else:
        agents = [make_agent(i, a.motivation, a.success_rate) for i, a in enumerate(s.agents)]
    if isinstance(s.tasks, TaskGenerator):
        g = s.tasks
        tasks = []
        for j in range(g.count):
            d = g.difficulty.sample(rng)
            c = g.cost.sample(rng)
            tasks.append(make_task(j, d, c))
    else:
        tasks = [make_task(j, t.difficulty, t.cost) for j, t in enumerate(s.tasks)]
    it = ITStructure(
        s.form,
        tasks,
        update_period=s.update_period,
        filter_policy=s.filter,
        completion_threshold=s.completion_threshold,
    )
    return SimState(
        agents=agents,
        it=it,
        rng=rng,
        params=WorkParams(s.noise_epsilon),
        trace=[] if trace else None,
        seed=seed,
    )


def load_scenario(path) -> Scenario:
    with open(path, "rb") as fh:
        s = parse_scenario(fh.read())
    validate(s)
    return s

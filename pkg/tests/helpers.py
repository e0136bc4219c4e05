"""Fuzz-scenario generation and a naive reference simulator used as an oracle.

The reference simulator shares no code with the package. It re-implements the
rules literally (linear scans, no indices, no kernel) on plain lists and reads
the same PCG64 stream, so agreement with it checks the engine independently.
"""

import json
import random

import numpy as np


def fuzz_doc(rnd: random.Random, *, max_agents=50, max_tasks=100, max_ticks=200, max_eps=0.9,
             form=None, early_stop=None):
    """A random valid scenario document (as a dict)."""

    def dist(lo, hi, open_hi=False):
        if rnd.random() < 0.3:
            v = rnd.uniform(lo, hi)
            if open_hi and v >= hi:
                v = lo
            return {"constant": v}
        a, b = sorted((rnd.uniform(lo, hi), rnd.uniform(lo, hi)))
        if open_hi:
            b = min(b, hi * 0.999)
            a = min(a, b)
        return {"uniform": [a, b]}

    n_agents = rnd.randint(1, max_agents)
    n_tasks = rnd.randint(1, max_tasks)
    if rnd.random() < 0.5:
        agents = {"count": n_agents, "motivation": dist(0.0, 1.0), "success_rate": dist(0.0, 1.0)}
    else:
        agents = [{"motivation": rnd.random(), "success_rate": rnd.random()} for _ in range(n_agents)]
    if rnd.random() < 0.5:
        tasks = {"count": n_tasks, "difficulty": dist(0.0, 0.99, open_hi=True), "cost": dist(0.0, 5.0)}
    else:
        tasks = [{"difficulty": rnd.uniform(0, 0.95), "cost": rnd.uniform(0, 5)} for _ in range(n_tasks)]
    pol = rnd.choice(["pass_through", "threshold", "best_per_task"])
    flt = {"policy": pol}
    if pol == "threshold":
        flt["threshold"] = rnd.choice([0.0, 0.5, 1.0, rnd.random()])
    return {
        "form": form or rnd.choice(["episodic", "collaborative"]),
        "ticks": rnd.randint(1, max_ticks),
        "update_period": rnd.randint(1, 12),
        "completion_threshold": rnd.choice([1.0, 0.5, rnd.uniform(0.05, 1.0)]),
        "noise_epsilon": rnd.choice([0.0, rnd.uniform(0.0, max_eps)]),
        "filter": flt,
        "early_stop": rnd.random() < 0.7 if early_stop is None else early_stop,
        "agents": agents,
        "tasks": tasks,
    }


def fuzz_scenario(rnd, **kw):
    from crowdcap.scenario import parse_scenario

    return parse_scenario(json.dumps(fuzz_doc(rnd, **kw)))


def reference_run(doc: dict, seed: int, ticks=None):
    """Literal re-implementation of the run rules. Returns (report dict, trace rows, completions)."""
    gen = np.random.Generator(np.random.PCG64(seed))

    def draw():
        return float(gen.random())

    def sample(d):
        if "constant" in d:
            return float(d["constant"])
        lo, hi = d["uniform"]
        return lo + (hi - lo) * draw()

    def entities(defn, fields):
        if isinstance(defn, list):
            return [[float(item[f]) for f in fields] for item in defn]
        return [[sample(defn[f]) for f in fields] for _ in range(defn["count"])]

    agents = entities(doc["agents"], ("motivation", "success_rate"))
    tasks = entities(doc["tasks"], ("difficulty", "cost"))
    collab = doc["form"] == "collaborative"
    theta = doc["completion_threshold"]
    eps = doc.get("noise_epsilon", 0.0)
    period = doc["update_period"]
    flt = doc.get("filter", {"policy": "pass_through"})
    early = doc.get("early_stop", True)
    budget = doc["ticks"] if ticks is None else ticks

    comp = [0.0] * len(tasks)
    buffer = []  # (task, level)
    total = completed = accepted = 0
    cost_total = 0.0
    counted = set()
    rows = []
    t = 1

    def do_flush(at):
        nonlocal accepted, cost_total, buffer
        if flt["policy"] == "pass_through":
            accepted += len(buffer)
        elif flt["policy"] == "threshold":
            accepted += sum(1 for _, lv in buffer if lv >= flt["threshold"])
        else:
            accepted += len({j for j, _ in buffer})
        for j, _ in buffer:
            cost_total += tasks[j][1]
        buffer = []
        rows.append((at, "Flush", None, None, None))
        for j in range(len(tasks)):
            if comp[j] >= theta and j not in counted:
                counted.add(j)
                rows.append((at, "Complete", None, j, comp[j]))

    while t <= budget:
        taken = set()
        for i, (m, s) in enumerate(agents):
            if not draw() < m:
                continue
            rows.append((t, "Participate", i, None, None))
            open_ = [j for j in range(len(tasks)) if comp[j] < theta]
            if collab:
                j = min(open_, key=lambda j: (comp[j], j)) if open_ else None
            else:
                free = [j for j in open_ if j not in taken]
                j = free[0] if free else None
                if j is not None:
                    taken.add(j)
            if j is None:
                continue
            rows.append((t, "Assign", i, j, comp[j]))
            noise = (1.0 - eps) + (2.0 * eps) * draw() if eps > 0 else 1.0
            gain = s * (1.0 - tasks[j][0]) * noise
            if collab:
                new = min(1.0, max(0.0, comp[j] + gain))
            else:
                new = max(comp[j], min(1.0, max(0.0, gain)))
            comp[j] = new
            buffer.append((j, new))
            total += 1
            if new >= theta:
                completed += 1
            rows.append((t, "Submit", i, j, new))
        if t % period == 0:
            do_flush(t)
        t += 1
        if early and all(c >= theta for c in comp):
            break
    if buffer:
        do_flush(t - 1)

    report = {
        "ticks_elapsed": t - 1,
        "number_of_submissions": total,
        "number_of_submissions_completed": completed,
        "accepted_submissions": accepted,
        "tasks_completed": len(counted),
        "total_cost": cost_total,
        "mean_task_completion": sum(comp) / len(comp),
    }
    return report, rows, comp


def trace_rows(trace):
    return [(e.tick, e.kind.value, e.agent_id, e.task_signifier, e.completion_level) for e in trace]

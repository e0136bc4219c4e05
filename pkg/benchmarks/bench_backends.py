"""Time the pure-Python loop against the compiled kernel on the same runs.

    python benchmarks/bench_backends.py [--repeat 3]

Both backends must produce identical reports; the script checks that too.
"""

import argparse
import statistics
import time

from crowdcap import HAVE_COMPILED, run
from crowdcap.scenario import AgentGenerator, Dist, Scenario, TaskGenerator

CASES = {
    "episodic 50x100, 200 ticks": Scenario(
        form="episodic", ticks=200, update_period=5, completion_threshold=0.95, noise_epsilon=0.2,
        agents=AgentGenerator(50, Dist.uniform(0.1, 0.9), Dist.uniform(0.05, 0.5)),
        tasks=TaskGenerator(100, Dist.uniform(0.0, 0.9), Dist.constant(1.0)),
        early_stop=False,
    ),
    "collaborative 200x1000, 1000 ticks": Scenario(
        form="collaborative", ticks=1000, update_period=10, completion_threshold=0.99, noise_epsilon=0.3,
        agents=AgentGenerator(200, Dist.uniform(0.05, 0.5), Dist.uniform(0.001, 0.02)),
        tasks=TaskGenerator(1000, Dist.uniform(0.0, 0.9), Dist.uniform(0.5, 2.0)),
        early_stop=False,
    ),
    "single agent, 10k ticks x 10k tasks": Scenario(
        form="collaborative", ticks=10_000, update_period=100, completion_threshold=1.0,
        agents=AgentGenerator(1, Dist.constant(0.5), Dist.constant(1.0)),
        tasks=TaskGenerator(10_000, Dist.constant(0.0), Dist.constant(1.0)),
    ),
}


def timed(scenario, backend, repeat, trace):
    times = []
    report = None
    for seed in range(repeat):
        t0 = time.perf_counter()
        report, _ = run(scenario, seed, backend=backend, trace=trace)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trace", action="store_true", help="also collect traces")
    args = ap.parse_args()
    if not HAVE_COMPILED:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':40s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, scenario in CASES.items():
        py, r_py = timed(scenario, "python", args.repeat, args.trace)
        cc, r_cc = timed(scenario, "compiled", args.repeat, args.trace)
        if r_py != r_cc:
            raise SystemExit(f"{name}: backends disagree\n{r_py}\n{r_cc}")
        print(f"{name:40s} {py:10.4f} {cc:11.4f} {py / cc:7.1f}x")


if __name__ == "__main__":
    main()

"""Console entry point: run experiments, persist metrics, render charts."""

import sys
import time

from ..agent_loop import run_experiment
from .charts import emit_charts
from .config import parse_cli
from .metrics import run_directory, write_metrics


def main(argv=None) -> int:
    command, payload = parse_cli(argv)
    if command == "charts":
        written = emit_charts(payload.run_dir, payload.policies)
        for path in written:
            print(path)
        return 0

    config = payload
    print(
        f"training {config.num_runs} {config.agent_kind} agent(s) on {config.env_layout} "
        f"for {config.num_episodes} episodes (T={config.num_steps}, "
        f"{config.num_policies} policies, seed {config.seed})"
    )
    started = time.perf_counter()
    metrics = run_experiment(
        config, progress=lambda run, rate: print(f"  run {run}: success rate {rate:.2f}")
    )
    elapsed = time.perf_counter() - started
    write_metrics(metrics)
    target = run_directory(config)
    for path in emit_charts(target):
        print(path)
    print(
        f"done in {elapsed:.1f}s; mean success over the last quarter: "
        f"{metrics.success[:, -config.num_episodes // 4 :].mean():.2f}"
    )
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Static figures rendered from a finished run directory.

Charts are a pure function of the persisted CSV tables: nothing is
recomputed from the models. The per-policy charts draw a 16-line selection
that always contains every goal-reaching policy of the layout, topped up
with evenly spaced fillers.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..environment import NUM_ACTIONS, ACTION_NAMES, build_layout, goal_reaching_policies
from ..generative_model import enumerate_policies
from .config import Config
from .metrics import load_metric_table, read_manifest

DISPLAY_POLICIES = 16


def display_policy_selection(num_policies: int, optimal: np.ndarray) -> np.ndarray:
    """Up to 16 policy indices: all optimal ones plus evenly spaced fillers."""
    chosen = list(dict.fromkeys(int(k) for k in optimal))
    fillers = np.unique(np.linspace(0, num_policies - 1, DISPLAY_POLICIES).astype(int))
    for k in fillers:
        if len(chosen) >= DISPLAY_POLICIES:
            break
        if int(k) not in chosen:
            chosen.append(int(k))
    return np.array(sorted(chosen[:DISPLAY_POLICIES]), dtype=int)


def _policy_label(policies: np.ndarray, k: int) -> str:
    arrows = {0: ">", 1: "v", 2: "<", 3: "^"}
    return f"pi_{k} " + "".join(arrows[a] for a in policies[k])


def _line_chart(path: Path, series: dict[str, np.ndarray], ylabel: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    episodes = None
    for label, values in series.items():
        episodes = np.arange(1, len(values) + 1)
        ax.plot(episodes, values, lw=1.2, label=label)
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=6, ncol=2, frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def emit_charts(run_dir: str | Path, selection: np.ndarray | list | None = None) -> list[Path]:
    """Render the chart inventory for one run directory; returns the files."""
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    config = Config.from_dict(manifest["config"])
    charts_dir = run_dir / "charts"
    charts_dir.mkdir(exist_ok=True)

    layout, _ = build_layout(config.env_layout)
    policies = enumerate_policies(NUM_ACTIONS, config.horizon, config.num_policies)
    if selection is None:
        optimal = goal_reaching_policies(layout, policies)
        selection = display_policy_selection(config.num_policies, optimal)
    selection = np.asarray(selection, dtype=int)

    success = load_metric_table(run_dir, "success")
    marginal = load_metric_table(run_dir, "marginal_fe")
    written: list[Path] = []

    path = charts_dir / "success_rate.svg"
    _line_chart(
        path,
        {"mean over runs": success.mean(axis=0)},
        "fraction of agents at goal",
        f"{config.env_layout}: goal hits per episode ({config.agent_kind})",
    )
    written.append(path)

    path = charts_dir / "marginal_fe_final_step.svg"
    _line_chart(
        path,
        {"mean over runs": marginal[:, :, -1].mean(axis=0)},
        "free energy (nats)",
        f"{config.env_layout}: free energy at the final step",
    )
    written.append(path)

    if selection.size:
        per_policy = {
            "policy_fe_final_step.svg": ("policy_fe", -1, "policy-conditioned free energy"),
            "policy_efe_step1.svg": ("policy_efe", 0, "total expected free energy"),
            "policy_probs_step1.svg": ("policy_probs", 0, "policy probability"),
        }
        for filename, (table, step, ylabel) in per_policy.items():
            data = load_metric_table(run_dir, table)
            series = {
                _policy_label(policies, k): data[:, :, step, k].mean(axis=0)
                for k in selection
            }
            path = charts_dir / filename
            _line_chart(path, series, ylabel, f"{config.env_layout}: {ylabel}")
            written.append(path)

    path = charts_dir / "b_matrices.svg"
    _transition_heatmaps(path, run_dir, config)
    written.append(path)
    return written


def _transition_heatmaps(path: Path, run_dir: Path, config: Config) -> None:
    """Learned (run 0) vs ground-truth transition tables, one column per action."""
    fig, axes = plt.subplots(2, NUM_ACTIONS, figsize=(3 * NUM_ACTIONS, 6))
    for action in range(NUM_ACTIONS):
        learned = np.loadtxt(
            run_dir / "model" / f"run00_B_a{action}.csv", delimiter=",", skiprows=1, ndmin=2
        )
        truth = np.loadtxt(
            run_dir / "model" / f"gtruth_B_a{action}.csv", delimiter=",", skiprows=1, ndmin=2
        )
        for row, (matrix, tag) in enumerate([(learned, "learned"), (truth, "ground truth")]):
            ax = axes[row, action]
            ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
            ax.set_title(f"{tag} B ({ACTION_NAMES[action]})", fontsize=9)
            ax.set_xlabel("from tile")
            if action == 0:
                ax.set_ylabel("to tile")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

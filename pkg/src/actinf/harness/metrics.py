"""Metric containers and comma-separated persistence.

Every metric family becomes one headered CSV under <out>/<exp>/<layout>/
metrics/, model snapshots become one labelled table per matrix under model/,
and a manifest records the config echo plus a content hash per file so
reruns can be compared byte for byte. All indices in the tables (run,
episode, step, policy_index, state, action) are 0-based.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..environment import NUM_ACTIONS
from .config import Config

_FLOAT_FMT = "%.12g"


@dataclass
class RunMetrics:
    """Per-run, per-episode, per-step records for one experiment."""

    config: Config
    marginal_fe: np.ndarray  # (runs, episodes, steps)
    policy_fe: np.ndarray  # (runs, episodes, steps, policies)
    policy_efe: np.ndarray  # (runs, episodes, steps, policies)
    efe_risk: np.ndarray
    efe_bnovelty: np.ndarray
    policy_probs: np.ndarray
    success: np.ndarray  # (runs, episodes)
    visits: np.ndarray  # (runs, actions, states) ground-truth visit counts
    beta_post: np.ndarray  # (runs, actions, states, states) final counts
    b_learned: np.ndarray  # (runs, actions, states, states) final probabilities
    alpha_post: np.ndarray | None  # (runs, obs, states) when emissions are learned
    ground_truth_B: np.ndarray  # (actions, states, states)


def _write_indexed_csv(path: Path, array: np.ndarray, index_names: list[str]) -> None:
    """Flatten an n-d metric array to (index columns..., value) rows."""
    idx = np.indices(array.shape).reshape(len(array.shape), -1)
    columns = np.vstack([idx, array.reshape(1, -1)])
    header = ",".join(index_names + ["value"])
    fmt = ["%d"] * len(index_names) + [_FLOAT_FMT]
    np.savetxt(path, columns.T, fmt=fmt, delimiter=",", header=header, comments="")


def _write_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    header = ",".join(f"s{j}" for j in range(matrix.shape[1]))
    np.savetxt(path, matrix, fmt=_FLOAT_FMT, delimiter=",", header=header, comments="")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_directory(config: Config) -> Path:
    return Path(config.out_dir) / config.exp_name / config.env_layout


def write_metrics(metrics: RunMetrics, out_dir: str | Path | None = None) -> dict:
    """Persist all metric families and return the manifest (also written)."""
    config = metrics.config
    root = Path(out_dir) if out_dir is not None else Path(config.out_dir)
    base = root / config.exp_name / config.env_layout
    metrics_dir = base / "metrics"
    model_dir = base / "model"
    try:
        metrics_dir.mkdir(parents=True, exist_ok=True)
        model_dir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise OSError(f"cannot create output directories under {base}: {err}") from err

    resp = ["run", "episode", "step", "policy_index"]
    tables = {
        "metrics/marginal_fe.csv": (metrics.marginal_fe, resp[:3]),
        "metrics/policy_fe.csv": (metrics.policy_fe, resp),
        "metrics/policy_efe.csv": (metrics.policy_efe, resp),
        "metrics/efe_risk.csv": (metrics.efe_risk, resp),
        "metrics/efe_bnovelty.csv": (metrics.efe_bnovelty, resp),
        "metrics/policy_probs.csv": (metrics.policy_probs, resp),
        "metrics/success.csv": (metrics.success, resp[:2]),
        "metrics/visits.csv": (metrics.visits, ["run", "action", "state"]),
    }
    files: list[str] = []
    for rel, (array, names) in tables.items():
        _write_indexed_csv(base / rel, array, names)
        files.append(rel)

    for run in range(metrics.b_learned.shape[0]):
        for action in range(NUM_ACTIONS):
            rel = f"model/run{run:02d}_B_a{action}.csv"
            _write_matrix_csv(base / rel, metrics.b_learned[run, action])
            files.append(rel)
            rel = f"model/run{run:02d}_beta_a{action}.csv"
            _write_matrix_csv(base / rel, metrics.beta_post[run, action])
            files.append(rel)
        if metrics.alpha_post is not None:
            rel = f"model/run{run:02d}_alpha.csv"
            _write_matrix_csv(base / rel, metrics.alpha_post[run])
            files.append(rel)
    for action in range(NUM_ACTIONS):
        rel = f"model/gtruth_B_a{action}.csv"
        _write_matrix_csv(base / rel, metrics.ground_truth_B[action])
        files.append(rel)

    hashes = {rel: _sha256(base / rel) for rel in sorted(files)}
    overall = hashlib.sha256("".join(hashes.values()).encode()).hexdigest()
    manifest = {
        "config": config.as_dict(),
        "files": hashes,
        "content_hash": overall,
    }
    (base / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def read_manifest(run_dir: str | Path) -> dict:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"missing manifest: {path}")
    return json.loads(path.read_text())


def load_metric_table(run_dir: str | Path, name: str) -> np.ndarray:
    """Read one metric family back as a dense array (indices re-folded)."""
    path = Path(run_dir) / "metrics" / f"{name}.csv"
    if not path.exists():
        raise FileNotFoundError(f"missing metric file: {path}")
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    index_cols = raw[:, :-1].astype(int)
    shape = tuple(index_cols.max(axis=0) + 1)
    dense = np.zeros(shape)
    dense[tuple(index_cols.T)] = raw[:, -1]
    return dense

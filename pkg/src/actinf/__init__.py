"""Discrete-state active inference agents and a seeded experiment harness.

The package trains two agent kinds on deterministic grid layouts: one that
knows which actions it executed (``aware``) and one that must infer them from
its observations (``unaware``). Perception is variational message passing
over policy-conditioned state beliefs, planning scores policies by expected
free energy, actions come from a Bayesian model average over policies, and
transition/emission tables are learned as Dirichlet counts.
"""

from .agent_loop import (
    ActionAwareAgent,
    ActionUnawareAgent,
    EpisodeTrace,
    make_agent,
    run_episode,
    run_experiment,
)
from .environment import GridEnv, Layout, build_layout
from .generative_model import Model, enumerate_policies, init_model, preference_vector
from .harness import Config, RunMetrics, write_metrics

__version__ = "0.1.0"

__all__ = [
    "ActionAwareAgent",
    "ActionUnawareAgent",
    "Config",
    "EpisodeTrace",
    "GridEnv",
    "Layout",
    "Model",
    "RunMetrics",
    "build_layout",
    "enumerate_policies",
    "init_model",
    "make_agent",
    "preference_vector",
    "run_episode",
    "run_experiment",
    "write_metrics",
]

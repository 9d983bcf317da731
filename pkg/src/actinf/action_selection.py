"""Decision rules mapping the policy posterior to the next action."""

from dataclasses import dataclass

import numpy as np

from .environment import NUM_ACTIONS

SELECTION_MODES = ("kd", "greedy_max", "greedy_sample")


@dataclass
class ActionDecision:
    """Chosen action plus the per-action posterior mass that justified it."""

    action: int
    per_action_mass: np.ndarray
    mode: str


def select_action(
    q_pi: np.ndarray,
    policies: np.ndarray,
    t: int,
    mode: str = "kd",
    rng: np.random.Generator | None = None,
) -> ActionDecision:
    """Pick the action for step ``t`` (0-based position into each policy).

    ``kd`` performs a Bayesian model average: each policy contributes its full
    posterior mass to the action it prescribes at ``t``, and the heaviest
    action wins (ties break toward the lowest action index). The greedy modes
    instead commit to a single policy, either the most probable one or one
    sampled from the posterior.
    """
    policies = np.asarray(policies)
    if policies.shape[0] == 0:
        raise ValueError("empty policy set")
    if not 0 <= t < policies.shape[1]:
        raise ValueError(f"step {t} outside the policy horizon {policies.shape[1]}")
    if mode == "kd":
        mass = np.zeros(NUM_ACTIONS)
        np.add.at(mass, policies[:, t], q_pi)
        return ActionDecision(action=int(np.argmax(mass)), per_action_mass=mass, mode=mode)
    if mode == "greedy_max":
        chosen = int(np.argmax(q_pi))
    elif mode == "greedy_sample":
        if rng is None:
            raise ValueError("greedy_sample needs a random generator")
        chosen = int(rng.choice(policies.shape[0], p=q_pi))
    else:
        raise ValueError(f"unknown action-selection mode {mode!r}")
    mass = np.zeros(NUM_ACTIONS)
    mass[policies[chosen, t]] = 1.0
    return ActionDecision(action=int(policies[chosen, t]), per_action_mass=mass, mode=mode)

"""End-of-episode Dirichlet count updates for the emission and transition
tables.

Evidence is accumulated in batch once per episode: emission counts gain the
policy-averaged state belief at each step (routed by the observation
received), and transition counts gain the posterior-averaged outer product of
consecutive beliefs, routed to the action executed at the transition. Per
episode the added mass totals exactly T for the emission table and T - 1 for
the transition tensor.
"""

from dataclasses import dataclass

import numpy as np

from .planning import marginal_state_belief


@dataclass
class EpisodeEvidence:
    """Everything the learning phase consumes at the end of an episode."""

    observations: np.ndarray  # (T,) observation indices
    beliefs: np.ndarray  # (P, T, m) end-of-episode policy-conditioned beliefs
    q_pi: np.ndarray  # (P,) final policy posterior
    executed_actions: np.ndarray  # (T - 1,) actions actually taken

    def __post_init__(self):
        steps = len(self.observations)
        if self.beliefs.shape[1] != steps or len(self.executed_actions) != steps - 1:
            raise ValueError("evidence lengths inconsistent with episode length")


def update_alpha(alpha_post: np.ndarray, evidence: EpisodeEvidence) -> np.ndarray:
    """Emission counts: row o_t accumulates the marginal state belief at t."""
    out = alpha_post.copy()
    for t, obs in enumerate(evidence.observations):
        out[obs, :] += marginal_state_belief(evidence.beliefs, evidence.q_pi, t)
    return out


def update_beta(
    beta_post: np.ndarray, evidence: EpisodeEvidence, policies: np.ndarray
) -> np.ndarray:
    """Transition counts: the matrix of each executed action accumulates the
    posterior-averaged outer product of consecutive state beliefs.

    Routing the evidence by the executed action is what keeps the four
    matrices distinguishable: attributing it per policy instead (weighting
    each policy's own prescribed action by q_pi) feeds near-identical mass to
    every action at the same cells whenever the posterior is flat, and the
    matrices collapse onto each other instead of learning the dynamics.
    """
    out = beta_post.copy()
    steps = evidence.beliefs.shape[1]
    for t in range(1, steps):
        action = evidence.executed_actions[t - 1]
        out[action] += np.einsum(
            "p,pi,pj->ij",
            evidence.q_pi,
            evidence.beliefs[:, t],
            evidence.beliefs[:, t - 1],
        )
    return out

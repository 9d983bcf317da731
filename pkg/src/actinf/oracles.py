"""Brute-force reference computations for small enumerable models.

These enumerate every state sequence outright and exist solely so tests can
check the message-passing pipeline against answers that are obviously
correct. They share the probability floor with the main code: each model
factor enters the joint as max(p, PROB_FLOOR), which is exactly the measure
the free-energy computations bound. Never used by the agents themselves.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .core_math import PROB_FLOOR

MAX_SEQUENCES = 4**4


@dataclass(frozen=True)
class EnumerablePOMDP:
    """Explicit probability tables small enough to enumerate exhaustively."""

    D: np.ndarray  # (m,) initial-state distribution
    A: np.ndarray  # (n, m) emission matrix
    B: np.ndarray  # (num_actions, m, m) transition matrices

    @property
    def num_states(self) -> int:
        return self.D.size

    def guard(self, num_steps: int) -> None:
        if self.num_states**num_steps > MAX_SEQUENCES:
            raise ValueError(
                f"{self.num_states}^{num_steps} state sequences exceed the "
                f"enumeration guard of {MAX_SEQUENCES}"
            )


def _sequence_weights(
    pomdp: EnumerablePOMDP, policy, observations, tau: int, num_steps: int
):
    """Yield (sequence, weight) over all state sequences, with floored factors.

    Observation factors are included up to tau only; transition factors cover
    the whole window, matching the free-energy functional being bounded.
    """
    pomdp.guard(num_steps)
    floor = lambda p: max(float(p), PROB_FLOOR)
    for seq in itertools.product(range(pomdp.num_states), repeat=num_steps):
        w = floor(pomdp.D[seq[0]])
        for t in range(1, num_steps):
            w *= floor(pomdp.B[policy[t - 1], seq[t], seq[t - 1]])
        for t in range(tau):
            w *= floor(pomdp.A[observations[t], seq[t]])
        yield seq, w


def exact_smoothing_posterior(
    pomdp: EnumerablePOMDP, policy, observations, num_steps: int, tau: int | None = None
) -> np.ndarray:
    """Exact per-step state marginals given tau observations, by enumeration."""
    if tau is None:
        tau = len(observations)
    post = np.zeros((num_steps, pomdp.num_states))
    total = 0.0
    for seq, w in _sequence_weights(pomdp, policy, observations, tau, num_steps):
        total += w
        for t, s in enumerate(seq):
            post[t, s] += w
    return post / total


def exact_log_evidence(
    pomdp: EnumerablePOMDP, policy, observations, num_steps: int, tau: int | None = None
) -> float:
    """Exact log of the summed joint weight of the observations under a policy."""
    if tau is None:
        tau = len(observations)
    total = 0.0
    for _, w in _sequence_weights(pomdp, policy, observations, tau, num_steps):
        total += w
    return float(np.log(total))

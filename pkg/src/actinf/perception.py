"""Variational message passing over policy-conditioned state beliefs.

Beliefs are stored per policy and per step as rows of a (policies, steps,
states) array. One sweep recomputes every step's belief in ascending order
from three messages: the observation log-likelihood row (past and present
steps only), the forward message through the transition table for the action
entering the step, and the backward message for the action leaving it. Each
recomputed row is the exact minimiser of the policy-conditioned free energy
in that coordinate, so a sweep never increases it.

Throughout, ``tau`` counts the observations received so far (1-based, so the
present step has 0-based index ``tau - 1``), while step and action indices
are 0-based.
"""

from dataclasses import dataclass

import numpy as np

from .core_math import (
    expected_log_dirichlet,
    floored_log,
    kl_dirichlet,
    softmax,
)
from .environment import NUM_ACTIONS
from .generative_model import Model


@dataclass
class ModelLogs:
    """Log tables the sweeps consume, refreshed whenever the model changes.

    Tables under Dirichlet learning enter as the expected log-probability of
    the posterior counts (digamma differences): sharper than the log of the
    normalised counts at equal evidence, and mildly repellent for columns
    with no evidence at all, which keeps beliefs from parking on unexplored
    transitions just because nothing contradicts them there. Known tables
    enter as plain floored logs.
    """

    log_obs: np.ndarray  # (n, m)
    log_B: np.ndarray  # (NUM_ACTIONS, m, m)
    log_D: np.ndarray  # (m,)

    @classmethod
    def from_model(cls, model: Model) -> "ModelLogs":
        if model.learn_A:
            log_obs = expected_log_dirichlet(model.alpha_post)
        else:
            log_obs = floored_log(model.A)
        if model.learn_B:
            log_B = np.stack(
                [expected_log_dirichlet(model.beta_post[a]) for a in range(NUM_ACTIONS)]
            )
        else:
            log_B = floored_log(model.B)
        return cls(log_obs=log_obs, log_B=log_B, log_D=floored_log(model.D))


class BeliefEnsemble:
    """Per-policy, per-step state beliefs, plus the shared past track used by
    agents that know their executed actions."""

    def __init__(self, num_policies: int, episode_length: int, num_states: int):
        self.beliefs = np.full((num_policies, episode_length, num_states), 1.0 / num_states)
        self.past = np.full((episode_length, num_states), 1.0 / num_states)

    def reset(self) -> None:
        self.beliefs.fill(1.0 / self.beliefs.shape[-1])
        self.past.fill(1.0 / self.past.shape[-1])


def action_groups(actions: np.ndarray) -> list[list[np.ndarray]]:
    """groups[t][a] = indices of rows whose action at position t is a."""
    horizon = actions.shape[1]
    return [
        [np.flatnonzero(actions[:, t] == a) for a in range(NUM_ACTIONS)]
        for t in range(horizon)
    ]


UPDATE_RULES = ("fixed_point", "gradient")


def _apply_update(current: np.ndarray, msg: np.ndarray, rule: str) -> np.ndarray:
    """One belief update from the assembled log-messages.

    ``fixed_point`` sets the belief to the exact coordinate minimiser.
    ``gradient`` instead takes a unit step against the free-energy gradient
    and renormalises, the descent flavour used to model neuronal dynamics;
    it shares neither the minimiser nor the per-sweep monotonicity of the
    fixed-point rule and stays out of the acceptance runs.
    """
    if rule == "fixed_point":
        return softmax(msg, axis=-1)
    if rule == "gradient":
        return softmax(current - floored_log(current) + msg, axis=-1)
    raise ValueError(f"unknown update rule {rule!r}; expected one of {UPDATE_RULES}")


def _check_obs(obs_history, tau: int, num_obs: int) -> np.ndarray:
    obs = np.asarray(obs_history, dtype=int)
    if obs.size != tau:
        raise ValueError(f"expected {tau} observations, got {obs.size}")
    if obs.size and (obs.min() < 0 or obs.max() >= num_obs):
        raise ValueError(f"observation index out of range 0..{num_obs - 1}")
    return obs


def sweep_policy_beliefs(
    beliefs: np.ndarray,
    groups: list[list[np.ndarray]],
    obs: np.ndarray,
    tau: int,
    logs: ModelLogs,
    n_sweeps: int = 1,
    rule: str = "fixed_point",
) -> None:
    """Full-window sweeps for a batch of policies, each conditioning all steps
    on its own action sequence. Updates ``beliefs`` in place."""
    num_steps = beliefs.shape[1]
    num_states = beliefs.shape[2]
    for _ in range(n_sweeps):
        for t in range(num_steps):
            msg = np.zeros((beliefs.shape[0], num_states))
            if t < tau:
                msg += logs.log_obs[obs[t]]
            if t == 0:
                msg += logs.log_D
            else:
                for a in range(NUM_ACTIONS):
                    idx = groups[t - 1][a]
                    if idx.size:
                        msg[idx] += beliefs[idx, t - 1] @ logs.log_B[a].T
            if t < num_steps - 1:
                for a in range(NUM_ACTIONS):
                    idx = groups[t][a]
                    if idx.size:
                        msg[idx] += beliefs[idx, t + 1] @ logs.log_B[a]
            beliefs[:, t, :] = _apply_update(beliefs[:, t, :], msg, rule)


def sweep_shared_past(
    past: np.ndarray,
    obs: np.ndarray,
    executed: np.ndarray,
    logs: ModelLogs,
    n_sweeps: int = 1,
    rule: str = "fixed_point",
) -> None:
    """Sweeps over the executed prefix only: steps 0..tau-1 conditioned on the
    actions actually taken, with backward messages confined to that window."""
    tau = obs.size
    for _ in range(n_sweeps):
        for t in range(tau):
            msg = logs.log_obs[obs[t]].copy()
            if t == 0:
                msg += logs.log_D
            else:
                msg += logs.log_B[executed[t - 1]] @ past[t - 1]
            if t < tau - 1:
                msg += past[t + 1] @ logs.log_B[executed[t]]
            past[t] = _apply_update(past[t], msg, rule)


def sweep_future_beliefs(
    beliefs: np.ndarray,
    present_belief: np.ndarray,
    groups: list[list[np.ndarray]],
    tau: int,
    logs: ModelLogs,
    n_sweeps: int = 1,
    rule: str = "fixed_point",
) -> None:
    """Sweeps over steps tau..T-1 for a batch of policies that share the same
    belief at the present step (row tau-1 is pinned to ``present_belief``)."""
    num_steps = beliefs.shape[1]
    num_states = beliefs.shape[2]
    for _ in range(n_sweeps):
        for t in range(tau, num_steps):
            msg = np.zeros((beliefs.shape[0], num_states))
            for a in range(NUM_ACTIONS):
                idx = groups[t - 1][a]
                if idx.size:
                    prev = present_belief if t == tau else beliefs[idx, t - 1]
                    msg[idx] += prev @ logs.log_B[a].T
            if t < num_steps - 1:
                for a in range(NUM_ACTIONS):
                    idx = groups[t][a]
                    if idx.size:
                        msg[idx] += beliefs[idx, t + 1] @ logs.log_B[a]
            beliefs[:, t, :] = _apply_update(beliefs[:, t, :], msg, rule)


def vmp_sweep(
    beliefs: np.ndarray,
    obs_history,
    policy: np.ndarray,
    model: Model,
    tau: int,
    logs: ModelLogs | None = None,
    rule: str = "fixed_point",
) -> np.ndarray:
    """One full sweep for a single policy; returns the updated (T, m) beliefs."""
    obs = _check_obs(obs_history, tau, model.num_obs)
    if logs is None:
        logs = ModelLogs.from_model(model)
    out = np.array(beliefs, dtype=float, copy=True)[None, :, :]
    actions = np.asarray(policy, dtype=int)[None, :]
    sweep_policy_beliefs(out, action_groups(actions), obs, tau, logs, rule=rule)
    return out[0]


def policy_free_energies(
    beliefs: np.ndarray,
    actions: np.ndarray,
    groups: list[list[np.ndarray]],
    obs: np.ndarray,
    tau: int,
    logs: ModelLogs,
) -> np.ndarray:
    """Policy-conditioned free energy for each row of ``beliefs``.

    F = sum_t E[ln q_t] - sum_{t<tau} E[ln A[o_t, .]] - E_{q_0}[ln D]
        - sum_{t>=1} q_t' ln B^(a_{t-1}) q_{t-1}.
    """
    num_steps = beliefs.shape[1]
    fe = np.sum(beliefs * floored_log(beliefs), axis=(1, 2))
    for t in range(tau):
        fe -= beliefs[:, t, :] @ logs.log_obs[obs[t]]
    fe -= beliefs[:, 0, :] @ logs.log_D
    for t in range(1, num_steps):
        for a in range(NUM_ACTIONS):
            idx = groups[t - 1][a]
            if idx.size:
                fe[idx] -= np.einsum(
                    "pi,ij,pj->p", beliefs[idx, t], logs.log_B[a], beliefs[idx, t - 1]
                )
    return fe


def shared_past_free_energy(
    past: np.ndarray, obs: np.ndarray, executed: np.ndarray, logs: ModelLogs
) -> float:
    """Free energy of the executed-prefix window (steps 0..tau-1)."""
    tau = obs.size
    fe = float(np.sum(past[:tau] * floored_log(past[:tau])))
    for t in range(tau):
        fe -= float(past[t] @ logs.log_obs[obs[t]])
    fe -= float(past[0] @ logs.log_D)
    for t in range(1, tau):
        fe -= float(past[t] @ logs.log_B[executed[t - 1]] @ past[t - 1])
    return fe


def future_free_energies(
    beliefs: np.ndarray,
    present_belief: np.ndarray,
    groups: list[list[np.ndarray]],
    tau: int,
    logs: ModelLogs,
) -> np.ndarray:
    """Per-policy free-energy contribution of steps tau..T-1, chained onto the
    shared belief at the present step."""
    num_steps = beliefs.shape[1]
    future = beliefs[:, tau:, :]
    fe = np.sum(future * floored_log(future), axis=(1, 2))
    for t in range(tau, num_steps):
        for a in range(NUM_ACTIONS):
            idx = groups[t - 1][a]
            if not idx.size:
                continue
            if t == tau:
                fe[idx] -= beliefs[idx, t] @ (logs.log_B[a] @ present_belief)
            else:
                fe[idx] -= np.einsum(
                    "pi,ij,pj->p", beliefs[idx, t], logs.log_B[a], beliefs[idx, t - 1]
                )
    return fe


def policy_conditioned_fe(
    beliefs: np.ndarray,
    obs_history,
    policy: np.ndarray,
    model: Model,
    tau: int,
    logs: ModelLogs | None = None,
) -> float:
    """Free energy of one policy's belief trajectory given tau observations."""
    obs = _check_obs(obs_history, tau, model.num_obs)
    if logs is None:
        logs = ModelLogs.from_model(model)
    actions = np.asarray(policy, dtype=int)[None, :]
    stacked = np.asarray(beliefs, dtype=float)[None, :, :]
    return float(
        policy_free_energies(stacked, actions, action_groups(actions), obs, tau, logs)[0]
    )


def marginal_fe(
    fe: np.ndarray, q_pi: np.ndarray, model: Model, include_param_kl: bool = False
) -> float:
    """Policy-averaged free energy, optionally adding the Dirichlet divergences
    between posterior and prior parameter counts (used at the final step)."""
    if len(fe) != len(q_pi):
        raise ValueError("per-policy free energies and posterior lengths differ")
    total = float(np.dot(q_pi, fe))
    if include_param_kl:
        kl_b, kl_a = param_kl(model)
        total += kl_b + kl_a
    return total


def param_kl(model: Model) -> tuple[float, float]:
    """(transition, emission) Dirichlet divergences accumulated by learning."""
    kl_b = 0.0
    if model.learn_B:
        kl_b = sum(
            kl_dirichlet(model.beta_post[a], model.beta_prior[a])
            for a in range(model.beta_post.shape[0])
        )
    kl_a = kl_dirichlet(model.alpha_post, model.alpha_prior) if model.learn_A else 0.0
    return kl_b, kl_a


@dataclass
class FeRecord:
    """Free-energy snapshot captured once per step."""

    policy_fes: np.ndarray
    marginal_fe: float
    kl_B: float
    kl_A: float
    step: int

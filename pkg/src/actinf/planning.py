"""Expected free energy per policy, the policy posterior, and marginal
state beliefs.

A policy is scored over the remaining future steps by four terms per step:
risk (divergence of the predicted state distribution from the preferred one),
ambiguity (expected emission entropy), and the two Dirichlet novelty terms
that reward visiting parameter cells the counts still say little about. The
novelty expectation of a count matrix uses the closed form
W = (1/counts - 1/column_total) / 2.
"""

from dataclasses import dataclass

import numpy as np

from .core_math import entropy, floored_log, kl_categorical, softmax
from .environment import NUM_ACTIONS
from .generative_model import Model


@dataclass
class EfeBreakdown:
    """One future step's expected free energy, split into its terms (nats)."""

    risk: float
    ambiguity: float
    a_novelty: float
    b_novelty: float

    @property
    def total(self) -> float:
        return self.ambiguity - self.a_novelty + self.risk - self.b_novelty


@dataclass
class PolicyPosterior:
    """Posterior over policies together with the scores that produced it."""

    q_pi: np.ndarray
    g_totals: np.ndarray
    f_pis: np.ndarray


@dataclass
class EfeTotals:
    """Per-policy sums over the future window, used for records and planning."""

    total: np.ndarray
    risk: np.ndarray
    ambiguity: np.ndarray
    a_novelty: np.ndarray
    b_novelty: np.ndarray


def novelty_weight(counts: np.ndarray) -> np.ndarray:
    """Expected information gain per (outcome, condition) cell of a Dirichlet
    count matrix; vanishes as counts grow. Accepts a stack of matrices whose
    second-to-last axis indexes outcomes."""
    return 0.5 * (1.0 / counts - 1.0 / counts.sum(axis=-2, keepdims=True))


def _emission_entropies(model: Model) -> np.ndarray:
    return np.array([entropy(model.A[:, j]) for j in range(model.num_states)])


def efe_components(
    q_t: np.ndarray,
    q_next: np.ndarray | None,
    action: int | None,
    model: Model,
    t: int,
    tau: int,
) -> EfeBreakdown:
    """Expected free energy terms for one policy at future step ``t``.

    ``q_next`` and ``action`` describe the transition leaving the step and may
    be None at the terminal step, where no action remains to be taken.
    """
    if t < tau:
        raise ValueError(f"step {t} is not in the future (tau={tau})")
    risk = kl_categorical(q_t, model.C)
    ambiguity = float(q_t @ _emission_entropies(model))
    a_novelty = 0.0
    if model.learn_A:
        predicted_obs = model.A @ q_t
        a_novelty = float(predicted_obs @ novelty_weight(model.alpha_post) @ q_t)
    b_novelty = 0.0
    if model.learn_B and q_next is not None and action is not None:
        b_novelty = float(q_next @ novelty_weight(model.beta_post[action]) @ q_t)
    return EfeBreakdown(risk=risk, ambiguity=ambiguity, a_novelty=a_novelty, b_novelty=b_novelty)


def total_efe(beliefs: np.ndarray, policy: np.ndarray, model: Model, tau: int) -> float:
    """Sum of expected free energies over steps tau..T-1 for one policy."""
    num_steps = beliefs.shape[0]
    if tau >= num_steps:
        raise ValueError("no future steps remain; planning stops at the terminal step")
    acc = 0.0
    for t in range(tau, num_steps):
        if t < num_steps - 1:
            acc += efe_components(beliefs[t], beliefs[t + 1], int(policy[t]), model, t, tau).total
        else:
            acc += efe_components(beliefs[t], None, None, model, t, tau).total
    return acc


def efe_bulk(
    beliefs: np.ndarray,
    actions: np.ndarray,
    groups: list[list[np.ndarray]],
    model: Model,
    tau: int,
) -> EfeTotals:
    """Vectorised total expected free energy for a batch of policies.

    Only belief rows at steps >= tau are read, so callers may pass ensembles
    whose past rows belong to a different conditioning.
    """
    num_policies, num_steps, _ = beliefs.shape
    if tau >= num_steps:
        raise ValueError("no future steps remain; planning stops at the terminal step")
    risk = np.zeros(num_policies)
    ambiguity = np.zeros(num_policies)
    a_nov = np.zeros(num_policies)
    b_nov = np.zeros(num_policies)
    col_entropy = _emission_entropies(model)
    log_C = floored_log(model.C)
    w_alpha = novelty_weight(model.alpha_post) if model.learn_A else None
    w_beta = novelty_weight(model.beta_post) if model.learn_B else None
    for t in range(tau, num_steps):
        q = beliefs[:, t, :]
        risk += np.sum(q * (floored_log(q) - log_C), axis=1)
        ambiguity += q @ col_entropy
        if w_alpha is not None:
            a_nov += np.einsum("po,oj,pj->p", q @ model.A.T, w_alpha, q)
        if w_beta is not None and t < num_steps - 1:
            for a in range(NUM_ACTIONS):
                idx = groups[t][a]
                if idx.size:
                    b_nov[idx] += np.einsum(
                        "pi,ij,pj->p", beliefs[idx, t + 1], w_beta[a], q[idx]
                    )
    return EfeTotals(
        total=ambiguity - a_nov + risk - b_nov,
        risk=risk,
        ambiguity=ambiguity,
        a_novelty=a_nov,
        b_novelty=b_nov,
    )


def policy_posterior(g_totals: np.ndarray, f_pis: np.ndarray) -> PolicyPosterior:
    """Posterior over policies: softmax of the negated sum of expected and
    policy-conditioned free energies."""
    g = np.asarray(g_totals, dtype=float)
    f = np.asarray(f_pis, dtype=float)
    if g.shape != f.shape:
        raise ValueError(f"length mismatch: {g.shape} vs {f.shape}")
    return PolicyPosterior(q_pi=softmax(-g - f), g_totals=g, f_pis=f)


def marginal_state_belief(beliefs: np.ndarray, q_pi: np.ndarray, t: int) -> np.ndarray:
    """Policy-averaged state belief at step ``t``."""
    return q_pi @ beliefs[:, t, :]

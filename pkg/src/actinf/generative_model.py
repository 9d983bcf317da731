"""The agent's internal model: emission/transition tables with Dirichlet
counts, initial-state prior, goal preferences, and the policy set.

Transition (and, when learned, emission) probabilities follow the
expected-value convention: they are the column-normalised Dirichlet means of
the current counts rather than samples, which keeps runs deterministic for a
given seed.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core_math import softmax
from .environment import NUM_ACTIONS, GroundTruthMaps, Layout

# Transition counts start i.i.d. uniform in this range: strictly positive and
# random (so nothing is baked in), but light enough that a handful of real
# transitions dominates a column. Heavier priors keep multi-step predictions
# diffuse for tens of episodes, which flattens the risk landscape and stalls
# convergence on the 3x3 grid; much lighter ones blow up the novelty weights
# and let beliefs park on never-visited columns.
BETA_PRIOR_RANGE = (0.3, 0.8)


@dataclass
class Model:
    A: np.ndarray  # (n, m) emission probabilities, column-stochastic
    alpha_prior: np.ndarray  # (n, m) Dirichlet counts for A
    alpha_post: np.ndarray
    B: np.ndarray  # (NUM_ACTIONS, m, m) transition probabilities
    beta_prior: np.ndarray  # (NUM_ACTIONS, m, m) Dirichlet counts for B
    beta_post: np.ndarray
    D: np.ndarray  # (m,) initial-state prior
    C: np.ndarray  # (m,) preferred state distribution
    policies: np.ndarray  # (num_policies, horizon) action indices
    horizon: int
    episode_length: int
    learn_A: bool = False
    learn_B: bool = True
    goal_tile: int = field(default=0)

    @property
    def num_states(self) -> int:
        return self.D.size

    @property
    def num_obs(self) -> int:
        return self.A.shape[0]

    @property
    def num_policies(self) -> int:
        return self.policies.shape[0]


def enumerate_policies(num_actions: int, horizon: int, limit: int) -> np.ndarray:
    """First ``limit`` fixed-length action sequences in lexicographic order.

    With limit equal to num_actions**horizon this is the full product set.
    """
    total = num_actions**horizon
    if limit > total:
        raise ValueError(f"limit {limit} exceeds the {total} distinct sequences")
    rows = itertools.islice(itertools.product(range(num_actions), repeat=horizon), limit)
    return np.array(list(rows), dtype=int).reshape(limit, horizon)


def preference_vector(layout: Layout, pref_loc: str, precision: float) -> np.ndarray:
    """Goal preferences: softmax of a log-preference bump at the goal tile.

    ``all_goal`` applies the same distribution at every future step, so a
    single vector suffices. Precision 0 degenerates to uniform.
    """
    if pref_loc != "all_goal":
        raise ValueError(f"unknown pref_loc {pref_loc!r}; expected 'all_goal'")
    log_pref = np.zeros(layout.num_tiles)
    log_pref[layout.goal_tile] = precision
    return softmax(log_pref)


def expected_B(beta: np.ndarray) -> np.ndarray:
    """Column-normalised Dirichlet means, per action."""
    return beta / beta.sum(axis=-2, keepdims=True)


def expected_A(alpha: np.ndarray) -> np.ndarray:
    return alpha / alpha.sum(axis=0, keepdims=True)


def init_model(layout: Layout, maps: GroundTruthMaps, config, seed: int) -> Model:
    """Build a fresh model for one run.

    Transition counts are drawn i.i.d. uniform from BETA_PRIOR_RANGE so the
    agent starts with a weakly informative, strictly positive transition
    model it must learn. The emission table is fixed to the ground truth
    unless ``learn_A`` is set, in which case it starts from unit counts.
    ``config`` only needs the experiment fields (num_steps, num_policies,
    learn_A, learn_B, pref_loc, pref_precision).
    """
    rng = np.random.default_rng(seed)
    m = layout.num_tiles
    n = maps.emission_matrix.shape[0]
    horizon = config.num_steps - 1

    beta_prior = rng.uniform(*BETA_PRIOR_RANGE, size=(NUM_ACTIONS, m, m))
    alpha_prior = np.ones((n, m))
    if config.learn_A:
        A = expected_A(alpha_prior)
    else:
        A = maps.emission_matrix.copy()

    D = np.zeros(m)
    D[layout.start_tile] = 1.0

    return Model(
        A=A,
        alpha_prior=alpha_prior,
        alpha_post=alpha_prior.copy(),
        B=expected_B(beta_prior),
        beta_prior=beta_prior,
        beta_post=beta_prior.copy(),
        D=D,
        C=preference_vector(layout, config.pref_loc, config.pref_precision),
        policies=enumerate_policies(NUM_ACTIONS, horizon, config.num_policies),
        horizon=horizon,
        episode_length=config.num_steps,
        learn_A=config.learn_A,
        learn_B=config.learn_B,
        goal_tile=layout.goal_tile,
    )


def check_model(model: Model, atol: float = 1e-9) -> None:
    """Assert the stochasticity and count invariants; used by tests and the
    episode driver after learning updates."""
    assert np.all(model.beta_post > 0.0) and np.all(model.alpha_post > 0.0)
    assert np.allclose(model.A.sum(axis=0), 1.0, atol=atol)
    assert np.allclose(model.B.sum(axis=1), 1.0, atol=atol)
    if model.learn_B:
        assert np.allclose(model.B, expected_B(model.beta_post), atol=atol)
    if model.learn_A:
        assert np.allclose(model.A, expected_A(model.alpha_post), atol=atol)
    assert model.policies.shape[1] == model.horizon

import numpy as np
import pytest

from actinf.generative_model import Model, enumerate_policies
from actinf.oracles import EnumerablePOMDP


def build_model(
    D,
    A,
    B,
    episode_length,
    C=None,
    policies=None,
    learn_A=False,
    learn_B=False,
    beta=None,
    alpha=None,
):
    """Assemble a Model directly from explicit tables (tests only)."""
    D = np.asarray(D, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m = D.size
    horizon = episode_length - 1
    if policies is None:
        policies = enumerate_policies(B.shape[0], horizon, B.shape[0] ** horizon)
    if C is None:
        C = np.full(m, 1.0 / m)
    if beta is None:
        beta = np.maximum(B, 1e-3) * 8.0
    if alpha is None:
        alpha = np.ones_like(A)
    return Model(
        A=A,
        alpha_prior=alpha.copy(),
        alpha_post=alpha.copy(),
        B=B,
        beta_prior=beta.copy(),
        beta_post=beta.copy(),
        D=D,
        C=np.asarray(C, dtype=float),
        policies=np.asarray(policies, dtype=int),
        horizon=horizon,
        episode_length=episode_length,
        learn_A=learn_A,
        learn_B=learn_B,
    )


def random_dense_model(rng, m=3, num_actions=2, episode_length=3, identity_A=False):
    """Small random model; identity_A pins states to observations."""
    A = np.eye(m) if identity_A else rng.dirichlet(np.ones(m), size=m).T
    B = np.stack([rng.dirichlet(np.ones(m), size=m).T for _ in range(num_actions)])
    D = rng.dirichlet(np.ones(m))
    return build_model(D, A, B, episode_length)


def simulate_observations(rng, model, policy, num_steps):
    """Roll the model's own tables forward to get a consistent trajectory."""
    state = rng.choice(model.num_states, p=model.D)
    states, obs = [state], [rng.choice(model.num_obs, p=model.A[:, state])]
    for t in range(num_steps - 1):
        state = rng.choice(model.num_states, p=model.B[policy[t], :, state])
        states.append(state)
        obs.append(rng.choice(model.num_obs, p=model.A[:, state]))
    return np.array(states), np.array(obs)


def as_pomdp(model) -> EnumerablePOMDP:
    return EnumerablePOMDP(D=model.D, A=model.A, B=model.B)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)

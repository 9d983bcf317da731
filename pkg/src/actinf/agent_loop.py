"""Perception -> planning -> action -> learning cycle for both agent kinds.

The two agents share everything except how perception treats the past. The
action-unaware agent keeps one belief trajectory per policy over the whole
episode window and must explain its past observations through each policy's
own action sequence. The action-aware agent smooths a single shared belief
track over the executed action prefix, keeps per-policy beliefs only for the
remaining future steps, and prunes policies whose prefix contradicts what it
actually did (they keep zero posterior mass so metric vectors stay
full-length).
"""

from dataclasses import dataclass

import numpy as np

from .action_selection import select_action
from .core_math import softmax
from .environment import NUM_ACTIONS, GridEnv, build_layout
from .generative_model import Model, expected_A, expected_B, init_model
from .learning import EpisodeEvidence, update_alpha, update_beta
from .perception import (
    BeliefEnsemble,
    FeRecord,
    ModelLogs,
    action_groups,
    future_free_energies,
    marginal_fe,
    param_kl,
    policy_free_energies,
    shared_past_free_energy,
    sweep_future_beliefs,
    sweep_policy_beliefs,
    sweep_shared_past,
)
from .planning import EfeTotals, efe_bulk, policy_posterior


@dataclass
class StepRecord:
    """Everything captured at one step, after planning and before acting."""

    step: int  # 0-based
    fe: FeRecord
    q_pi: np.ndarray
    g_totals: np.ndarray
    risk: np.ndarray
    b_novelty: np.ndarray


@dataclass
class EpisodeTrace:
    """Observations, visited tiles, executed actions, and per-step records."""

    observations: np.ndarray
    tiles: np.ndarray
    actions: np.ndarray
    records: list[StepRecord]
    success: bool


class _AgentBase:
    kind = "base"

    def __init__(
        self,
        model: Model,
        inf_steps: int = 10,
        selection_mode: str = "kd",
        rng: np.random.Generator | None = None,
        update_rule: str = "fixed_point",
    ):
        self.model = model
        self.inf_steps = inf_steps
        self.selection_mode = selection_mode
        self.update_rule = update_rule
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.ensemble = BeliefEnsemble(
            model.num_policies, model.episode_length, model.num_states
        )
        self.groups = action_groups(model.policies)
        self.logs = ModelLogs.from_model(model)
        self.obs_history: list[int] = []
        self.executed: list[int] = []
        self.records: list[StepRecord] = []
        self.last_q_pi = np.full(model.num_policies, 1.0 / model.num_policies)
        self.episode_index = 0

    def begin_episode(self) -> None:
        self.ensemble.reset()
        self.obs_history.clear()
        self.executed.clear()
        self.records.clear()
        self.logs = ModelLogs.from_model(self.model)

    def step(self, observation: int) -> int:
        """Perceive, plan, record, and pick the next action."""
        if len(self.obs_history) >= self.model.episode_length - 1:
            raise RuntimeError("no action remains at the terminal step")
        self.obs_history.append(int(observation))
        tau = len(self.obs_history)
        fe_vec, q_pi, efe = self._infer(tau, planning=True)
        self._record(tau, fe_vec, q_pi, efe, include_param_kl=False)
        decision = select_action(
            q_pi, self.model.policies, tau - 1, self.selection_mode, self.rng
        )
        self.executed.append(decision.action)
        return decision.action

    def final_update(self, observation: int) -> None:
        """Terminal perceptual update: no planning, parameter divergences join
        the recorded marginal free energy."""
        self.obs_history.append(int(observation))
        tau = len(self.obs_history)
        if tau != self.model.episode_length:
            raise RuntimeError("final update expects a full observation history")
        fe_vec, q_pi, efe = self._infer(tau, planning=False)
        self._record(tau, fe_vec, q_pi, efe, include_param_kl=True)

    def learn(self) -> None:
        """End-of-episode count updates, then reset beliefs for the next one."""
        evidence = EpisodeEvidence(
            observations=np.asarray(self.obs_history, dtype=int),
            beliefs=self.ensemble.beliefs,
            q_pi=self.last_q_pi,
            executed_actions=np.asarray(self.executed, dtype=int),
        )
        if self.model.learn_B:
            self.model.beta_post = update_beta(
                self.model.beta_post, evidence, self.model.policies
            )
            self.model.B = expected_B(self.model.beta_post)
        if self.model.learn_A:
            self.model.alpha_post = update_alpha(self.model.alpha_post, evidence)
            self.model.A = expected_A(self.model.alpha_post)
        self.episode_index += 1
        self.ensemble.reset()

    def _record(self, tau, fe_vec, q_pi, efe: EfeTotals, include_param_kl: bool) -> None:
        kl_b, kl_a = param_kl(self.model) if include_param_kl else (0.0, 0.0)
        record = FeRecord(
            policy_fes=fe_vec,
            marginal_fe=float(np.dot(q_pi, fe_vec)) + kl_b + kl_a,
            kl_B=kl_b,
            kl_A=kl_a,
            step=tau - 1,
        )
        self.records.append(
            StepRecord(
                step=tau - 1,
                fe=record,
                q_pi=q_pi,
                g_totals=efe.total,
                risk=efe.risk,
                b_novelty=efe.b_novelty,
            )
        )
        self.last_q_pi = q_pi

    def _zero_efe(self) -> EfeTotals:
        z = np.zeros(self.model.num_policies)
        return EfeTotals(
            total=z, risk=z.copy(), ambiguity=z.copy(), a_novelty=z.copy(), b_novelty=z.copy()
        )

    def _infer(self, tau: int, planning: bool):
        raise NotImplementedError


class ActionUnawareAgent(_AgentBase):
    """Evaluates every policy over the full episode window at every step."""

    kind = "unaware"

    def _infer(self, tau: int, planning: bool):
        obs = np.asarray(self.obs_history, dtype=int)
        beliefs = self.ensemble.beliefs
        sweep_policy_beliefs(
            beliefs, self.groups, obs, tau, self.logs, self.inf_steps, rule=self.update_rule
        )
        fe_vec = policy_free_energies(
            beliefs, self.model.policies, self.groups, obs, tau, self.logs
        )
        if planning:
            efe = efe_bulk(beliefs, self.model.policies, self.groups, self.model, tau)
            q_pi = policy_posterior(efe.total, fe_vec).q_pi
        else:
            efe = self._zero_efe()
            q_pi = softmax(-fe_vec)
        return fe_vec, q_pi, efe


class ActionAwareAgent(_AgentBase):
    """Conditions the past on executed actions and plans only over policies
    whose prefix matches them."""

    kind = "aware"

    def _survivors(self, tau: int) -> np.ndarray:
        prefix = np.asarray(self.executed[: tau - 1], dtype=int)
        if prefix.size == 0:
            return np.arange(self.model.num_policies)
        mask = np.all(self.model.policies[:, : prefix.size] == prefix, axis=1)
        return np.flatnonzero(mask)

    def _infer(self, tau: int, planning: bool):
        obs = np.asarray(self.obs_history, dtype=int)
        executed = np.asarray(self.executed, dtype=int)
        num_policies = self.model.num_policies
        past = self.ensemble.past
        sweep_shared_past(past, obs, executed, self.logs, self.inf_steps, rule=self.update_rule)
        fe_past = shared_past_free_energy(past, obs, executed, self.logs)
        survivors = self._survivors(tau)
        fe_vec = np.full(num_policies, fe_past)
        q_pi = np.zeros(num_policies)
        efe = self._zero_efe()
        if planning:
            slab = self.ensemble.beliefs[survivors]
            slab[:, :tau] = past[:tau]
            sub_policies = self.model.policies[survivors]
            sub_groups = action_groups(sub_policies)
            sweep_future_beliefs(
                slab, past[tau - 1], sub_groups, tau, self.logs, self.inf_steps,
                rule=self.update_rule,
            )
            fe_future = future_free_energies(slab, past[tau - 1], sub_groups, tau, self.logs)
            sub_efe = efe_bulk(slab, sub_policies, sub_groups, self.model, tau)
            self.ensemble.beliefs[survivors] = slab
            fe_vec[survivors] += fe_future
            q_pi[survivors] = softmax(-(sub_efe.total + fe_vec[survivors]))
            efe.total[survivors] = sub_efe.total
            efe.risk[survivors] = sub_efe.risk
            efe.ambiguity[survivors] = sub_efe.ambiguity
            efe.a_novelty[survivors] = sub_efe.a_novelty
            efe.b_novelty[survivors] = sub_efe.b_novelty
        else:
            self.ensemble.beliefs[survivors] = past
            q_pi[survivors] = softmax(np.full(survivors.size, -fe_past))
        return fe_vec, q_pi, efe


def make_agent(
    kind: str,
    model: Model,
    inf_steps: int,
    selection_mode: str,
    rng=None,
    update_rule: str = "fixed_point",
):
    if kind == "unaware":
        return ActionUnawareAgent(model, inf_steps, selection_mode, rng, update_rule)
    if kind == "aware":
        return ActionAwareAgent(model, inf_steps, selection_mode, rng, update_rule)
    raise ValueError(f"unknown agent kind {kind!r}")


def run_episode(agent: _AgentBase, env: GridEnv) -> EpisodeTrace:
    """Drive one episode: T - 1 act/step pairs, a terminal perceptual update,
    then the learning phase and belief reset."""
    if env.episode_length != agent.model.episode_length:
        raise ValueError(
            f"environment episode length {env.episode_length} != "
            f"model episode length {agent.model.episode_length}"
        )
    agent.begin_episode()
    tile, obs = env.reset()
    tiles = [tile]
    for _ in range(env.episode_length - 1):
        action = agent.step(obs)
        tile, obs, _ = env.step(action)
        tiles.append(tile)
    agent.final_update(obs)
    trace = EpisodeTrace(
        observations=np.asarray(agent.obs_history, dtype=int),
        tiles=np.asarray(tiles, dtype=int),
        actions=np.asarray(agent.executed, dtype=int),
        records=list(agent.records),
        success=tiles[-1] == env.layout.goal_tile,
    )
    agent.learn()
    return trace


def run_experiment(config, progress=None):
    """Train ``num_runs`` independently seeded agents and aggregate metrics.

    Run r uses seed ``config.seed + r`` for both its model initialisation and
    its action-sampling stream, so runs are reproducible in isolation.
    Returns a populated RunMetrics.
    """
    from .harness.metrics import RunMetrics  # deferred: harness sits above this module

    layout, maps = build_layout(config.env_layout)
    runs, episodes = config.num_runs, config.num_episodes
    steps, num_policies = config.num_steps, config.num_policies
    shape_sp = (runs, episodes, steps, num_policies)
    metrics = RunMetrics(
        config=config,
        marginal_fe=np.zeros(shape_sp[:3]),
        policy_fe=np.zeros(shape_sp),
        policy_efe=np.zeros(shape_sp),
        efe_risk=np.zeros(shape_sp),
        efe_bnovelty=np.zeros(shape_sp),
        policy_probs=np.zeros(shape_sp),
        success=np.zeros((runs, episodes)),
        visits=np.zeros((runs, NUM_ACTIONS, layout.num_tiles), dtype=int),
        beta_post=np.zeros((runs, NUM_ACTIONS, layout.num_tiles, layout.num_tiles)),
        b_learned=np.zeros((runs, NUM_ACTIONS, layout.num_tiles, layout.num_tiles)),
        alpha_post=(
            np.zeros((runs, layout.num_tiles, layout.num_tiles)) if config.learn_A else None
        ),
        ground_truth_B=maps.transition_tensor.copy(),
    )
    for run in range(runs):
        seed = config.seed + run
        model = init_model(layout, maps, config, seed)
        env = GridEnv(layout, maps, steps)
        env.reset(seed)
        agent = make_agent(
            config.agent_kind,
            model,
            config.inf_steps,
            config.action_selection,
            np.random.default_rng([seed, 1]),
        )
        for episode in range(episodes):
            trace = run_episode(agent, env)
            for record in trace.records:
                t = record.step
                metrics.marginal_fe[run, episode, t] = record.fe.marginal_fe
                metrics.policy_fe[run, episode, t] = record.fe.policy_fes
                metrics.policy_efe[run, episode, t] = record.g_totals
                metrics.efe_risk[run, episode, t] = record.risk
                metrics.efe_bnovelty[run, episode, t] = record.b_novelty
                metrics.policy_probs[run, episode, t] = record.q_pi
            metrics.success[run, episode] = float(trace.success)
            np.add.at(metrics.visits[run], (trace.actions, trace.tiles[:-1]), 1)
        metrics.beta_post[run] = model.beta_post
        metrics.b_learned[run] = model.B
        if config.learn_A:
            metrics.alpha_post[run] = model.alpha_post
        if progress is not None:
            progress(run, metrics.success[run].mean())
    return metrics

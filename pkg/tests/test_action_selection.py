import numpy as np
import pytest

from actinf.action_selection import select_action


class TestKroneckerAverage:
    def test_unanimous(self):
        policies = np.array([[2, 0], [2, 1], [2, 3]])
        decision = select_action(np.array([0.2, 0.5, 0.3]), policies, t=0)
        assert decision.action == 2
        np.testing.assert_allclose(decision.per_action_mass, [0, 0, 1, 0])

    def test_mass_aggregation(self):
        policies = np.array([[0], [1], [1]])
        decision = select_action(np.array([0.4, 0.35, 0.25]), policies, t=0)
        assert decision.action == 1
        np.testing.assert_allclose(decision.per_action_mass, [0.4, 0.6, 0, 0])

    def test_tie_breaks_low_index(self):
        policies = np.array([[0], [1]])
        decision = select_action(np.array([0.5, 0.5]), policies, t=0)
        assert decision.action == 0

    def test_mass_sums_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            policies = rng.integers(0, 4, size=(rng.integers(1, 30), 3))
            q = rng.dirichlet(np.ones(policies.shape[0]))
            decision = select_action(q, policies, t=int(rng.integers(0, 3)))
            assert decision.per_action_mass.sum() == pytest.approx(1.0, abs=1e-12)

    def test_invariant_under_policy_reorder(self):
        rng = np.random.default_rng(5)
        policies = rng.integers(0, 4, size=(12, 3))
        q = rng.dirichlet(np.ones(12))
        base = select_action(q, policies, t=1)
        perm = rng.permutation(12)
        shuffled = select_action(q[perm], policies[perm], t=1)
        assert base.action == shuffled.action
        np.testing.assert_allclose(base.per_action_mass, shuffled.per_action_mass, atol=1e-12)


class TestGreedyModes:
    def test_greedy_max_takes_top_policy(self):
        policies = np.array([[0, 1], [3, 2]])
        decision = select_action(np.array([0.3, 0.7]), policies, t=0, mode="greedy_max")
        assert decision.action == 3

    def test_greedy_sample_deterministic_given_rng(self):
        policies = np.array([[0], [1], [2]])
        q = np.array([0.1, 0.8, 0.1])
        picks = {
            select_action(q, policies, 0, "greedy_sample", np.random.default_rng(9)).action
            for _ in range(3)
        }
        assert len(picks) == 1

    def test_greedy_sample_needs_rng(self):
        with pytest.raises(ValueError):
            select_action(np.array([1.0]), np.array([[0]]), 0, "greedy_sample")

    def test_agreement_with_kd_on_dominant_policy(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 50:
            policies = rng.integers(0, 4, size=(8, 2))
            q = rng.dirichlet(np.full(8, 0.3))
            top = int(np.argmax(q))
            t = int(rng.integers(0, 2))
            others = np.delete(np.arange(8), top)
            if q[top] > 0.5 and not np.any(policies[others, t] == policies[top, t]):
                kd = select_action(q, policies, t, "kd")
                greedy = select_action(q, policies, t, "greedy_max")
                assert kd.action == greedy.action
                checked += 1


class TestValidation:
    def test_empty_policy_set(self):
        with pytest.raises(ValueError):
            select_action(np.array([]), np.empty((0, 2), dtype=int), t=0)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            select_action(np.array([1.0]), np.array([[0]]), 0, mode="boltzmann")

    def test_step_out_of_range(self):
        with pytest.raises(ValueError):
            select_action(np.array([1.0]), np.array([[0]]), t=1)

import math

import pytest
from hypothesis import given, strategies as st

from oppaccess import (
    ActionSet,
    BeliefVector,
    TransitionModel,
    enumerate_actions,
    enumerate_outcomes,
    immediate_reward,
    outcome_probability,
    tau,
    tau_iterate,
    update_belief,
)
from oppaccess.model import OutcomeRealization

probs = st.floats(min_value=0.0, max_value=1.0)


class TestTau:
    def test_endpoints(self):
        m = TransitionModel(0.3, 0.7)
        assert tau(0.0, m) == m.p01
        assert tau(1.0, m) == m.p11

    def test_symmetric_model_fixes_half(self):
        assert tau(0.5, TransitionModel(0.2, 0.8)) == pytest.approx(0.5, abs=1e-15)

    def test_direct_evaluation(self):
        # 0.5*0.9 + 0.5*0.3
        assert tau(0.5, TransitionModel(0.3, 0.9)) == pytest.approx(0.6, abs=1e-15)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            tau(1.5, TransitionModel(0.3, 0.9))
        with pytest.raises(ValueError):
            tau(-0.1, TransitionModel(0.3, 0.9))

    @given(w1=probs, w2=probs, p01=probs, p11=probs)
    def test_monotone_when_positively_correlated(self, w1, w2, p01, p11):
        if p11 < p01:
            p01, p11 = p11, p01
        m = TransitionModel(p01, p11)
        if w1 >= w2:
            # allow 1 ulp of float noise in the affine evaluation
            assert tau(w1, m) >= tau(w2, m) - 1e-15
        assert min(p01, p11) - 1e-12 <= tau(w1, m) <= max(p01, p11) + 1e-12

    @given(w=probs, p01=probs, p11=probs)
    def test_fixed_point_attracts(self, w, p01, p11):
        m = TransitionModel(p01, p11)
        if 1.0 - p11 + p01 == 0.0:
            return
        star = m.stationary_belief()
        assert tau(star, m) == pytest.approx(star, abs=1e-12)
        if p11 >= p01:
            # contraction toward the fixed point, monotone from either side
            before = w
            for _ in range(5):
                after = tau(before, m)
                if before >= star:
                    assert star - 1e-12 <= after <= before + 1e-12
                else:
                    assert before - 1e-12 <= after <= star + 1e-12
                before = after

    def test_tau_iterate(self):
        m = TransitionModel(0.2, 0.8)
        assert tau_iterate(0.9, m, 0) == 0.9
        assert tau_iterate(0.9, m, 2) == tau(tau(0.9, m), m)


class TestOutcomeProbability:
    def test_product_formula(self):
        assert outcome_probability((0.5, 0.5), (1, 1)) == pytest.approx(0.25)

    def test_empty_product(self):
        assert outcome_probability((), ()) == 1.0

    def test_certain_outcome(self):
        assert outcome_probability((1.0, 0.0), (1, 0)) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            outcome_probability((0.5,), (1, 0))

    @given(
        omega=st.lists(probs, min_size=1, max_size=6),
        k=st.integers(min_value=1, max_value=6),
    )
    def test_outcomes_sum_to_one(self, omega, k):
        k = min(k, len(omega))
        belief = BeliefVector(tuple(omega))
        action = ActionSet(tuple(range(1, k + 1)))
        total = sum(o.probability for o in enumerate_outcomes(belief, action))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestUpdateBelief:
    def test_observed_and_propagated(self):
        m = TransitionModel(0.2, 0.8)
        b = BeliefVector((0.5, 0.5))
        out = update_belief(b, ActionSet((1,)), OutcomeRealization((1,), 0.5), m)
        assert out.omega == (0.8, 0.5)

    def test_all_observed(self):
        m = TransitionModel(0.3, 0.9)
        b = BeliefVector((0.3, 0.9))
        out = update_belief(b, ActionSet((1, 2)), OutcomeRealization((0, 1), 1.0), m)
        assert out.omega == (m.p01, m.p11)

    def test_single_bad(self):
        m = TransitionModel(0.3, 0.9)
        out = update_belief(
            BeliefVector((0.6,)), ActionSet((1,)), OutcomeRealization((0,), 0.4), m
        )
        assert out.omega == (m.p01,)

    def test_misaligned_outcome(self):
        m = TransitionModel(0.3, 0.9)
        with pytest.raises(ValueError):
            update_belief(
                BeliefVector((0.5, 0.5)),
                ActionSet((1, 2)),
                OutcomeRealization((1,), 0.5),
                m,
            )

    def test_provenance_tags(self):
        m = TransitionModel(0.2, 0.8)
        b = BeliefVector.initial((0.5, 0.6, 0.7))
        out = update_belief(b, ActionSet((1, 3)), OutcomeRealization((1, 0), 0.15), m)
        assert out.tags == (("G", 0), ("I", 2, 1), ("B", 0))
        out2 = update_belief(out, ActionSet((2,)), OutcomeRealization((1,), 0.5), m)
        assert out2.tags == (("G", 1), ("G", 0), ("B", 1))

    @given(
        omega=st.lists(probs, min_size=2, max_size=5),
        p01=probs,
        p11=probs,
        data=st.data(),
    )
    def test_entries_stay_valid(self, omega, p01, p11, data):
        m = TransitionModel(p01, p11)
        belief = BeliefVector(tuple(omega))
        k = data.draw(st.integers(1, len(omega)))
        action = ActionSet(tuple(range(1, k + 1)))
        bits = tuple(data.draw(st.integers(0, 1)) for _ in range(k))
        out = update_belief(belief, action, OutcomeRealization(bits, 0.0), m)
        for i, w in enumerate(out.omega, start=1):
            assert 0.0 <= w <= 1.0
            if i <= k:
                assert w in (m.p01, m.p11)


class TestRewardAndActions:
    def test_immediate_reward(self):
        b = BeliefVector((0.2, 0.7))
        assert immediate_reward(b, ActionSet((2,))) == pytest.approx(0.7)
        assert immediate_reward(b, ActionSet((1, 2))) == pytest.approx(0.9)
        assert immediate_reward(BeliefVector((0.0, 0.0)), ActionSet((1, 2))) == 0.0

    def test_enumerate_actions(self):
        assert [a.indices for a in enumerate_actions(3, 2)] == [(1, 2), (1, 3), (2, 3)]
        assert [a.indices for a in enumerate_actions(2, 2)] == [(1, 2)]
        assert [a.indices for a in enumerate_actions(4, 1)] == [(1,), (2,), (3,), (4,)]

    def test_enumerate_actions_invalid(self):
        with pytest.raises(ValueError):
            enumerate_actions(2, 3)

    def test_action_set_validation(self):
        with pytest.raises(ValueError):
            ActionSet((1, 1))
        with pytest.raises(ValueError):
            ActionSet((0, 1))
        with pytest.raises(ValueError):
            ActionSet((1, 2)).validate_for(n=2, k=1)


class TestModelTypes:
    def test_probability_validation(self):
        with pytest.raises(ValueError):
            TransitionModel(-0.1, 0.5)
        with pytest.raises(ValueError):
            TransitionModel(0.5, 1.1)

    def test_positively_correlated_flag(self):
        assert TransitionModel(0.2, 0.8).positively_correlated
        assert TransitionModel(0.5, 0.5).positively_correlated
        assert not TransitionModel(0.8, 0.2).positively_correlated

    def test_stationary_degenerate(self):
        with pytest.raises(ValueError):
            TransitionModel(0.0, 1.0).stationary_belief()

    def test_horizon_validation(self):
        from oppaccess import HorizonSpec

        with pytest.raises(ValueError):
            HorizonSpec(0)
        with pytest.raises(ValueError):
            HorizonSpec(3, 1.5)
        HorizonSpec(1, 0.0)
        HorizonSpec(1, 1.0)

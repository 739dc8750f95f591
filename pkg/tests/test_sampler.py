"""Seeded random-walk sampling: budgets, determinism, stream separation."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foilscope.model import (
    BOTTOM,
    END,
    ContractViolation,
    CountingModel,
    Trajectory,
    execute_sequence,
)
from foilscope.sampler import (
    SamplerConfig,
    anchors_from_trajectories,
    derive_seed,
    observation_rng,
    sample_executable,
    sample_states,
    walk_rng,
)

from conftest import LineWorld, action_by_label


# --- config validation ---------------------------------------------------------


def test_config_rejects_empty_anchors():
    with pytest.raises(ContractViolation):
        SamplerConfig(anchors=())


def test_config_rejects_sentinel_anchors():
    with pytest.raises(ContractViolation):
        SamplerConfig(anchors=(0, BOTTOM))
    with pytest.raises(ContractViolation):
        SamplerConfig(anchors=(END,))


def test_config_rejects_negative_knobs():
    with pytest.raises(ContractViolation):
        SamplerConfig(anchors=(0,), walk_length=-1)
    with pytest.raises(ContractViolation):
        SamplerConfig(anchors=(0,), budget=-1)


def test_with_seed_replaces_only_seed():
    cfg = SamplerConfig(anchors=(0, 1), walk_length=3, budget=7, seed=5)
    other = cfg.with_seed(9)
    assert other.seed == 9
    assert (other.anchors, other.walk_length, other.budget) == ((0, 1), 3, 7)


# --- emission contract -----------------------------------------------------------


def test_budget_is_exact(line):
    cfg = SamplerConfig(anchors=(0, 1, 2), walk_length=5, budget=137, seed=3)
    states = list(sample_states(line, cfg))
    assert len(states) == 137


def test_budget_zero_emits_nothing(line):
    cfg = SamplerConfig(anchors=(0,), walk_length=5, budget=0, seed=3)
    assert list(sample_states(line, cfg)) == []


def test_walk_length_zero_yields_only_anchors(line):
    cfg = SamplerConfig(anchors=(1, 2), walk_length=0, budget=50, seed=0)
    states = list(sample_states(line, cfg))
    assert len(states) == 50
    assert set(states) <= {1, 2}


def test_emitted_states_are_live(line):
    cfg = SamplerConfig(anchors=(0, 3), walk_length=8, budget=400, seed=11)
    for s in sample_states(line, cfg):
        assert s is not BOTTOM and s is not END
        assert 0 <= s <= line.top


def test_determinism_and_seed_sensitivity(line):
    cfg = SamplerConfig(anchors=(0, 2), walk_length=6, budget=200, seed=21)
    a = list(sample_states(line, cfg))
    b = list(sample_states(line, cfg))
    assert a == b
    c = list(sample_states(line, cfg.with_seed(22)))
    assert a != c


def test_simulate_call_ceiling(line):
    # at most budget * walk_length walk-step calls
    counting = CountingModel(line)
    cfg = SamplerConfig(anchors=(0, 1, 2), walk_length=4, budget=100, seed=7)
    list(sample_states(counting, cfg))
    assert counting.calls <= 100 * 4


def test_failed_step_ends_episode_without_emission():
    # anchor at 0 in a world where 'back' fails: no ⊥ ever emitted, episodes
    # still consume fresh anchors until the budget is met
    line = LineWorld()
    cfg = SamplerConfig(anchors=(0,), walk_length=3, budget=60, seed=2)
    states = list(sample_states(line, cfg))
    assert len(states) == 60
    assert BOTTOM not in states


def test_terminal_states_end_episode(line):
    class Terminating:
        terminal_states = (3,)

        def actions(self):
            return line.actions()

        def simulate(self, state, action):
            return line.simulate(state, action)

    cfg = SamplerConfig(anchors=(0, 1, 2), walk_length=10, budget=300, seed=5)
    states = list(sample_states(Terminating(), cfg))
    assert len(states) == 300
    assert 3 not in states  # never emitted: reaching it ends the episode


# --- filtered sampling ---------------------------------------------------------------


def test_sample_executable_filters(line):
    charge = action_by_label(line, "charge")  # only even states below top
    cfg = SamplerConfig(anchors=(0, 1, 2, 3), walk_length=5, budget=250, seed=13)
    pairs = list(sample_executable(line, cfg, charge))
    assert pairs  # even states do come up
    for state, out in pairs:
        assert state % 2 == 0 and state < line.top
        assert not out.failed and out.cost == 5.0


# --- seed derivation -------------------------------------------------------------------


def test_derive_seed_is_stable_and_sensitive():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert derive_seed(7, 0) != derive_seed(7, 1)
    assert 0 <= derive_seed(123, 456) < 2**64


def test_walk_and_observation_streams_differ():
    w = walk_rng(42).random(8)
    o = observation_rng(42).random(8)
    assert not np.allclose(w, o)
    # and both are reproducible
    assert np.allclose(w, walk_rng(42).random(8))


# --- anchor extraction --------------------------------------------------------------------


def test_anchors_from_trajectories_dedupes_in_order(line):
    fwd = action_by_label(line, "fwd")
    back = action_by_label(line, "back")
    t1 = execute_sequence(line, 0, (fwd, fwd))  # 0,1,2
    t2 = execute_sequence(line, 2, (back, back))  # 2,1,0
    anchors = anchors_from_trajectories(line, t1, t2)
    assert anchors == (0, 1, 2)


def test_anchors_drop_bottom_and_terminals(line):
    fwd = action_by_label(line, "fwd")
    back = action_by_label(line, "back")
    failed = execute_sequence(line, 0, (back,))  # 0, ⊥
    anchors = anchors_from_trajectories(line, failed)
    assert anchors == (0,)

    class Terminating:
        terminal_states = (1,)

    with pytest.raises(ContractViolation):
        anchors_from_trajectories(
            Terminating(), Trajectory(states=(1,), costs=())
        )


def test_anchors_require_a_live_state(line):
    back = action_by_label(line, "back")
    failed = execute_sequence(line, 0, (back,))
    t = Trajectory(states=(BOTTOM,), costs=())
    with pytest.raises(ContractViolation):
        anchors_from_trajectories(line, t)
    # but a failed trajectory with live prefix is fine
    assert anchors_from_trajectories(line, failed) == (0,)


# --- property: exact emission count, all live ------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    budget=st.integers(min_value=0, max_value=300),
    walk_length=st.integers(min_value=0, max_value=12),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_emission_contract_properties(budget, walk_length, seed):
    line = LineWorld()
    cfg = SamplerConfig(anchors=(0, 2, 4), walk_length=walk_length, budget=budget, seed=seed)
    states = list(sample_states(line, cfg))
    assert len(states) == budget
    assert all(s is not BOTTOM and s is not END for s in states)

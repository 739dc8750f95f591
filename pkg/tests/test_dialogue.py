"""Dialogue sessions: rendering templates, history, payloads, replay.

The rendered sentences are golden: tests spell them out byte for byte, and
the templates must not drift without updating these strings.
"""
import json

import numpy as np
import pytest

from foilscope.concepts import ObservationModel
from foilscope.dialogue import (
    CostAbstractionExplanation,
    DialogueConfig,
    FoilPreferredExplanation,
    MissingPreconditionExplanation,
    Session,
    VocabularyInsufficientExplanation,
    explanation_from_payload,
    render_text,
    replay_session,
)
from foilscope.environments import load_actions, load_map, vocabulary_for
from foilscope.model import ContractViolation, InvalidPlanError

from conftest import action_by_label


# --- config -----------------------------------------------------------------------


def test_config_defaults_and_payload_round_trip():
    cfg = DialogueConfig()
    assert (cfg.budget, cfg.walk_length, cfg.kappa) == (500, 10, 0.01)
    assert (cfg.threshold, cfg.obs_tp, cfg.obs_fp, cfg.prior) == (0.5, 1.0, 0.0, 0.5)
    assert DialogueConfig.from_payload(cfg.to_payload()) == cfg
    custom = DialogueConfig(budget=200, obs_tp=0.95, obs_fp=0.05, kappa=0.02)
    assert DialogueConfig.from_payload(custom.to_payload()) == custom
    # partial payloads keep defaults for the rest
    assert DialogueConfig.from_payload({"budget": 9}) == DialogueConfig(budget=9)


def test_config_validation():
    with pytest.raises(ContractViolation):
        DialogueConfig(budget=-1)
    with pytest.raises(ContractViolation):
        DialogueConfig(threshold=1.5)
    with pytest.raises(ContractViolation):
        DialogueConfig(prior=0.0)


def test_config_observation_model():
    cfg = DialogueConfig()
    assert cfg.observation_model(4).is_exact
    noisy = DialogueConfig(obs_tp=0.95, obs_fp=0.05).observation_model(4)
    assert not noisy.is_exact
    assert np.all(noisy.p_true_pos == 0.95)


# --- golden rendering --------------------------------------------------------------


def _mp(**kw):
    base = dict(
        concept="switch_on",
        fail_action="push-right",
        fail_index=0,
        confidence=0.99,
        samples_used=500,
        threshold_met=True,
    )
    base.update(kw)
    return MissingPreconditionExplanation(**base)


def _entry(step, action, concepts, min_cost, confidence=0.9):
    return {
        "step": step,
        "action": action,
        "concepts": concepts,
        "min_cost": min_cost,
        "confidence": confidence,
    }


def _ca(entries, **kw):
    base = dict(
        total_abstract_cost=sum(e["min_cost"] for e in entries),
        plan_cost=18.0,
        foil_cost=20.0,
        threshold_met=True,
    )
    base.update(kw)
    return CostAbstractionExplanation(entries=tuple(entries), **base)


def test_missing_precondition_sentence():
    assert render_text(_mp()) == (
        "The action push-right failed in the state as the precondition "
        "switch_on was false in the state."
    )


def test_cost_sentence_single_binding_step():
    ca = _ca(
        [
            _entry(0, "push-right", ["not_switch_on"], 10.0),
            _entry(1, "move-up", [], 1.0),
        ]
    )
    assert render_text(ca) == (
        "Executing the action push-right in the presence of the concept "
        "not_switch_on will cost at least 10."
    )


def test_cost_sentences_dedupe_repeated_binding_steps():
    ca = _ca(
        [
            _entry(0, "push-right", ["not_switch_on"], 10.0),
            _entry(1, "push-right", ["not_switch_on"], 10.0),
            _entry(2, "achieve-goal", [], 0.0, 0.5),
        ]
    )
    assert render_text(ca) == (
        "Executing the action push-right in the presence of the concept "
        "not_switch_on will cost at least 10."
    )


def test_cost_sentence_multiple_concepts_and_unconditioned():
    ca = _ca(
        [
            _entry(0, "push-up", ["box_above", "not_switch_on"], 10.0),
            _entry(1, "push-left", ["box_on_left"], 10.0),
        ]
    )
    assert render_text(ca) == (
        "Executing the action push-up in the presence of the concepts "
        "box_above and not_switch_on will cost at least 10. "
        "Executing the action push-left in the presence of the concept "
        "box_on_left will cost at least 10."
    )
    bare = _ca([_entry(0, "attack", [], 500.0)])
    assert render_text(bare) == (
        "Executing the action attack will cost at least 500."
    )


def test_foil_preferred_sentence():
    fp = FoilPreferredExplanation(plan_cost=3.0, foil_cost=3.0)
    assert render_text(fp) == (
        "The proposed alternative is at least as good as the current plan; "
        "the agent can adopt it."
    )


def test_insufficiency_advisory():
    vi = VocabularyInsufficientExplanation(phase="precondition", samples_used=500)
    assert render_text(vi) == (
        "No explanation is expressible in the current concept vocabulary; "
        "extend the vocabulary and ask again."
    )


def test_below_threshold_withholding_advisory():
    withheld = _mp(threshold_met=False, confidence=0.3)
    assert render_text(withheld) == (
        "The candidate explanation falls below the reporting confidence "
        "threshold and is withheld."
    )
    ca = _ca([_entry(0, "push-right", [], 10.0, 0.2)], threshold_met=False)
    assert render_text(ca) == render_text(withheld)


def test_cost_formatting_trims_trailing_zeroes():
    assert "at least 500." in render_text(_ca([_entry(0, "attack", [], 500.0)]))
    assert "at least 0.5." in render_text(_ca([_entry(0, "sip", [], 0.5)]))


# --- explanation payload round-trips ---------------------------------------------------


@pytest.mark.parametrize(
    "explanation",
    [
        _mp(trace=(0.5, 0.7, 0.9), rivals=()),
        _ca([_entry(0, "push-right", ["not_switch_on"], 10.0)]),
        FoilPreferredExplanation(plan_cost=3.0, foil_cost=3.0),
        VocabularyInsufficientExplanation(phase="cost"),
    ],
)
def test_explanation_payload_round_trip(explanation):
    payload = explanation.to_payload()
    assert payload["v"] == 1
    again = explanation_from_payload(json.loads(json.dumps(payload)))
    assert again == explanation
    assert render_text(again) == render_text(explanation)


def test_explanation_payload_version_and_kind_checks():
    with pytest.raises(ContractViolation):
        explanation_from_payload({"v": 2, "kind": "foil-preferred"})
    with pytest.raises(ContractViolation):
        explanation_from_payload({"v": 1, "kind": "interpretive-dance"})


# --- sessions on the hand world -----------------------------------------------------------


def _line_session(line, line_vocab, **kw):
    fwd = action_by_label(line, "fwd")
    kw.setdefault("config", DialogueConfig(budget=150, walk_length=6))
    return Session(line, line_vocab, (fwd, fwd, fwd), **kw)


def test_session_rejects_invalid_plans(line, line_vocab):
    fwd = action_by_label(line, "fwd")
    back = action_by_label(line, "back")
    with pytest.raises(InvalidPlanError):
        Session(line, line_vocab, (back,))  # fails outright
    with pytest.raises(InvalidPlanError):
        Session(line, line_vocab, (fwd, fwd))  # executes but misses the goal


def test_session_plan_bookkeeping(line, line_vocab):
    session = _line_session(line, line_vocab)
    assert session.plan_cost == 3.0
    assert session.plan_trajectory.succeeded
    assert session.history == ()


def test_explain_invalid_foil(line, line_vocab):
    session = _line_session(line, line_vocab)
    back = action_by_label(line, "back")
    explanation = session.explain((back,))
    assert isinstance(explanation, MissingPreconditionExplanation)
    # back fails at 0; its executable states 1..4 share exactly not_at_zero
    assert explanation.concept == "not_at_zero"
    assert explanation.fail_action == "back"
    assert explanation.fail_index == 0
    assert explanation.threshold_met
    assert explanation.confidence > 0.9
    assert explanation.samples_used == 150
    assert explanation.trace[0] == 0.5
    assert len(explanation.trace) == 150 + 1
    rivals = {r["concept"]: r for r in explanation.rivals}
    assert set(rivals) == {"not_even", "high", "not_at_zero"}
    assert rivals["not_at_zero"]["eliminated_at"] is None
    assert rivals["high"]["eliminated_at"] is not None


def test_explain_costlier_foil(line, line_vocab):
    session = _line_session(line, line_vocab)
    hop = action_by_label(line, "hop")
    fwd = action_by_label(line, "fwd")
    explanation = session.explain((hop, fwd))
    assert isinstance(explanation, CostAbstractionExplanation)
    assert explanation.plan_cost == 3.0
    assert explanation.foil_cost == 4.0
    assert explanation.total_abstract_cost > explanation.plan_cost
    assert [e["action"] for e in explanation.entries] == ["hop", "fwd", "achieve-goal"]
    assert [e["min_cost"] for e in explanation.entries] == [3.0, 1.0, 0.0]
    goal_entry = explanation.entries[-1]
    assert goal_entry["confidence"] == 0.5
    assert explanation.threshold_met  # min confidence 0.5 meets the 0.5 default
    # hop costs 3 everywhere it executes, so the first size-1 subset present
    # at the failing step (even, at state 0) already attains the bound
    assert render_text(explanation) == (
        "Executing the action hop in the presence of the concept even "
        "will cost at least 3."
    )


def test_explain_preferred_foil(line, line_vocab):
    session = _line_session(line, line_vocab)
    fwd = action_by_label(line, "fwd")
    explanation = session.explain((fwd, fwd, fwd))
    assert explanation == FoilPreferredExplanation(plan_cost=3.0, foil_cost=3.0)


def test_history_is_append_only_and_ordered(line, line_vocab):
    session = _line_session(line, line_vocab)
    back = action_by_label(line, "back")
    fwd = action_by_label(line, "fwd")
    hop = action_by_label(line, "hop")
    session.explain((back,))
    session.explain((hop, fwd))
    session.explain((fwd, fwd, fwd))
    kinds = [h.explanation.kind for h in session.history]
    assert kinds == ["missing-precondition", "cost-abstraction", "foil-preferred"]
    assert session.history[0].foil == ("back",)
    assert session.history[1].foil == ("hop", "fwd")
    for h in session.history:
        assert h.rendered_text == render_text(h.explanation)


def test_high_threshold_withholds(line, line_vocab):
    session = _line_session(
        line, line_vocab, config=DialogueConfig(budget=150, walk_length=6, threshold=0.99)
    )
    hop = action_by_label(line, "hop")
    fwd = action_by_label(line, "fwd")
    explanation = session.explain((hop, fwd))
    assert not explanation.threshold_met  # the goal step's flat 0.5 cannot reach 0.99
    assert session.history[0].rendered_text == (
        "The candidate explanation falls below the reporting confidence "
        "threshold and is withheld."
    )


def test_insufficiency_phase_precondition(line, line_vocab):
    stripped = line_vocab.restricted(["even", "at_zero", "not_even", "high"])
    session = _line_session(line, stripped)
    back = action_by_label(line, "back")
    explanation = session.explain((back,))
    assert explanation == VocabularyInsufficientExplanation(
        phase="precondition", samples_used=explanation.samples_used
    )
    assert 0 < explanation.samples_used <= 150
    assert explanation.threshold_met  # vacuously: nothing is being claimed


def test_session_obs_override_width_check(line, line_vocab):
    fwd = action_by_label(line, "fwd")
    with pytest.raises(ContractViolation):
        Session(line, line_vocab, (fwd,) * 3, obs_model=ObservationModel.exact(2))


def test_explanations_are_seed_stable(line, line_vocab):
    back = action_by_label(line, "back")
    runs = []
    for _ in range(2):
        session = _line_session(line, line_vocab, seed=9)
        runs.append(session.explain((back,)))
    assert runs[0] == runs[1]
    other = _line_session(line, line_vocab, seed=10).explain((back,))
    assert other.concept == runs[0].concept  # same answer from another stream
    assert other.trace != runs[0].trace


# --- serialization and replay ----------------------------------------------------------------


def _switch_session(seed=5, config=None, vocab=None, obs=None):
    env = load_map("sokoban_switch", "sokoban-switch-prec")
    vocab = vocab if vocab is not None else vocabulary_for(env)
    plan = load_actions(env, "sokoban_switch.plan")
    return Session(
        env,
        vocab,
        plan,
        seed=seed,
        config=config or DialogueConfig(budget=120, walk_length=8),
        map_id="sokoban_switch",
        variant="sokoban-switch-prec",
        session_id="t-1",
        obs_model=obs,
    )


def test_session_payload_shape():
    session = _switch_session()
    session.explain(["push-right", "push-right"])
    payload = session.to_payload()
    assert payload["v"] == 1
    assert payload["map_id"] == "sokoban_switch"
    assert payload["variant"] == "sokoban-switch-prec"
    assert payload["seed"] == 5
    assert payload["plan_cost"] == 18.0
    assert payload["obs"] is None
    assert len(payload["history"]) == 1
    entry = payload["history"][0]
    assert entry["foil"] == ["push-right", "push-right"]
    assert entry["explanation"]["kind"] == "missing-precondition"
    assert entry["explanation"]["concept"] == "switch_on"
    assert entry["rendered_text"].startswith("The action push-right failed")
    # serialization is canonical: repeated calls give identical bytes
    assert session.serialize() == session.serialize()


def test_replay_is_byte_identical():
    session = _switch_session()
    session.explain(["push-right", "push-right"])
    blob = session.serialize()
    replayed = replay_session(blob)
    assert replayed.serialize() == blob


def test_replay_with_restricted_vocabulary_and_noisy_override():
    env = load_map("sokoban_switch", "sokoban-switch-prec")
    full = vocabulary_for(env)
    keep = [n for n in full.names if n not in ("box_above", "not_box_above")]
    vocab = full.restricted(keep)
    obs = ObservationModel.uniform(len(vocab), 0.9, 0.1)
    session = _switch_session(vocab=vocab, obs=obs)
    session.explain(["push-right", "push-right"])
    blob = session.serialize()
    replayed = replay_session(blob)
    assert replayed.serialize() == blob
    assert json.loads(blob)["obs"]["tp"] == [0.9] * len(vocab)


def test_replay_rejects_bad_payloads():
    with pytest.raises(ContractViolation):
        replay_session({"v": 3})
    with pytest.raises(ContractViolation):
        replay_session({"v": 1, "map_id": None})

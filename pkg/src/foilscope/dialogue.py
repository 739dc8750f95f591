"""Explanation dialogue: classify a foil, learn the answer, render it.

A :class:`Session` holds one environment, one plan, and an append-only
history of explained foils. Each ``explain`` call classifies the foil
against the plan, dispatches to the precondition or cost learner, wraps the
result in an :class:`Explanation` variant, and renders the user-facing text.

Determinism: every explanation derives its sampling seeds from the session
seed and the foil's position in the history, so serializing a session and
replaying it from scratch reproduces the identical byte stream.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

from .concepts import (
    ConceptMarginals,
    ConceptVocabulary,
    ObservationModel,
    estimate_marginals,
)
from .costs import (
    CostExplanation,
    CostVocabularyInsufficient,
    find_cost_abstraction,
    find_cost_abstraction_probabilistic,
)
from .model import (
    ActionId,
    BlackBoxModel,
    ContractViolation,
    ContrastiveQuery,
    CostlierFoil,
    FoilPreferred,
    GoalCompiledModel,
    InvalidFoil,
    InvalidPlanError,
    classify_query,
    compile_goal_action,
    execute_sequence,
)
from .precondition import (
    FoundPrecondition,
    run_probabilistic_precondition_search,
    trace_for_concept,
)
from .sampler import SamplerConfig, anchors_from_trajectories, derive_seed, sample_states

__all__ = [
    "CostAbstractionExplanation",
    "DialogueConfig",
    "Explanation",
    "FoilPreferredExplanation",
    "MissingPreconditionExplanation",
    "Session",
    "VocabularyInsufficientExplanation",
    "explanation_from_payload",
    "render_text",
    "replay_session",
]

PAYLOAD_VERSION = 1

# Fixed advisory sentences (golden-file tested; change only with the goldens).
_FOIL_PREFERRED_TEXT = (
    "The proposed alternative is at least as good as the current plan; "
    "the agent can adopt it."
)
_INSUFFICIENT_TEXT = (
    "No explanation is expressible in the current concept vocabulary; "
    "extend the vocabulary and ask again."
)
_LOW_CONFIDENCE_TEXT = (
    "The candidate explanation falls below the reporting confidence "
    "threshold and is withheld."
)


@dataclass(frozen=True)
class DialogueConfig:
    """Knobs shared by every explanation in a session."""

    budget: int = 500
    walk_length: int = 10
    kappa: float = 0.01
    threshold: float = 0.5
    obs_tp: float = 1.0
    obs_fp: float = 0.0
    prior: float = 0.5

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ContractViolation("budget must be nonnegative")
        if not 0.0 <= self.threshold <= 1.0:
            raise ContractViolation("threshold must lie in [0, 1]")
        if not 0.0 < self.prior < 1.0:
            raise ContractViolation("prior must lie strictly inside (0, 1)")

    def observation_model(self, n: int) -> ObservationModel:
        if self.obs_tp == 1.0 and self.obs_fp == 0.0:
            return ObservationModel.exact(n)
        return ObservationModel.uniform(n, self.obs_tp, self.obs_fp)

    def to_payload(self) -> dict:
        return {
            "budget": self.budget,
            "walk_length": self.walk_length,
            "kappa": self.kappa,
            "threshold": self.threshold,
            "obs_tp": self.obs_tp,
            "obs_fp": self.obs_fp,
            "prior": self.prior,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "DialogueConfig":
        return cls(**{k: payload[k] for k in cls().to_payload() if k in payload})


@dataclass(frozen=True)
class MissingPreconditionExplanation:
    """The foil is invalid: ``concept`` was false where ``fail_action`` failed."""

    concept: str
    fail_action: str
    fail_index: int
    confidence: float
    samples_used: int
    threshold_met: bool
    trace: tuple = field(repr=False, default=())
    rivals: tuple = field(repr=False, default=())

    kind = "missing-precondition"

    def to_payload(self) -> dict:
        return {
            "v": PAYLOAD_VERSION,
            "kind": self.kind,
            "concept": self.concept,
            "fail_action": self.fail_action,
            "fail_index": self.fail_index,
            "confidence": self.confidence,
            "samples_used": self.samples_used,
            "threshold_met": self.threshold_met,
            "trace": list(self.trace),
            "rivals": [dict(r) for r in self.rivals],
        }


@dataclass(frozen=True)
class CostAbstractionExplanation:
    """The foil runs, but learned per-step lower bounds exceed the plan cost."""

    entries: tuple  # of dicts: step, action, concepts, min_cost, confidence
    total_abstract_cost: float
    plan_cost: float
    foil_cost: float
    threshold_met: bool

    kind = "cost-abstraction"

    def to_payload(self) -> dict:
        return {
            "v": PAYLOAD_VERSION,
            "kind": self.kind,
            "entries": [dict(e) for e in self.entries],
            "total_abstract_cost": self.total_abstract_cost,
            "plan_cost": self.plan_cost,
            "foil_cost": self.foil_cost,
            "threshold_met": self.threshold_met,
        }


@dataclass(frozen=True)
class FoilPreferredExplanation:
    """The foil reaches the goal at no extra cost; nothing to argue against."""

    plan_cost: float
    foil_cost: float
    threshold_met: bool = True

    kind = "foil-preferred"

    def to_payload(self) -> dict:
        return {
            "v": PAYLOAD_VERSION,
            "kind": self.kind,
            "plan_cost": self.plan_cost,
            "foil_cost": self.foil_cost,
            "threshold_met": self.threshold_met,
        }


@dataclass(frozen=True)
class VocabularyInsufficientExplanation:
    """The learner exhausted the vocabulary without an answer.

    ``phase`` says which question went unanswered: ``"precondition"`` when no
    concept separates the failure state from the executable region, ``"cost"``
    when no concept subsets push the foil's bound past the plan cost.
    """

    phase: str
    samples_used: int = 0
    threshold_met: bool = True  # vacuous: there is no confidence to fall short

    kind = "vocabulary-insufficient"

    def to_payload(self) -> dict:
        return {
            "v": PAYLOAD_VERSION,
            "kind": self.kind,
            "phase": self.phase,
            "samples_used": self.samples_used,
            "threshold_met": self.threshold_met,
        }


Explanation = Union[
    MissingPreconditionExplanation,
    CostAbstractionExplanation,
    FoilPreferredExplanation,
    VocabularyInsufficientExplanation,
]


def explanation_from_payload(payload: dict) -> Explanation:
    if payload.get("v") != PAYLOAD_VERSION:
        raise ContractViolation(f"unsupported explanation payload version {payload.get('v')!r}")
    kind = payload.get("kind")
    if kind == "missing-precondition":
        return MissingPreconditionExplanation(
            concept=payload["concept"],
            fail_action=payload["fail_action"],
            fail_index=payload["fail_index"],
            confidence=payload["confidence"],
            samples_used=payload["samples_used"],
            threshold_met=payload["threshold_met"],
            trace=tuple(payload.get("trace", ())),
            rivals=tuple(_FrozenDict(r) for r in payload.get("rivals", ())),
        )
    if kind == "cost-abstraction":
        return CostAbstractionExplanation(
            entries=tuple(_FrozenDict(e) for e in payload["entries"]),
            total_abstract_cost=payload["total_abstract_cost"],
            plan_cost=payload["plan_cost"],
            foil_cost=payload["foil_cost"],
            threshold_met=payload["threshold_met"],
        )
    if kind == "foil-preferred":
        return FoilPreferredExplanation(
            plan_cost=payload["plan_cost"],
            foil_cost=payload["foil_cost"],
            threshold_met=payload["threshold_met"],
        )
    if kind == "vocabulary-insufficient":
        return VocabularyInsufficientExplanation(
            phase=payload["phase"],
            samples_used=payload.get("samples_used", 0),
            threshold_met=payload["threshold_met"],
        )
    raise ContractViolation(f"unknown explanation kind {kind!r}")


class _FrozenDict(dict):
    """Hashable dict so explanation dataclasses stay usable as values."""

    def __hash__(self) -> int:  # pragma: no cover - convenience only
        return hash(tuple(sorted(self.items())))

    def _immutable(self, *a, **k):
        raise TypeError("explanation entries are immutable")

    __setitem__ = __delitem__ = _immutable
    pop = popitem = clear = update = setdefault = _immutable


def _fmt_cost(value: float) -> str:
    return f"{value:g}"


def _fmt_concepts(names: Sequence[str]) -> str:
    names = list(names)
    if len(names) == 1:
        return f"the concept {names[0]}"
    return "the concepts " + " and ".join(names)


def render_text(explanation: Explanation) -> str:
    """User-facing sentence(s) for an explanation.

    Below-threshold results render a withholding advisory instead of the
    unqualified claim; vocabulary insufficiency always renders its advisory.
    """
    if isinstance(explanation, VocabularyInsufficientExplanation):
        return _INSUFFICIENT_TEXT
    if not explanation.threshold_met:
        return _LOW_CONFIDENCE_TEXT
    if isinstance(explanation, MissingPreconditionExplanation):
        return (
            f"The action {explanation.fail_action} failed in the state as the "
            f"precondition {explanation.concept} was false in the state."
        )
    if isinstance(explanation, CostAbstractionExplanation):
        return " ".join(_cost_sentences(explanation))
    if isinstance(explanation, FoilPreferredExplanation):
        return _FOIL_PREFERRED_TEXT
    raise ContractViolation(f"cannot render {type(explanation).__name__}")


def _cost_sentences(explanation: CostAbstractionExplanation) -> list:
    """One sentence per distinct binding step: the entries with the largest
    lower bound, deduplicated by (action, concepts, bound)."""
    top = max(e["min_cost"] for e in explanation.entries)
    sentences = []
    seen = set()
    for e in explanation.entries:
        if e["min_cost"] != top:
            continue
        key = (e["action"], tuple(e["concepts"]), e["min_cost"])
        if key in seen:
            continue
        seen.add(key)
        if e["concepts"]:
            sentences.append(
                f"Executing the action {e['action']} in the presence of "
                f"{_fmt_concepts(e['concepts'])} will cost at least "
                f"{_fmt_cost(e['min_cost'])}."
            )
        else:
            sentences.append(
                f"Executing the action {e['action']} will cost at least "
                f"{_fmt_cost(e['min_cost'])}."
            )
    return sentences


@dataclass(frozen=True)
class HistoryEntry:
    foil: tuple  # action labels
    explanation: Explanation
    rendered_text: str


class Session:
    """One plan, one vocabulary, many foils — with deterministic replay.

    The session validates the plan once (a plan that does not reach the goal
    is a caller error, not a query kind) and then answers ``explain`` calls.
    Seeds: foil number ``i`` uses ``derive_seed(seed, i)``, split again into
    a marginal-estimation stream and a search stream, so histories replay
    byte-identically from (map, plan, seed, config).
    """

    def __init__(
        self,
        env: BlackBoxModel,
        vocab: ConceptVocabulary,
        plan: Sequence,
        *,
        seed: int = 0,
        config: DialogueConfig | None = None,
        map_id: str | None = None,
        variant: str | None = None,
        session_id: str | None = None,
        obs_model: ObservationModel | None = None,
    ):
        self.env = env
        self.vocab = vocab
        self.plan = tuple(self._resolve(a) for a in plan)
        self.seed = int(seed)
        self.config = config or DialogueConfig()
        self.map_id = map_id
        self.variant = variant
        self.session_id = session_id
        if obs_model is not None and len(obs_model) != len(vocab):
            raise ContractViolation("observation model width must match the vocabulary")
        self._obs_override = obs_model
        self._history: list = []

        wrapped = GoalCompiledModel(env, env.goal)
        traj = execute_sequence(wrapped, env.initial_state(), self.plan + (wrapped.goal_action,))
        if not traj.succeeded:
            step = traj.terminated_at
            label = "achieve-goal" if step == len(self.plan) else self.plan[step].label
            raise InvalidPlanError(f"plan does not reach the goal: step {step} ({label}) failed")
        self.plan_trajectory = traj
        self.plan_cost = traj.total_cost

    # -- plumbing ----------------------------------------------------------

    def _resolve(self, action) -> ActionId:
        if isinstance(action, ActionId):
            return action
        return self.env.action(action)

    @property
    def history(self) -> tuple:
        return tuple(self._history)

    def _sampler_config(self, anchors: tuple, seed: int) -> SamplerConfig:
        return SamplerConfig(
            anchors=anchors,
            walk_length=self.config.walk_length,
            budget=self.config.budget,
            seed=seed,
        )

    def _marginals(self, wrapped, anchors: tuple, seed: int) -> ConceptMarginals:
        cfg = self._sampler_config(anchors, seed)
        return estimate_marginals(self.vocab, sample_states(wrapped, cfg))

    # -- the dialogue ------------------------------------------------------

    def explain(self, foil: Sequence) -> Explanation:
        """Classify ``foil`` against the plan and learn the answer."""
        foil_actions = tuple(self._resolve(a) for a in foil)
        query = ContrastiveQuery(
            initial=self.env.initial_state(),
            plan=self.plan,
            foil=foil_actions,
            goal=self.env.goal,
        )
        wrapped, compiled = compile_goal_action(self.env, query)
        outcome = classify_query(self.env, query)

        foil_seed = derive_seed(self.seed, len(self._history))
        marginal_seed = derive_seed(foil_seed, 0)
        search_seed = derive_seed(foil_seed, 1)
        obs = (
            self._obs_override
            if self._obs_override is not None
            else self.config.observation_model(len(self.vocab))
        )

        if isinstance(outcome, InvalidFoil):
            explanation = self._explain_precondition(
                wrapped, outcome, obs, marginal_seed, search_seed
            )
        elif isinstance(outcome, CostlierFoil):
            explanation = self._explain_cost(
                wrapped, compiled, outcome, obs, marginal_seed, search_seed
            )
        elif isinstance(outcome, FoilPreferred):
            explanation = FoilPreferredExplanation(
                plan_cost=outcome.plan_cost, foil_cost=outcome.foil_cost
            )
        else:  # pragma: no cover - classify_query is exhaustive
            raise ContractViolation(f"unknown query kind {type(outcome).__name__}")

        entry = HistoryEntry(
            foil=tuple(a.label for a in foil_actions),
            explanation=explanation,
            rendered_text=render_text(explanation),
        )
        self._history.append(entry)
        return explanation

    def _explain_precondition(
        self, wrapped, outcome: InvalidFoil, obs, marginal_seed: int, search_seed: int
    ) -> Explanation:
        anchors = anchors_from_trajectories(
            wrapped, outcome.plan_trajectory, outcome.foil_trajectory
        )
        cfg = self._sampler_config(anchors, search_seed)
        marginals = self._marginals(wrapped, anchors, marginal_seed)
        run = run_probabilistic_precondition_search(
            outcome.fail_state,
            outcome.fail_action,
            cfg,
            self.vocab,
            obs,
            marginals,
            wrapped,
            priors=self.config.prior,
            kappa=self.config.kappa,
        )
        if isinstance(run.result, FoundPrecondition):
            found = run.result
            rivals = tuple(
                _FrozenDict(
                    {
                        "concept": self.vocab.names[h],
                        "posterior": float(run.trace[-1, j]),
                        "eliminated_at": run.death_step.get(h),
                    }
                )
                for j, h in enumerate(run.hypotheses)
            )
            return MissingPreconditionExplanation(
                concept=found.concept.name,
                fail_action=outcome.fail_action.label,
                fail_index=outcome.fail_index,
                confidence=float(found.posterior),
                samples_used=found.samples_used,
                threshold_met=found.posterior >= self.config.threshold,
                trace=tuple(float(x) for x in trace_for_concept(run, found.concept.index)),
                rivals=rivals,
            )
        return VocabularyInsufficientExplanation(
            phase="precondition", samples_used=run.result.samples_used
        )

    def _explain_cost(
        self, wrapped, compiled, outcome: CostlierFoil, obs, marginal_seed: int, search_seed: int
    ) -> Explanation:
        anchors = anchors_from_trajectories(
            wrapped, outcome.plan_trajectory, outcome.foil_trajectory
        )
        cfg = self._sampler_config(anchors, search_seed)
        if obs.is_exact:
            result = find_cost_abstraction(
                outcome,
                outcome.foil_trajectory,
                cfg,
                self.vocab,
                wrapped,
                foil_actions=compiled.foil,
                prior=self.config.prior,
            )
        else:
            marginals = self._marginals(wrapped, anchors, marginal_seed)
            result = find_cost_abstraction_probabilistic(
                outcome,
                outcome.foil_trajectory,
                cfg,
                self.vocab,
                obs,
                marginals,
                wrapped,
                foil_actions=compiled.foil,
                prior=self.config.prior,
            )
        if isinstance(result, CostExplanation):
            entries = tuple(
                _FrozenDict(
                    {
                        "step": e.step_index,
                        "action": e.action.label,
                        "concepts": [c.name for c in e.subset],
                        "min_cost": float(e.min_cost),
                        "confidence": float(e.confidence),
                    }
                )
                for e in result.entries
            )
            min_conf = min(e["confidence"] for e in entries)
            return CostAbstractionExplanation(
                entries=entries,
                total_abstract_cost=float(result.total_abstract_cost),
                plan_cost=float(outcome.plan_cost),
                foil_cost=float(outcome.foil_cost),
                threshold_met=min_conf >= self.config.threshold,
            )
        assert isinstance(result, CostVocabularyInsufficient)
        return VocabularyInsufficientExplanation(phase="cost")

    # -- serialization -----------------------------------------------------

    def to_payload(self) -> dict:
        obs = None
        if self._obs_override is not None:
            obs = {
                "tp": [float(x) for x in self._obs_override.p_true_pos],
                "fp": [float(x) for x in self._obs_override.p_false_pos],
            }
        return {
            "v": PAYLOAD_VERSION,
            "session_id": self.session_id,
            "map_id": self.map_id,
            "variant": self.variant,
            "seed": self.seed,
            "config": self.config.to_payload(),
            "vocabulary": list(self.vocab.names),
            "obs": obs,
            "plan": [a.label for a in self.plan],
            "plan_cost": self.plan_cost,
            "history": [
                {
                    "foil": list(h.foil),
                    "explanation": h.explanation.to_payload(),
                    "rendered_text": h.rendered_text,
                }
                for h in self._history
            ],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, separators=(",", ":"))


def replay_session(payload: Union[str, dict], env: BlackBoxModel | None = None) -> Session:
    """Rebuild a session from its serialized form by re-running every foil.

    The environment is reloaded from the recorded map id (bundled maps) unless
    one is passed in. Because all sampling seeds derive from the session seed
    and history position, the replayed session serializes byte-identically.
    """
    if isinstance(payload, str):
        payload = json.loads(payload)
    if payload.get("v") != PAYLOAD_VERSION:
        raise ContractViolation(f"unsupported session payload version {payload.get('v')!r}")
    from .environments import load_map, vocabulary_for

    if env is None:
        if not payload.get("map_id"):
            raise ContractViolation("session payload has no map_id; pass an environment")
        env = load_map(payload["map_id"], payload.get("variant"))
    vocab = vocabulary_for(env)
    recorded = payload.get("vocabulary")
    if recorded and tuple(recorded) != vocab.names:
        vocab = vocab.restricted(recorded)
        if vocab.names != tuple(recorded):
            raise ContractViolation("session vocabulary names are not a subset of the map's")
    obs_override = None
    if payload.get("obs"):
        import numpy as _np

        obs_override = ObservationModel(
            _np.asarray(payload["obs"]["tp"], dtype=float),
            _np.asarray(payload["obs"]["fp"], dtype=float),
        )
    session = Session(
        env,
        vocab,
        payload["plan"],
        seed=payload["seed"],
        config=DialogueConfig.from_payload(payload["config"]),
        map_id=payload.get("map_id"),
        variant=payload.get("variant"),
        session_id=payload.get("session_id"),
        obs_model=obs_override,
    )
    for item in payload.get("history", ()):
        session.explain(item["foil"])
    return session

"""Shared plumbing for bundled environments: action registry, vocabulary binding."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..concepts import (
    ConceptVocabulary,
    ObservationModel,
    VocabularySpec,
    extend_with_negations,
    make_compound_clause,
    observation_model_from_spec,
)
from ..model import ActionId, ContractViolation, StateHandle, TransitionOutcome


@dataclass(frozen=True)
class CostRule:
    """Ground truth: executing ``action_label`` with ``concepts`` all true costs ≥ min_cost."""

    action_label: str
    concepts: frozenset
    min_cost: float


@dataclass(frozen=True)
class GroundTruth:
    """Analytically known preconditions (concept names per action) and cost rules."""

    preconditions: dict
    cost_rules: tuple

    def precondition_names(self, action_label: str) -> frozenset:
        return self.preconditions.get(action_label, frozenset())

    def cost_rule_names(self, action_label: str) -> frozenset:
        names: set = set()
        for rule in self.cost_rules:
            if rule.action_label == action_label:
                names |= rule.concepts
        return frozenset(names)


class EnvironmentBase:
    """Action bookkeeping plus detector-registry vocabulary construction."""

    action_labels: tuple = ()

    def __init__(self) -> None:
        self._actions = tuple(ActionId(label, i) for i, label in enumerate(self.action_labels))
        self._action_by_label = {a.label: a for a in self._actions}

    def actions(self) -> Sequence[ActionId]:
        return self._actions

    def action(self, label: str) -> ActionId:
        try:
            return self._action_by_label[label]
        except KeyError:
            raise ContractViolation(f"unknown action mnemonic {label!r}") from None

    def parse_actions(self, mnemonics: Sequence[str]) -> tuple:
        return tuple(self.action(m) for m in mnemonics)

    # --- vocabulary -------------------------------------------------------

    def detector_registry(self) -> dict:
        """Base-concept name → detector over this environment's states."""
        raise NotImplementedError

    def base_concept_names(self) -> tuple:
        """Authored base vocabulary order for this environment."""
        raise NotImplementedError

    def build_vocabulary(self, names: Sequence[str] = None, extend: bool = True) -> ConceptVocabulary:
        registry = self.detector_registry()
        chosen = tuple(names) if names is not None else self.base_concept_names()
        detectors = []
        for name in chosen:
            if name not in registry:
                raise ContractViolation(f"no detector registered for concept {name!r}")
            detectors.append(registry[name])
        vocab = ConceptVocabulary(chosen, detectors)
        return extend_with_negations(vocab) if extend else vocab

    def bind_vocabulary_spec(self, spec: VocabularySpec) -> tuple:
        """Materialize a manifest against this environment: (vocab, obs_model).

        Base entries resolve through the detector registry; negations and
        compounds derive from earlier entries, so manifests are self-contained
        given the environment.
        """
        registry = self.detector_registry()
        vocab = ConceptVocabulary((), ())
        for entry in spec.entries:
            kind = entry.provenance.kind
            if kind == "base":
                if entry.name not in registry:
                    raise ContractViolation(f"no detector registered for concept {entry.name!r}")
                vocab = ConceptVocabulary(
                    vocab.names + (entry.name,),
                    vocab._detectors + (registry[entry.name],),
                    vocab.provenance + (entry.provenance,),
                )
            elif kind == "negation":
                base_det = vocab.detector(vocab.index_of(entry.provenance.of))
                vocab = ConceptVocabulary(
                    vocab.names + (entry.name,),
                    vocab._detectors + (_negated(base_det),),
                    vocab.provenance + (entry.provenance,),
                )
            else:
                grown, _cid = make_compound_clause(vocab, entry.provenance.clause)
                if grown.names[-1] != entry.name:
                    raise ContractViolation(
                        f"compound entry {entry.name!r} does not match its clause name {grown.names[-1]!r}"
                    )
                vocab = grown
        return vocab, observation_model_from_spec(spec)

    # --- interface stubs ----------------------------------------------------

    def simulate(self, state: StateHandle, action: ActionId) -> TransitionOutcome:
        raise NotImplementedError

    def initial_state(self) -> StateHandle:
        raise NotImplementedError

    def goal(self, state: StateHandle) -> bool:
        raise NotImplementedError

    def ground_truth(self) -> GroundTruth:
        raise NotImplementedError

    def describe_state(self, state: StateHandle) -> dict:
        raise NotImplementedError


def _negated(det: Callable[[StateHandle], bool]) -> Callable[[StateHandle], bool]:
    def negation(state: StateHandle) -> bool:
        return not det(state)

    return negation

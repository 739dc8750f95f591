"""Missing-precondition search: why did the foil's failing action fail?

Hypotheses are the concepts absent in the failing state. Sampled executable
states of the failing action then eliminate (exact mode) or Bayesian-downdate
(probabilistic mode) hypotheses the evidence contradicts, leaving concepts the
action plausibly requires.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .concepts import (
    ConceptId,
    ConceptMarginals,
    ConceptVocabulary,
    ObservationModel,
    evaluate_concepts,
    observe_concepts,
)
from .confidence import (
    posterior_precondition_negative_noiseless,
    posterior_precondition_noisy,
    posterior_precondition_positive,
)
from .model import ActionId, BlackBoxModel, ContractViolation, StateHandle, simulate
from .sampler import SamplerConfig, observation_rng, sample_states


@dataclass(frozen=True)
class FoundPrecondition:
    concept: ConceptId
    posterior: float
    samples_used: int


@dataclass(frozen=True)
class PreconditionVocabularyInsufficient:
    """No hypothesis survived: the vocabulary cannot express the precondition."""

    samples_used: int


PreconditionResult = Union[FoundPrecondition, PreconditionVocabularyInsufficient]


@dataclass(frozen=True)
class ExactSearchRun:
    result: PreconditionResult
    survivors: frozenset  # concept indices still alive at the end
    hypotheses: tuple     # initial hypothesis indices, ascending
    samples_used: int
    executable_count: int


@dataclass(frozen=True)
class ProbabilisticSearchRun:
    result: PreconditionResult
    hypotheses: tuple          # initial hypothesis indices, ascending
    priors: np.ndarray         # aligned with hypotheses
    trace: np.ndarray          # (samples_used + 1, len(hypotheses)) posteriors
    alive: np.ndarray          # final aliveness flags, aligned with hypotheses
    death_step: dict           # concept index -> 1-based sample ordinal of death
    samples_used: int
    executable_count: int


def _check_failing(model: BlackBoxModel, fail_state: StateHandle, fail_action: ActionId) -> None:
    if not simulate(model, fail_state, fail_action).failed:
        raise ContractViolation(
            f"action {fail_action.label!r} executes in the given state; nothing to explain"
        )


def _initial_hypotheses(vocab: ConceptVocabulary, fail_state: StateHandle) -> tuple:
    present = evaluate_concepts(vocab, fail_state).true_set()
    return tuple(i for i in range(len(vocab)) if i not in present)


def run_exact_precondition_search(
    fail_state: StateHandle,
    fail_action: ActionId,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    model: BlackBoxModel,
) -> ExactSearchRun:
    """Set-intersection elimination over executable samples (exact detectors).

    Every executable sample intersects the survivor set with its true concept
    set; an empty survivor set at any point is conclusive insufficiency. The
    sample counter counts all sampled states, executable or not.
    """
    _check_failing(model, fail_state, fail_action)
    hypotheses = _initial_hypotheses(vocab, fail_state)
    alive = set(hypotheses)
    samples = 0
    executable = 0
    if not alive:
        return ExactSearchRun(
            result=PreconditionVocabularyInsufficient(samples_used=0),
            survivors=frozenset(), hypotheses=hypotheses, samples_used=0, executable_count=0,
        )
    for state in sample_states(model, sampler_config):
        samples += 1
        out = simulate(model, state, fail_action)
        if out.failed:
            continue
        executable += 1
        alive &= evaluate_concepts(vocab, state).true_set()
        if not alive:
            return ExactSearchRun(
                result=PreconditionVocabularyInsufficient(samples_used=samples),
                survivors=frozenset(), hypotheses=hypotheses,
                samples_used=samples, executable_count=executable,
            )
    winner = min(alive)
    return ExactSearchRun(
        result=FoundPrecondition(concept=vocab.concept(winner), posterior=1.0, samples_used=samples),
        survivors=frozenset(alive), hypotheses=hypotheses,
        samples_used=samples, executable_count=executable,
    )


def find_missing_precondition(
    fail_state: StateHandle,
    fail_action: ActionId,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    model: BlackBoxModel,
) -> PreconditionResult:
    return run_exact_precondition_search(fail_state, fail_action, sampler_config, vocab, model).result


def _as_prior_array(priors, hypotheses: tuple) -> np.ndarray:
    if priors is None:
        return np.full(len(hypotheses), 0.5)
    if isinstance(priors, (int, float)):
        return np.full(len(hypotheses), float(priors))
    if isinstance(priors, dict):
        return np.array([float(priors.get(h, 0.5)) for h in hypotheses])
    arr = np.asarray(priors, dtype=float)
    if arr.shape != (len(hypotheses),):
        raise ContractViolation("prior array must align with the hypothesis list")
    return arr


def run_probabilistic_precondition_search(
    fail_state: StateHandle,
    fail_action: ActionId,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    obs_model: ObservationModel,
    marginals: ConceptMarginals,
    model: BlackBoxModel,
    priors=None,
    kappa: float = 0.01,
) -> ProbabilisticSearchRun:
    """Bayesian hypothesis scoring under noisy detectors.

    Each executable sample is observed once through the detector channel and
    every live hypothesis gets the matching positive/negative update against
    its concept marginal. A hypothesis dies when its posterior drops below
    ``kappa`` — or hits exactly zero, so κ = 0 with exact detectors reproduces
    exact-mode elimination on the same walk stream. The trace keeps one row
    per raw sample (non-executable samples repeat the previous row).
    """
    _check_failing(model, fail_state, fail_action)
    if not (0.0 <= kappa <= 1.0):
        raise ContractViolation("kappa must lie in [0, 1]")
    hypotheses = _initial_hypotheses(vocab, fail_state)
    n_h = len(hypotheses)
    prior_arr = _as_prior_array(priors, hypotheses)
    rows = [prior_arr.copy()]
    exact = obs_model.is_exact
    if n_h == 0:
        trace = np.array(rows)
        return ProbabilisticSearchRun(
            result=PreconditionVocabularyInsufficient(samples_used=0),
            hypotheses=hypotheses, priors=prior_arr, trace=trace,
            alive=np.zeros(0, dtype=bool), death_step={}, samples_used=0, executable_count=0,
        )
    posterior = prior_arr.copy()
    alive = np.ones(n_h, dtype=bool)
    death_step: dict = {}
    obs_rng = observation_rng(sampler_config.seed)
    samples = 0
    executable = 0
    for state in sample_states(model, sampler_config):
        samples += 1
        out = simulate(model, state, fail_action)
        if not out.failed:
            executable += 1
            observed = observe_concepts(vocab, obs_model, state, obs_rng)
            for j, h in enumerate(hypotheses):
                if not alive[j]:
                    continue
                seen = observed.contains(h)
                if exact:
                    if seen:
                        posterior[j] = posterior_precondition_positive(
                            posterior[j], marginals[h]
                        )
                    else:
                        posterior[j] = posterior_precondition_negative_noiseless(posterior[j])
                else:
                    posterior[j] = posterior_precondition_noisy(
                        posterior[j],
                        seen,
                        (float(obs_model.p_true_pos[h]), float(obs_model.p_false_pos[h])),
                        marginals[h],
                    )
                if posterior[j] < kappa or posterior[j] == 0.0:
                    alive[j] = False
                    death_step[h] = samples
        rows.append(posterior.copy())
    trace = np.array(rows)
    if not alive.any():
        result: PreconditionResult = PreconditionVocabularyInsufficient(samples_used=samples)
    else:
        live_post = np.where(alive, posterior, -1.0)
        best = float(live_post.max())
        winner_j = int(np.argmax(live_post == best))  # first index at the max → lowest concept index
        winner = hypotheses[winner_j]
        result = FoundPrecondition(
            concept=vocab.concept(winner), posterior=float(posterior[winner_j]), samples_used=samples
        )
    return ProbabilisticSearchRun(
        result=result, hypotheses=hypotheses, priors=prior_arr, trace=trace,
        alive=alive, death_step=death_step, samples_used=samples, executable_count=executable,
    )


def find_missing_precondition_probabilistic(
    fail_state: StateHandle,
    fail_action: ActionId,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    obs_model: ObservationModel,
    priors,
    kappa: float,
    marginals: ConceptMarginals,
    model: BlackBoxModel,
) -> PreconditionResult:
    return run_probabilistic_precondition_search(
        fail_state, fail_action, sampler_config, vocab, obs_model, marginals, model,
        priors=priors, kappa=kappa,
    ).result


def posterior_trace(run: ProbabilisticSearchRun) -> np.ndarray:
    """Posterior series per hypothesis: row 0 is the prior, one row per sample."""
    return run.trace


def trace_for_concept(run: ProbabilisticSearchRun, concept_index: int) -> np.ndarray:
    """Single hypothesis' posterior series out of a run's trace."""
    for j, h in enumerate(run.hypotheses):
        if h == concept_index:
            return run.trace[:, j]
    raise ContractViolation(f"concept index {concept_index} was not a hypothesis")

"""Abstract-cost explanation search: why is the valid foil more expensive?

For each foil step, find the concept subset (bounded by conc_limit) whose
sampled abstract cost — the minimum step cost over executable samples
containing the subset — is largest. The per-step minima are summed; once the
sum exceeds the plan cost the foil is provably costlier under the learned
fragment. conc_limit sweeps 1..|ℂ| before conceding vocabulary insufficiency.
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .concepts import (
    ConceptMarginals,
    ConceptVector,
    ConceptVocabulary,
    ObservationModel,
    evaluate_concepts,
    observe_concepts,
)
from .confidence import posterior_cost, posterior_cost_noisy, subset_observation_params
from .model import (
    ActionId,
    BlackBoxModel,
    ContractViolation,
    CostlierFoil,
    Trajectory,
    simulate,
)
from .sampler import SamplerConfig, derive_seed, observation_rng, sample_states

from dataclasses import dataclass


@dataclass(frozen=True)
class CostAbstractionEntry:
    """One foil step's learned lower bound: subset ⇒ step costs at least min_cost."""

    step_index: int
    action: ActionId
    subset: tuple  # ConceptId tuple, ascending index order; empty = unconditioned
    min_cost: float
    confidence: float


@dataclass(frozen=True)
class CostExplanation:
    entries: tuple
    total_abstract_cost: float
    plan_cost: float


@dataclass(frozen=True)
class CostVocabularyInsufficient:
    """Even unlimited subsets cannot push the foil's bound past the plan cost."""

    conc_limit_reached: int


CostSearchResult = Union[CostExplanation, CostVocabularyInsufficient]


class _Batch:
    """Executable samples of one action under one (action, conc_limit) seed.

    Stores, per executable sample in stream order: the true concept bitmask,
    the observed (noisy) bitmask, and the step cost. Subset minima are answered
    with vectorized mask tests and memoized per subset.
    """

    def __init__(
        self,
        model: BlackBoxModel,
        action: ActionId,
        config: SamplerConfig,
        vocab: ConceptVocabulary,
        obs_model: ObservationModel,
    ):
        obs_rng = observation_rng(config.seed)
        true_masks = []
        obs_masks = []
        costs = []
        raw = 0
        for state in sample_states(model, config):
            raw += 1
            out = simulate(model, state, action)
            if out.failed:
                continue
            true_masks.append(evaluate_concepts(vocab, state).mask)
            if obs_model.is_exact:
                obs_masks.append(true_masks[-1])
            else:
                obs_masks.append(observe_concepts(vocab, obs_model, state, obs_rng).mask)
            costs.append(out.cost)
        self.sample_count = raw
        self.true_masks = np.array(true_masks, dtype=np.int64)
        self.obs_masks = np.array(obs_masks, dtype=np.int64)
        self.costs = np.array(costs, dtype=float)
        self._min_cache: dict = {}

    @property
    def executable_count(self) -> int:
        return int(self.costs.shape[0])

    def min_cost_and_support(self, subset_mask: int) -> tuple:
        """(min cost, support count) over samples truly containing the subset."""
        hit = self._min_cache.get(subset_mask)
        if hit is not None:
            return hit
        if self.executable_count == 0:
            result = (None, 0)
        else:
            rows = (self.true_masks & subset_mask) == subset_mask
            n = int(rows.sum())
            result = (float(self.costs[rows].min()), n) if n else (None, 0)
        self._min_cache[subset_mask] = result
        return result

    def tail_probability(self, threshold: float) -> float:
        """P(cost ≥ threshold | action executable), over the whole batch."""
        if self.executable_count == 0:
            return 0.0
        return float((self.costs >= threshold).mean())

    def conforming_update_count(self, subset_mask: int, threshold: float) -> int:
        """Samples whose *observed* mask contains the subset and cost ≥ threshold."""
        if self.executable_count == 0:
            return 0
        rows = ((self.obs_masks & subset_mask) == subset_mask) & (self.costs >= threshold)
        return int(rows.sum())


class CostBatchCache:
    """Shared per-(action, conc_limit) batches; disable to force rebuilding."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self._store: dict = {}
        self.builds = 0

    def batch(
        self,
        model: BlackBoxModel,
        action: ActionId,
        conc_limit: int,
        config: SamplerConfig,
        vocab: ConceptVocabulary,
        obs_model: ObservationModel,
    ) -> _Batch:
        key = (action.index, conc_limit)
        if self.enabled and key in self._store:
            return self._store[key]
        seeded = config.with_seed(derive_seed(config.seed, action.index, conc_limit))
        built = _Batch(model, action, seeded, vocab, obs_model)
        self.builds += 1
        if self.enabled:
            self._store[key] = built
        return built


def abstract_cost_estimate(subset, action: ActionId, samples: Sequence, vocab: ConceptVocabulary) -> tuple:
    """Sampled abstract cost of ``subset`` for ``action``: (min_cost, support_count).

    ``samples`` holds (state, outcome) pairs from executable sampling. With no
    supporting sample the estimate is (None, 0) — no claim, never a default.
    """
    indices = tuple(c.index if hasattr(c, "index") else int(c) for c in subset)
    best = None
    support = 0
    for state, out in samples:
        vec = evaluate_concepts(vocab, state)
        if vec.superset_of(indices):
            support += 1
            if best is None or out.cost < best:
                best = float(out.cost)
    return best, support


def _subset_confidence(
    batch: _Batch,
    subset_indices: tuple,
    threshold: float,
    obs_model: ObservationModel,
    marginals: ConceptMarginals,
    prior: float,
) -> float:
    """Sequential posterior that the action truly costs ≥ threshold under the subset."""
    p_geq = batch.tail_probability(threshold)
    subset_mask = 0
    for i in subset_indices:
        subset_mask |= 1 << i
    updates = batch.conforming_update_count(subset_mask, threshold)
    post = prior
    if obs_model.is_exact or not subset_indices:
        for _ in range(updates):
            post = posterior_cost(post, p_geq)
    else:
        p_s, tp_s, fp_s = subset_observation_params(subset_indices, obs_model, marginals)
        for _ in range(updates):
            post = posterior_cost_noisy(post, (tp_s, fp_s), p_s, p_geq)
    return post


def find_min_conc_set(
    concepts_at_step,
    action: ActionId,
    conc_limit: int,
    sampler_config: SamplerConfig,
    model: BlackBoxModel,
    *,
    vocab: ConceptVocabulary,
    obs_model: ObservationModel = None,
    marginals: ConceptMarginals = None,
    prior: float = 0.5,
    cache: CostBatchCache = None,
) -> tuple:
    """Best-supported subset of the step's concepts: (subset, min_cost, confidence).

    Enumerates subsets of the concepts present at the step by size then
    lexicographic index order, sizes 1..conc_limit, keeping the first subset
    that maximizes (sampled min cost, confidence). Steps with no supported
    nonempty subset fall back to the empty subset and the action's
    unconditioned sampled minimum.
    """
    if conc_limit < 1:
        raise ContractViolation("conc_limit must be at least 1")
    if obs_model is None:
        obs_model = ObservationModel.exact(len(vocab))
    if cache is None:
        cache = CostBatchCache(enabled=False)
    if isinstance(concepts_at_step, ConceptVector):
        present = concepts_at_step.true_indices()
    else:
        present = tuple(sorted(c.index if hasattr(c, "index") else int(c) for c in concepts_at_step))
    batch = cache.batch(model, action, conc_limit, sampler_config, vocab, obs_model)
    best = None  # (min_cost, confidence, subset_indices)
    limit = min(conc_limit, len(present))
    for size in range(1, limit + 1):
        for combo in combinations(present, size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            min_cost, support = batch.min_cost_and_support(mask)
            if support == 0:
                continue
            conf = _subset_confidence(batch, combo, min_cost, obs_model, marginals, prior)
            if best is None or (min_cost, conf) > (best[0], best[1]):
                best = (min_cost, conf, combo)
    if best is None:
        if batch.executable_count == 0:
            return (), 0.0, 0.0
        min_cost = float(batch.costs.min())
        conf = _subset_confidence(batch, (), min_cost, obs_model, marginals, prior)
        return (), min_cost, conf
    min_cost, conf, combo = best
    return tuple(vocab.concept(i) for i in combo), min_cost, conf


def _run_cost_search(
    query_kind: CostlierFoil,
    foil_trajectory: Trajectory,
    foil_actions: Sequence[ActionId],
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    model: BlackBoxModel,
    obs_model: ObservationModel,
    marginals: ConceptMarginals,
    prior: float,
    memoize: bool,
) -> CostSearchResult:
    if not isinstance(query_kind, CostlierFoil):
        raise ContractViolation("cost search applies to costlier-foil queries only")
    if len(foil_trajectory.states) != len(foil_actions) + 1:
        raise ContractViolation("foil trajectory and actions must align")
    plan_cost = query_kind.plan_cost
    cache = CostBatchCache(enabled=memoize)
    for conc_limit in range(1, len(vocab) + 1):
        entries = []
        for i, action in enumerate(foil_actions):
            pre_state = foil_trajectory.states[i]
            present = evaluate_concepts(vocab, pre_state)
            subset, min_cost, conf = find_min_conc_set(
                present, action, conc_limit, sampler_config, model,
                vocab=vocab, obs_model=obs_model, marginals=marginals,
                prior=prior, cache=cache,
            )
            entries.append(CostAbstractionEntry(
                step_index=i, action=action, subset=subset,
                min_cost=min_cost, confidence=conf,
            ))
        total = float(sum(e.min_cost for e in entries))
        if total > plan_cost:
            return CostExplanation(entries=tuple(entries), total_abstract_cost=total, plan_cost=plan_cost)
    return CostVocabularyInsufficient(conc_limit_reached=len(vocab))


def find_cost_abstraction(
    query_kind: CostlierFoil,
    foil_trajectory: Trajectory,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    model: BlackBoxModel,
    *,
    foil_actions: Sequence[ActionId],
    prior: float = 0.5,
    memoize: bool = True,
) -> CostSearchResult:
    """Exact-detector cost search; confidences use the noiseless closed form."""
    return _run_cost_search(
        query_kind, foil_trajectory, foil_actions, sampler_config, vocab, model,
        obs_model=ObservationModel.exact(len(vocab)), marginals=None,
        prior=prior, memoize=memoize,
    )


def find_cost_abstraction_probabilistic(
    query_kind: CostlierFoil,
    foil_trajectory: Trajectory,
    sampler_config: SamplerConfig,
    vocab: ConceptVocabulary,
    obs_model: ObservationModel,
    marginals: ConceptMarginals,
    model: BlackBoxModel,
    *,
    foil_actions: Sequence[ActionId],
    prior: float = 0.5,
    memoize: bool = True,
) -> CostSearchResult:
    """Noisy-detector cost search: supports from true labels, confidence through
    the observation channel (see the confidence module's noisy cost form)."""
    return _run_cost_search(
        query_kind, foil_trajectory, foil_actions, sampler_config, vocab, model,
        obs_model=obs_model, marginals=marginals, prior=prior, memoize=memoize,
    )

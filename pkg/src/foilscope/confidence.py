"""Bayesian confidence bookkeeping for learned model fragments.

Closed-form single-observation posterior updates for the two hypothesis
families (missing precondition, abstract cost at least k), their noisy-
detector generalizations, and a vectorized Monte Carlo estimator used as an
independent check of every closed form.

Sequential use: each sample's posterior becomes the next sample's prior.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .concepts import ConceptMarginals, ObservationModel
from .model import ContractViolation


def _check_unit(name: str, value: float) -> float:
    v = float(value)
    if not (0.0 <= v <= 1.0):
        raise ContractViolation(f"{name} must lie in [0, 1], got {v}")
    return v


def posterior_precondition_positive(prior: float, concept_marginal: float) -> float:
    """Update for hypothesis "c is a precondition" on seeing c in an executable state.

    The observation is certain under the hypothesis and has probability p_c
    otherwise, so rare concepts gain more per sighting. p_c = 1 leaves the
    prior untouched; p_c = 0 is conclusive.
    """
    prior = _check_unit("prior", prior)
    p_c = _check_unit("concept_marginal", concept_marginal)
    denom = prior + p_c * (1.0 - prior)
    if denom == 0.0:
        return prior
    return prior / denom

def posterior_precondition_negative_noiseless(prior: float) -> float:
    """An executable state without c refutes "c is a precondition" outright."""
    _check_unit("prior", prior)
    return 0.0


def posterior_precondition_noisy(
    prior: float,
    observed_present: bool,
    rates: tuple,
    concept_marginal: float,
) -> float:
    """Noisy-detector precondition update for one executable-state observation.

    ``rates`` is the detector's (true-positive, false-positive) pair. Under the
    hypothesis the concept is truly present, so the flag fires with the
    true-positive rate; otherwise presence follows the marginal and the flag
    mixes both rates. Degenerate observation channels fall back to the prior.
    """
    prior = _check_unit("prior", prior)
    tp = _check_unit("p_true_pos", rates[0])
    fp = _check_unit("p_false_pos", rates[1])
    p_c = _check_unit("concept_marginal", concept_marginal)
    if observed_present:
        like_hyp = tp
        like_not = tp * p_c + fp * (1.0 - p_c)
    else:
        like_hyp = 1.0 - tp
        like_not = (1.0 - tp) * p_c + (1.0 - fp) * (1.0 - p_c)
    denom = like_hyp * prior + like_not * (1.0 - prior)
    if denom == 0.0:
        return prior
    return like_hyp * prior / denom


def posterior_cost(prior: float, p_geq_k: float) -> float:
    """Update for "cost ≥ k whenever the subset holds" on one conforming sample.

    The conditioning event (subset present, cost ≥ k) is certain under the
    hypothesis and has probability ``p_geq_k`` otherwise.
    """
    prior = _check_unit("prior", prior)
    p = _check_unit("p_geq_k", p_geq_k)
    denom = prior + p * (1.0 - prior)
    if denom == 0.0:
        return prior
    return prior / denom


def posterior_cost_noisy(
    prior: float,
    rates: tuple,
    concept_marginal: float,
    p_geq_k: float,
) -> float:
    """Noisy-detector cost update: subset observed present and cost ≥ k seen.

    Marginalizes the unobserved true subset value: under the hypothesis the
    high cost is automatic only when the subset truly holds, so a false-positive
    sighting still needs the cost tail to fire. Exact detectors collapse this
    to ``posterior_cost`` (the marginal cancels).
    """
    prior = _check_unit("prior", prior)
    tp = _check_unit("p_true_pos", rates[0])
    fp = _check_unit("p_false_pos", rates[1])
    p_c = _check_unit("concept_marginal", concept_marginal)
    p = _check_unit("p_geq_k", p_geq_k)
    like_hyp = tp * p_c + p * fp * (1.0 - p_c)
    like_not = p * (tp * p_c + fp * (1.0 - p_c))
    denom = like_hyp * prior + like_not * (1.0 - prior)
    if denom == 0.0:
        return prior
    return like_hyp * prior / denom


def sequential_posterior(prior: float, update, observations: Iterable) -> float:
    """Fold a closed-form update over an observation stream."""
    post = _check_unit("prior", prior)
    for obs in observations:
        post = update(post, obs)
    return post


def subset_observation_params(
    indices: Sequence[int],
    obs_model: ObservationModel,
    marginals: ConceptMarginals,
) -> tuple:
    """Effective (marginal, tp, fp) for the conjunction of several concepts.

    Treats detectors and concept occurrences as independent across the subset:
    the conjunction is truly present with the product marginal, is flagged
    present when every member is flagged, and the compound false-positive rate
    is whatever flag mass is left once the all-true case is removed. Singleton
    subsets return their own rates; the empty subset is vacuously present.
    """
    if len(indices) == 0:
        return 1.0, 1.0, 0.0
    p_s = 1.0
    tp_s = 1.0
    flag_s = 1.0
    for i in indices:
        p_i = float(marginals.p[i])
        tp_i = float(obs_model.p_true_pos[i])
        fp_i = float(obs_model.p_false_pos[i])
        p_s *= p_i
        tp_s *= tp_i
        flag_s *= tp_i * p_i + fp_i * (1.0 - p_i)
    if p_s >= 1.0:
        fp_s = 0.0
    else:
        fp_s = max(0.0, (flag_s - tp_s * p_s) / (1.0 - p_s))
    return p_s, tp_s, min(1.0, fp_s)


@dataclass(frozen=True)
class CostTailEstimate:
    """Empirical P(cost ≥ k | action executable) with its sample count."""

    p_geq_k: float
    sample_count: int


def estimate_cost_tail(action, threshold_k: float, samples: Sequence) -> CostTailEstimate:
    """Tail frequency of the step cost over executable samples of ``action``.

    ``samples`` holds (state, outcome) pairs from ``sample_executable``. The
    estimate is monotone non-increasing in k by construction.
    """
    costs = [out.cost for (_s, out) in samples]
    if not costs:
        return CostTailEstimate(p_geq_k=0.0, sample_count=0)
    hits = sum(1 for c in costs if c >= threshold_k)
    return CostTailEstimate(p_geq_k=hits / len(costs), sample_count=len(costs))


# --- Monte Carlo oracle -----------------------------------------------------


@dataclass(frozen=True)
class GenerativeSpec:
    """One conditional-posterior estimation problem for the MC checker.

    family "precondition": hypothesis ~ B(prior); concept present with prob 1
    under the hypothesis else B(marginal); a detector flag is drawn from
    (tp, fp); the target is P(hypothesis | flag == observed_present) among
    executable samples.

    family "cost": hypothesis ~ B(prior); concept ~ B(marginal); flag as
    above; cost ≥ k holds surely when hypothesis ∧ concept else B(p_geq_k);
    the target is P(hypothesis | flag ∧ cost ≥ k).
    """

    family: str
    prior: float
    concept_marginal: float = 1.0
    rates: tuple = (1.0, 0.0)
    p_geq_k: float = 1.0
    observed_present: bool = True


@dataclass(frozen=True)
class MonteCarloPosterior:
    estimate: float
    std_error: float
    conditioning_count: int

    def within_sigma(self, value: float, sigma: float = 3.0) -> bool:
        band = max(self.std_error * sigma, 1e-12)
        return abs(value - self.estimate) <= band


def monte_carlo_posterior(
    spec: GenerativeSpec, trials: int, rng: np.random.Generator
) -> MonteCarloPosterior:
    """Estimate the conditional posterior by brute simulation (vectorized).

    Returns the conditional frequency of the hypothesis among trials matching
    the conditioning event plus a binomial standard error, so closed forms can
    be checked against an agreement band instead of an exact value.
    """
    if trials <= 0:
        raise ContractViolation("trials must be positive")
    hyp = rng.random(trials) < spec.prior
    if spec.family == "precondition":
        concept = np.where(hyp, True, rng.random(trials) < spec.concept_marginal)
        tp, fp = spec.rates
        flag = rng.random(trials) < np.where(concept, tp, fp)
        event = flag if spec.observed_present else ~flag
    elif spec.family == "cost":
        concept = rng.random(trials) < spec.concept_marginal
        tp, fp = spec.rates
        flag = rng.random(trials) < np.where(concept, tp, fp)
        sure = hyp & concept
        costly = np.where(sure, True, rng.random(trials) < spec.p_geq_k)
        event = flag & costly
    else:
        raise ContractViolation(f"unknown generative family {spec.family!r}")
    n_cond = int(event.sum())
    if n_cond == 0:
        return MonteCarloPosterior(estimate=float("nan"), std_error=float("inf"), conditioning_count=0)
    p_hat = float(hyp[event].mean())
    se = float(np.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / n_cond))
    return MonteCarloPosterior(estimate=p_hat, std_error=se, conditioning_count=n_cond)


def closed_form_for(spec: GenerativeSpec) -> float:
    """Dispatch the matching closed form for a generative spec (test plumbing)."""
    if spec.family == "precondition":
        if spec.rates == (1.0, 0.0):
            if spec.observed_present:
                return posterior_precondition_positive(spec.prior, spec.concept_marginal)
            return posterior_precondition_negative_noiseless(spec.prior)
        return posterior_precondition_noisy(
            spec.prior, spec.observed_present, spec.rates, spec.concept_marginal
        )
    if spec.family == "cost":
        if spec.rates == (1.0, 0.0):
            return posterior_cost(spec.prior, spec.p_geq_k)
        return posterior_cost_noisy(spec.prior, spec.rates, spec.concept_marginal, spec.p_geq_k)
    raise ContractViolation(f"unknown generative family {spec.family!r}")

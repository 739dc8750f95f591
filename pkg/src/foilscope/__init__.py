"""Contrastive explanations of agent plans against user foils.

A foil — the user's proposed alternative action sequence — is classified
against the agent's plan on a black-box simulator, and the engine learns the
symbolic reason it loses (a missing action precondition, or per-step cost
lower bounds) from seeded random-walk samples, with Bayesian confidence under
noisy concept detectors.

Typical entry points: :class:`Session` for the full dialogue,
:func:`classify_query` + the ``find_*`` searches for the pieces, and
:func:`foilscope.service.create_app` / ``foilscope`` (CLI) for the wrappers.
"""
from .concepts import (
    ConceptId,
    ConceptMarginals,
    ConceptVector,
    ConceptVocabulary,
    ManifestError,
    ObservationModel,
    estimate_marginals,
    evaluate_concepts,
    extend_with_negations,
    observe_concepts,
    parse_manifest,
    serialize_manifest,
    spec_from_vocabulary,
)
from .confidence import (
    GenerativeSpec,
    MonteCarloPosterior,
    monte_carlo_posterior,
    posterior_cost,
    posterior_cost_noisy,
    posterior_precondition_noisy,
    posterior_precondition_positive,
    subset_observation_params,
)
from .costs import (
    CostAbstractionEntry,
    CostExplanation,
    CostVocabularyInsufficient,
    find_cost_abstraction,
    find_cost_abstraction_probabilistic,
    find_min_conc_set,
)
from .dialogue import (
    CostAbstractionExplanation,
    DialogueConfig,
    Explanation,
    FoilPreferredExplanation,
    MissingPreconditionExplanation,
    Session,
    VocabularyInsufficientExplanation,
    render_text,
    replay_session,
)
from .model import (
    BOTTOM,
    END,
    ActionId,
    BlackBoxModel,
    ContractViolation,
    ContrastiveQuery,
    CostlierFoil,
    FoilPreferred,
    GoalCompiledModel,
    InvalidFoil,
    InvalidPlanError,
    Trajectory,
    TransitionOutcome,
    classify_query,
    compile_goal_action,
    execute_sequence,
    simulate,
)
from .oracle import (
    SymbolicModel,
    construct_trivial_approximation,
    enumerate_local_states,
    symbolic_execute,
    true_abstract_cost,
    true_preconditions,
    verify_local_approximation,
    with_goal_mask,
)
from .precondition import (
    FoundPrecondition,
    PreconditionVocabularyInsufficient,
    find_missing_precondition,
    find_missing_precondition_probabilistic,
    run_exact_precondition_search,
    run_probabilistic_precondition_search,
    trace_for_concept,
)
from .sampler import (
    SamplerConfig,
    anchors_from_trajectories,
    derive_seed,
    sample_states,
)

__version__ = "0.1.0"

__all__ = [
    "ActionId",
    "BOTTOM",
    "BlackBoxModel",
    "ConceptId",
    "ConceptMarginals",
    "ConceptVector",
    "ConceptVocabulary",
    "ContractViolation",
    "ContrastiveQuery",
    "CostAbstractionEntry",
    "CostAbstractionExplanation",
    "CostExplanation",
    "CostVocabularyInsufficient",
    "CostlierFoil",
    "DialogueConfig",
    "END",
    "Explanation",
    "FoilPreferred",
    "FoilPreferredExplanation",
    "FoundPrecondition",
    "GenerativeSpec",
    "GoalCompiledModel",
    "InvalidFoil",
    "InvalidPlanError",
    "ManifestError",
    "MissingPreconditionExplanation",
    "MonteCarloPosterior",
    "ObservationModel",
    "PreconditionVocabularyInsufficient",
    "SamplerConfig",
    "Session",
    "SymbolicModel",
    "Trajectory",
    "TransitionOutcome",
    "VocabularyInsufficientExplanation",
    "anchors_from_trajectories",
    "classify_query",
    "compile_goal_action",
    "construct_trivial_approximation",
    "derive_seed",
    "enumerate_local_states",
    "estimate_marginals",
    "evaluate_concepts",
    "execute_sequence",
    "extend_with_negations",
    "find_cost_abstraction",
    "find_cost_abstraction_probabilistic",
    "find_min_conc_set",
    "find_missing_precondition",
    "find_missing_precondition_probabilistic",
    "monte_carlo_posterior",
    "observe_concepts",
    "parse_manifest",
    "posterior_cost",
    "posterior_cost_noisy",
    "posterior_precondition_noisy",
    "posterior_precondition_positive",
    "render_text",
    "replay_session",
    "run_exact_precondition_search",
    "run_probabilistic_precondition_search",
    "sample_states",
    "serialize_manifest",
    "simulate",
    "spec_from_vocabulary",
    "subset_observation_params",
    "symbolic_execute",
    "trace_for_concept",
    "true_abstract_cost",
    "true_preconditions",
    "verify_local_approximation",
    "with_goal_mask",
]
